import numpy as np


def _ticks(duration: float, dt: float) -> int:
    return int(round(duration / dt))


def square_wave(low: float, high: float, period: float, duration: float, dt: float, start_high: bool = True) -> np.ndarray:
    """Position reference alternating between two levels every half period"""
    t = np.arange(_ticks(duration, dt)) * dt
    first_half = np.floor(t / (period / 2.0)).astype(int) % 2 == 0
    upper = first_half if start_high else ~first_half
    return np.where(upper, high, low)


def sinusoid(center: float, amplitude: float, frequency: float, duration: float, dt: float) -> np.ndarray:
    """center + amplitude*sin(2*pi*f*t) sampled every dt"""
    t = np.arange(_ticks(duration, dt)) * dt
    return center + amplitude * np.sin(2.0 * np.pi * frequency * t)

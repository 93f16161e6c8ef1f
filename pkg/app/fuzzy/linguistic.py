from typing import Dict, Tuple

from app.fuzzy.rule_base import RuleBase

_TERMS: Dict[int, Tuple[str, ...]] = {
    3: ("N", "ZE", "P"),
    5: ("NB", "NS", "ZE", "PS", "PB"),
    7: ("NB", "NM", "NS", "ZE", "PS", "PM", "PB"),
}


def term_labels(n: int) -> Tuple[str, ...]:
    """Linguistic names for n ordered fuzzy sets"""
    return _TERMS.get(n, tuple(f"T{k}" for k in range(n)))


def describe_rule(rb: RuleBase, rule: int, output_name: str = "y") -> str:
    """Render one rule as IF ... THEN text"""
    clauses = []
    for partition, index in zip(rb.antecedents, rb.set_indices(rule)):
        clauses.append(f"{partition.variable_name} is {term_labels(partition.size)[index]}")
    return f"IF {' and '.join(clauses)} THEN {output_name} is {rb.conclusions[rule]:.6g}"

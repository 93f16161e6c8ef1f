import math

import numpy as np
import pytest

from app.errors import DefuzzificationError, DimensionError, PartitionError, UnsupportedRegionError
from app.fuzzy.defuzzify import (
    DiscreteFuzzySet,
    defuzz_center_of_area,
    defuzz_max_criterion,
    defuzz_mean_of_max,
)
from app.fuzzy.linguistic import describe_rule, term_labels
from app.fuzzy.membership import MembershipFunction, make_uniform_partition, membership
from app.fuzzy.rule_base import RuleBase, infer, rule_activation


def test_gaussian_membership_values():
    """Gaussian sets peak at their center and follow exp(-1/2 z^2)"""
    mf = MembershipFunction(kind="gaussian", center=0.0, width=1.0)
    assert membership(mf, 0.0) == 1.0
    assert membership(mf, 1.0) == pytest.approx(math.exp(-0.5))
    assert membership(mf, 0.37) == membership(mf, -0.37)


def test_triangular_membership_values():
    mf = MembershipFunction(kind="triangular", center=0.5, width=0.5)
    assert membership(mf, 1.0) == 0.0
    assert membership(mf, 0.5) == 1.0
    assert membership(mf, 0.75) == pytest.approx(0.5)
    assert membership(mf, 42.0) == 0.0


def test_membership_stays_in_unit_interval(rng):
    xs = rng.uniform(-50.0, 50.0, size=500)
    for kind in ("gaussian", "triangular"):
        degrees = membership(MembershipFunction(kind=kind, center=1.5, width=2.0), xs)
        assert np.all((degrees >= 0.0) & (degrees <= 1.0))


@pytest.mark.parametrize("kwargs", [
    {"kind": "gaussian", "center": 0.0, "width": 0.0},
    {"kind": "gaussian", "center": 0.0, "width": -1.0},
    {"kind": "triangular", "center": 0.0, "width": 1.0, "amplitude": 0.5},
    {"kind": "gaussian", "center": float("nan"), "width": 1.0},
])
def test_invalid_membership_functions(kwargs):
    with pytest.raises(PartitionError):
        MembershipFunction(**kwargs)


def test_uniform_partition_position_grid():
    """11 gaussians over the piston course with 60% widths"""
    partition = make_uniform_partition("y", 0.0, 0.2, 11, "gaussian", 0.6)
    np.testing.assert_allclose(partition.centers, np.arange(11) * 0.02, atol=1e-15)
    np.testing.assert_allclose(partition.widths, 0.012)
    assert partition.centers[0] == 0.0
    assert partition.centers[-1] == 0.2


def test_uniform_partition_endpoints_and_spacing():
    two = make_uniform_partition("x", 0.0, 1.0, 2)
    assert list(two.centers) == [0.0, 1.0]

    seven = make_uniform_partition("x", -1.0, 1.0, 7)
    assert np.diff(seven.centers) == pytest.approx(np.full(6, 1.0 / 3.0))
    assert seven.widths[0] == pytest.approx(0.2)


@pytest.mark.parametrize("lo,hi,n,fraction", [
    (0.0, 1.0, 1, 0.6),
    (1.0, 1.0, 3, 0.6),
    (2.0, 1.0, 3, 0.6),
    (0.0, 1.0, 3, 0.0),
    (0.0, 1.0, 3, 2.5),
])
def test_invalid_partitions(lo, hi, n, fraction):
    with pytest.raises(PartitionError):
        make_uniform_partition("x", lo, hi, n, "gaussian", fraction)


def test_triangular_partition_degrees_sum_to_one(rng):
    partition = make_uniform_partition("x", 0.0, 1.0, 5, "triangular", 1.0)
    for x in rng.uniform(0.0, 1.0, size=200):
        degrees = partition.degrees(x)
        assert np.count_nonzero(degrees) <= 2
        assert degrees.sum() == pytest.approx(1.0)

    for edge in (0.0, 1.0):
        assert np.count_nonzero(partition.degrees(edge)) == 1


def test_activation_matches_product_of_memberships(rng):
    partitions = (
        make_uniform_partition("a", 0.0, 1.0, 2),
        make_uniform_partition("b", -2.0, 2.0, 2),
    )
    rb = RuleBase.structure(partitions)
    x = (0.3, 0.8)
    activation = rule_activation(rb, x)

    mu_a = [membership(mf, x[0]) for mf in partitions[0].functions]
    mu_b = [membership(mf, x[1]) for mf in partitions[1].functions]
    for i in range(2):
        for j in range(2):
            assert activation.degrees[i + 2 * j] == pytest.approx(mu_a[i] * mu_b[j], rel=1e-14)
    assert activation.total == pytest.approx(activation.degrees.sum(), rel=1e-12)


def test_rule_index_convention_first_antecedent_fastest():
    partitions = (
        make_uniform_partition("a", 0.0, 1.0, 2, "triangular", 1.0),
        make_uniform_partition("b", 0.0, 2.0, 3, "triangular", 1.0),
        make_uniform_partition("c", 0.0, 3.0, 4, "triangular", 1.0),
    )
    rb = RuleBase.structure(partitions)
    for i1 in range(2):
        for i2 in range(3):
            for i3 in range(4):
                rule = i1 + 2 * (i2 + 3 * i3)
                assert rb.rule_index((i1, i2, i3)) == rule
                assert rb.set_indices(rule) == (i1, i2, i3)
                x = (partitions[0].centers[i1], partitions[1].centers[i2], partitions[2].centers[i3])
                degrees = rule_activation(rb, x).degrees
                assert degrees[rule] == 1.0
                assert degrees.sum() == 1.0


def test_activation_matrix_agrees_with_single_activation(rng):
    rb = RuleBase.structure((
        make_uniform_partition("a", 0.0, 1.0, 3),
        make_uniform_partition("b", 0.0, 1.0, 4),
        make_uniform_partition("c", 0.0, 1.0, 2),
    ))
    inputs = rng.uniform(0.0, 1.0, size=(25, 3))
    matrix = rb.activation_matrix(inputs)
    for k in range(25):
        np.testing.assert_allclose(matrix[k], rule_activation(rb, inputs[k]).degrees, rtol=1e-15)


def test_infer_worked_example(grid_2x2):
    """x = (0.25, 0.5): degrees 0.375, 0.125, 0.375, 0.125 over conclusions 1..4"""
    assert infer(grid_2x2, (0.25, 0.5)) == pytest.approx(2.25)


def test_infer_constant_and_dominant_rule(grid_2x2):
    constant = grid_2x2.with_conclusions(np.full(4, -7.5))
    assert infer(constant, (0.31, 0.77)) == pytest.approx(-7.5)
    assert infer(grid_2x2, (1.0, 0.0)) == 2.0


def test_infer_bounded_by_conclusions(rng):
    rb = RuleBase.structure((
        make_uniform_partition("a", 0.0, 1.0, 4),
        make_uniform_partition("b", 0.0, 1.0, 3),
    ))
    for _ in range(30):
        model = rb.with_conclusions(rng.normal(0.0, 100.0, size=rb.rule_count))
        y = infer(model, rng.uniform(-0.5, 1.5, size=2))
        assert model.conclusions.min() - 1e-9 <= y <= model.conclusions.max() + 1e-9


def test_infer_unsupported_region():
    rb = RuleBase.structure((make_uniform_partition("a", 0.0, 1.0, 2, "gaussian", 0.01),))
    with pytest.raises(UnsupportedRegionError) as excinfo:
        infer(rb, (100.0,))
    assert excinfo.value.x == (100.0,)
    assert excinfo.value.total == 0.0


def test_infer_dimension_mismatch(grid_2x2):
    with pytest.raises(DimensionError):
        infer(grid_2x2, (0.5,))
    with pytest.raises(DimensionError):
        grid_2x2.activation_matrix(np.zeros((3, 3)))


def test_rule_base_rejects_wrong_conclusion_count():
    partitions = (make_uniform_partition("a", 0.0, 1.0, 3),)
    with pytest.raises(PartitionError):
        RuleBase(antecedents=partitions, conclusions=np.zeros(4))


def test_rule_base_arrays_are_read_only(grid_2x2):
    with pytest.raises(ValueError):
        grid_2x2.conclusions[0] = 10.0
    updated = grid_2x2.with_conclusions(np.zeros(4))
    assert grid_2x2.conclusions[0] == 1.0
    assert updated.conclusions[0] == 0.0


def test_max_criterion():
    assert defuzz_max_criterion(DiscreteFuzzySet([1, 2, 3], [0.2, 0.9, 0.4])) == 2.0
    assert defuzz_max_criterion(DiscreteFuzzySet([1, 2, 3], [0.8, 0.1, 0.8])) == 1.0
    assert defuzz_max_criterion(DiscreteFuzzySet([5.5], [0.3])) == 5.5


def test_mean_of_max():
    assert defuzz_mean_of_max(DiscreteFuzzySet([1, 2, 3], [0.8, 0.1, 0.8])) == 2.0
    assert defuzz_mean_of_max(DiscreteFuzzySet([1, 2, 3], [0.2, 0.9, 0.4])) == 2.0
    assert defuzz_mean_of_max(DiscreteFuzzySet([0, 1, 2, 5], [1.0, 1.0, 0.3, 1.0 - 1e-12])) == 2.0


def test_center_of_area():
    assert defuzz_center_of_area(DiscreteFuzzySet([0, 1, 2, 3, 4], [0.1, 0.5, 1.0, 0.5, 0.1])) == pytest.approx(2.0)
    assert defuzz_center_of_area(DiscreteFuzzySet([0, 4], [1.0, 1.0])) == 2.0
    assert defuzz_center_of_area(DiscreteFuzzySet([0, 4], [0.25, 0.75])) == 3.0


def test_center_of_area_scale_invariant(rng):
    supports = rng.uniform(-10.0, 10.0, size=12)
    degrees = rng.uniform(0.0, 0.5, size=12)
    base = defuzz_center_of_area(DiscreteFuzzySet(supports, degrees))
    assert defuzz_center_of_area(DiscreteFuzzySet(supports, 2.0 * degrees)) == pytest.approx(base, rel=1e-12)


def test_defuzzification_errors():
    with pytest.raises(DefuzzificationError):
        defuzz_center_of_area(DiscreteFuzzySet([1, 2], [0.0, 0.0]))
    with pytest.raises(DefuzzificationError):
        DiscreteFuzzySet([], [])
    with pytest.raises(DefuzzificationError):
        DiscreteFuzzySet([1, 2], [0.5, 1.5])


def test_term_labels():
    assert term_labels(3) == ("N", "ZE", "P")
    assert term_labels(7)[3] == "ZE"
    assert term_labels(4) == ("T0", "T1", "T2", "T3")


def test_describe_rule(grid_2x2):
    text = describe_rule(grid_2x2, grid_2x2.rule_index((1, 0)), "omega")
    assert text == "IF x1 is T1 and x2 is T0 THEN omega is 2"

import math

import pytest

from implisolve import (
    DegenerateJacobian,
    DimensionMismatch,
    Matrix,
    NoSignChange,
    RadiusUnderflow,
    identity,
    parse,
)
from implisolve.verify import (
    check_chain_rule,
    check_operator_bound,
    injectivity_radius,
    mvt_witness,
)


def test_operator_bound_identity():
    report = check_operator_bound(identity(2), trials=500)
    assert report.passed
    # every ratio for the identity is |v| / (sqrt(2) |v|)
    assert abs(report.max_ratio - 1 / math.sqrt(2)) < 1e-12


def test_operator_bound_zero_matrix_convention():
    report = check_operator_bound(Matrix.from_rows([[0.0, 0.0], [0.0, 0.0]]))
    assert report.max_ratio == 0.0
    assert report.passed


def test_operator_bound_rank_one():
    report = check_operator_bound(Matrix.from_rows([[1.0, 0.0], [0.0, 0.0]]))
    assert report.passed
    assert report.max_ratio <= 1.0


def test_operator_bound_deterministic():
    m = Matrix.from_rows([[0.3, -1.2], [0.8, 0.1]])
    assert check_operator_bound(m, rng_seed=4) == check_operator_bound(m, rng_seed=4)


def test_chain_rule_identity_composition():
    F = parse(["x1^2 - x2", "x1*x2"], ["x1", "x2"])
    report = check_chain_rule(F, identity(2), (0.0, 0.0), [(0.3, -0.4), (1.1, 0.2)])
    assert report.passed
    assert report.max_discrepancy <= 1e-12


def test_chain_rule_hand_example():
    # G(t) = F(2t, 1) = 4t^2 + 1, so JG = [8t]
    F = parse(["x1^2 + x2"], ["x1", "x2"])
    M = Matrix.from_rows([[2.0], [0.0]])
    report = check_chain_rule(F, M, (0.0, 1.0), [(0.5,), (-0.25,)])
    assert report.passed
    assert report.max_discrepancy <= 1e-12


def test_chain_rule_dimension_mismatch():
    F = parse(["x1 + x2"], ["x1", "x2"])
    with pytest.raises(DimensionMismatch):
        check_chain_rule(F, Matrix.from_rows([[1.0]]), (0.0, 0.0), [(0.1,)])


def test_mvt_witness_quadratic_midpoint():
    report = mvt_witness(parse(["x^2"], ["x"]), (0.0,), (1.0,))
    assert report.found
    assert abs(report.t - 0.5) < 1e-10


def test_mvt_witness_affine_convention():
    report = mvt_witness(parse(["2*x + 3*y"], ["x", "y"]), (0.0, 0.0), (1.0, 2.0))
    assert report.t == 0.5
    assert report.residual == 0.0


def test_mvt_witness_cubic():
    report = mvt_witness(parse(["x^3"], ["x"]), (0.0,), (1.0,))
    # 3c^2 = 1 by hand
    assert abs(report.t - 1 / math.sqrt(3)) < 1e-8
    assert report.residual <= 1e-10


def test_mvt_witness_no_sign_change_at_coarse_grid():
    # g(t) = 2*pi*cos(2*pi*t) is positive at both endpoints; a two-point
    # grid cannot see the interior dip
    F = parse(["sin(x)"], ["x"])
    with pytest.raises(NoSignChange):
        mvt_witness(F, (0.0,), (2 * math.pi,), grid=2)
    report = mvt_witness(F, (0.0,), (2 * math.pi,), grid=1024)
    assert report.found


def test_mvt_witness_rejects_equal_endpoints():
    with pytest.raises(ValueError):
        mvt_witness(parse(["x^2"], ["x"]), (1.0,), (1.0,))


def test_injectivity_linear_returns_initial_radius():
    F = parse(["2*x1 + x2", "x1 - x2"], ["x1", "x2"])
    r, report = injectivity_radius(F, (0.0, 0.0), tuple_samples=200, pair_samples=200)
    assert r == 0.5
    assert report.passed
    assert not report.certified


def test_injectivity_square_function_one_dim():
    # derivative 2 xi keeps one sign only for radii below 1 around p = 1
    F = parse(["x1^2"], ["x1"])
    r, report = injectivity_radius(F, (1.0,), tuple_samples=500, pair_samples=500)
    assert 0 < r < 1.0
    assert report.passed


def test_injectivity_complex_square_map():
    F = parse(["x1^2 - x2^2", "2*x1*x2"], ["x1", "x2"])
    r, report = injectivity_radius(F, (1.0, 1.0), tuple_samples=500, pair_samples=500)
    assert r > 0.0
    assert report.passed


def test_injectivity_degenerate_jacobian():
    F = parse(["x1^2"], ["x1"])
    with pytest.raises(DegenerateJacobian):
        injectivity_radius(F, (0.0,))


def test_injectivity_radius_underflow():
    # near-degenerate point: every radius above the floor still straddles 0
    F = parse(["x1^2"], ["x1"])
    with pytest.raises(RadiusUnderflow):
        injectivity_radius(F, (1e-9,), tuple_samples=200, pair_samples=200)


def test_injectivity_deterministic():
    F = parse(["x1^2 - x2^2", "2*x1*x2"], ["x1", "x2"])
    a = injectivity_radius(F, (1.0, 1.0), tuple_samples=100, pair_samples=100, rng_seed=3)
    b = injectivity_radius(F, (1.0, 1.0), tuple_samples=100, pair_samples=100, rng_seed=3)
    assert a == b

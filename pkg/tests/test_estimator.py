import numpy as np
import pytest

from clam import presets
from clam.aperture import Aperture, PolynomialPath
from clam.estimator import (ClamOperator, ClamSystem, EstimateFlag, assemble,
                            determinant_diagnostic, estimate, solve_full, solve_reduced)
from clam.fieldsim import FieldSamples, simulate, single
from clam.linalg import det
from clam.windows import BaseWindow, build_window_set


def _system(M, b):
    M = np.asarray(M, dtype=complex)
    return ClamSystem(M, np.asarray(b, dtype=complex), det(M))


def test_zero_field_gives_zero_system(cubic, cubic_op):
    ap, _ = cubic
    sys = cubic_op(FieldSamples(np.zeros(ap.extended_count, complex), ap.spacing))
    assert np.all(sys.M == 0) and np.all(sys.b == 0) and sys.det_M == 0
    assert solve_full(sys).singular


def test_homogeneity_under_complex_scaling(cubic, cubic_op):
    ap, g = cubic
    f = simulate(single(0.1, 0.05, 5.0), ap, g, 0.1, seed=4)
    c = 3.7 * np.exp(-2.1j)
    a, b = cubic_op(f), cubic_op(f.scaled(c))
    np.testing.assert_allclose(b.M, c * a.M, rtol=1e-12)
    np.testing.assert_allclose(b.b, c * a.b, rtol=1e-12)
    assert b.det_M == pytest.approx(c ** 3 * a.det_M, rel=1e-10)
    assert determinant_diagnostic(b) == pytest.approx(determinant_diagnostic(a), rel=1e-10)
    np.testing.assert_allclose(solve_full(b).offsets, solve_full(a).offsets, atol=1e-9)


def test_assemble_matches_operator(cubic, cubic_hann, cubic_op):
    ap, g = cubic
    f = simulate(single(0, 0, 2.0), ap, g)
    np.testing.assert_array_equal(assemble(f, ap, g, cubic_hann).M, cubic_op(f).M)


def test_field_length_checked(cubic_op):
    with pytest.raises(ValueError):
        cubic_op(np.zeros(10, complex))


def test_identity_system():
    est = solve_full(_system(np.eye(3), [1, 2, 3]))
    assert est.offsets == (1, 2, 3)
    assert est.flags == EstimateFlag.NONE
    assert est.det_score == 1.0


def test_reduced_identity_passthrough():
    # the reduced block [[M00, M02], [M10, M12]] is the 2x2 identity
    M = [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
    est = solve_reduced(_system(M, [4, 9, 0]))
    assert (est.dx, est.dy, est.dz) == (4, 0, 9)
    assert est.flags == EstimateFlag.DY_ASSUMED


def test_flags_from_thresholds():
    # rows 1 and 2 are nearly parallel
    M = [[1, 0, 0], [0, 1, 0], [0, 1, 1e-6]]
    est = solve_full(_system(M, [1, 1, 1 + 1j]), det_threshold=1e-3, imag_threshold=0.5)
    assert EstimateFlag.LOW_DETERMINANT in est.flags
    assert EstimateFlag.HIGH_IMAG_RESIDUAL in est.flags
    assert est.imag_residual == pytest.approx(1e6)
    assert solve_full(_system(np.diag([1, 1, 1e-6]), [1, 1, 1])).flags == EstimateFlag.NONE
    assert str(est.flags) == "LOW_DETERMINANT|HIGH_IMAG_RESIDUAL"


def test_rank_deficient_score_is_zero():
    assert determinant_diagnostic(_system([[1, 2, 3], [2, 4, 6], [1, 0, 0]], [0, 0, 0])) == 0.0


def test_linear_aperture_is_singular(cubic):
    _, g = cubic
    ap = Aperture(PolynomialPath([0, 27.75]), PolynomialPath([0.3]), 1.0, 4001)
    ws = build_window_set(BaseWindow("hann"), ap)
    est = estimate(simulate(single(0.05, 0.02, 3.0), ap, g), ap, g, ws)
    assert est.singular
    assert np.isnan(est.dz)
    assert str(est.flags).startswith("SINGULAR")


def test_parabola_full_solve_is_ill_conditioned(parabola_op, parabola):
    ap, g = parabola
    sys = parabola_op(simulate(single(0.05, 0.03, 5.0), ap, g))
    full = solve_full(sys)
    assert EstimateFlag.LOW_DETERMINANT in full.flags
    assert abs(full.dz - 5.0) > 1.0
    reduced = solve_reduced(sys)
    assert abs(reduced.dz - 5.0) < 0.5


@pytest.mark.parametrize("dz", [-16.7, -8.0, 0.0, 4.0, 16.7])
def test_reduced_parabola_recovers_height(parabola, parabola_op, dz):
    ap, g = parabola
    est = solve_reduced(parabola_op(simulate(single(0.0, 0.0, dz), ap, g)))
    assert abs(est.dz - dz) < 0.5


def test_reduced_parabola_error_monotone_in_range_offset(parabola, parabola_op):
    ap, g = parabola
    dys = np.linspace(-0.15, 0.15, 9)
    errs = [solve_reduced(parabola_op(simulate(single(0, dy, 0), ap, g))).dz for dy in dys]
    assert np.all(np.diff(errs) < 0) or np.all(np.diff(errs) > 0)


def test_reduced_matches_full_on_cubic_when_dy_is_zero(cubic, cubic_op):
    ap, g = cubic
    for dz in (-10.0, 0.0, 7.0):
        sys = cubic_op(simulate(single(0.05, 0.0, dz), ap, g))
        assert abs(solve_reduced(sys).dz - solve_full(sys).dz) < 0.5


def test_zero_offset_fixed_point(cubic, cubic_op):
    ap, g = cubic
    est = solve_full(cubic_op(simulate(single(), ap, g, range_model="parabolic")))
    assert max(abs(v) for v in est.offsets) < 1e-6


def test_stacked_solver_agrees_with_complex(cubic, cubic_op):
    ap, g = cubic
    sys = cubic_op(simulate(single(0.1, -0.1, 9.0), ap, g, range_model="parabolic"))
    a = solve_full(sys)
    b = solve_full(sys, method="stacked")
    np.testing.assert_allclose(b.offsets, a.offsets, atol=1e-6)
    assert solve_full(_system(np.zeros((3, 3)), [1, 1, 1]), method="stacked").singular


def test_unknown_modes_rejected(cubic, cubic_hann):
    ap, g = cubic
    f = simulate(single(), ap, g)
    with pytest.raises(ValueError):
        estimate(f, ap, g, cubic_hann, mode="diagonal")
    with pytest.raises(ValueError):
        solve_full(_system(np.eye(3), [1, 1, 1]), method="qr")


def test_boundary_residual_reflects_window_edges(cubic):
    ap, g = cubic
    f = simulate(single(0, 0, 3.0), ap, g)
    residual = {}
    for kind in ("hann", "hann2", "rect"):
        op = ClamOperator(ap, g, build_window_set(BaseWindow(kind), ap))
        residual[kind] = op(f).boundary_residual
    assert residual["hann2"] < 1e-6 * residual["hann"]
    assert residual["hann"] < residual["rect"]


def _random_offsets(rng, n):
    return np.column_stack([rng.uniform(-0.15, 0.15, n), rng.uniform(-0.15, 0.15, n),
                            rng.uniform(-10, 10, n)])


def test_oracle_consistency_random_scenes(cubic, cubic_op):
    """Noiseless recovery on the cubic aperture; any cross-term sign slip breaks it."""
    ap, g = cubic
    vres = presets.vertical_half_resolution(g)
    pixel = presets.horizontal_resolution(g)
    for dx, dy, dz in _random_offsets(np.random.default_rng(2024), 100):
        est = solve_full(cubic_op(simulate(single(dx, dy, dz), ap, g)))
        assert abs(est.dz - dz) < 0.05 * vres
        assert abs(est.dx - dx) < pixel
        assert abs(est.dy - dy) < pixel


def test_oracle_consistency_in_model(cubic, cubic_op):
    # with the parabolic range the linear system is exact up to discretization
    ap, g = cubic
    for dx, dy, dz in _random_offsets(np.random.default_rng(7), 20):
        est = solve_full(cubic_op(simulate(single(dx, dy, dz), ap, g, range_model="parabolic")))
        np.testing.assert_allclose(est.offsets, (dx, dy, dz), atol=1e-5)


@pytest.mark.parametrize("entry", [(r, c) for r in range(3) for c in range(3)])
def test_any_single_sign_error_is_detected_in_model(cubic, cubic_op, entry):
    ap, g = cubic
    worst = []
    for dx, dy, dz in _random_offsets(np.random.default_rng(5), 6):
        sys = cubic_op(simulate(single(dx, dy, dz), ap, g, range_model="parabolic"))
        M = sys.M.copy()
        M[entry] = -M[entry]
        est = solve_full(_system(M, sys.b))
        worst.append(np.max(np.abs(np.subtract(est.offsets, (dx, dy, dz)))))
    assert np.median(worst) > 1e-3


@pytest.mark.parametrize("entry", [(0, 0), (0, 2), (1, 0), (1, 2), (2, 0), (2, 2)])
def test_position_column_sign_error_fails_tolerance(cubic, cubic_op, entry):
    ap, g = cubic
    vres = presets.vertical_half_resolution(g)
    misses = 0
    for dx, dy, dz in _random_offsets(np.random.default_rng(5), 10):
        sys = cubic_op(simulate(single(dx, dy, dz), ap, g))
        M = sys.M.copy()
        M[entry] = -M[entry]
        est = solve_full(_system(M, sys.b))
        misses += abs(est.dz - dz) > 0.05 * vres or abs(est.dx - dx) > 0.3
    assert misses >= 3


def test_printed_sign_convention_only_moves_range_offset(cubic, cubic_op):
    """Flipping the dy column and the matching b term maps dy to -(2 y0 + dy)."""
    ap, g = cubic
    sys = cubic_op(simulate(single(0.1, 0.05, 6.0), ap, g, range_model="parabolic"))
    M = sys.M.copy()
    M[:, 1] = -M[:, 1]
    est = solve_full(_system(M, sys.b + 2 * g.y0 * sys.M[:, 1]))
    np.testing.assert_allclose(est.offsets, (0.1, -2 * g.y0 - 0.05, 6.0), atol=1e-5)


def test_uniform_row_sign_is_irrelevant(cubic, cubic_op):
    ap, g = cubic
    sys = cubic_op(simulate(single(0.1, 0.1, 4.0), ap, g))
    flip = np.diag([1, -1, 1])
    flipped = solve_full(_system(flip @ sys.M, flip @ sys.b))
    np.testing.assert_allclose(flipped.offsets, solve_full(sys).offsets, atol=1e-9)

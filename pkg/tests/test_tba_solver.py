"""Grid, kernels, convolution, residuals and the fixed-point solvers."""
import math

import numpy as np
import pytest

from tba_exact.closedform import ModelSpec
from tba_exact.tba_solver import (
    BranchJumpError,
    GridFunction,
    GridMismatchError,
    KernelSet,
    SolverError,
    ThetaGrid,
    closed_form_candidate,
    continuous_log,
    convolve,
    residual,
    solve_su2k,
    solve_su3,
)
from tba_exact import tba_solver

GRID = ThetaGrid(-30.0, 5.0, 0.025)
WINDOW = GRID.window(-10.0, 3.0)


def _sup(res, mask):
    return max(r.sup(mask) for r in res.values())


def test_grid_contains_window_points_exactly():
    pts = GRID.points
    assert -10.0 in pts and 3.0 in pts
    assert GRID.count == 1401


def test_grid_validation():
    with pytest.raises(ValueError):
        ThetaGrid(0.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        ThetaGrid(0.0, 10.0, -0.1)
    with pytest.raises(ValueError):
        ThetaGrid(5.0, 1.0, 0.01)


def test_kernel_integrals():
    su3 = KernelSet(ModelSpec.su3(), GRID)
    assert su3[1, "0"].integral == pytest.approx(2 / 3)
    assert su3[1, "0bar"].integral == pytest.approx(1 / 3)
    sech = KernelSet(ModelSpec.su2k(1), GRID)["sech"]
    assert sech.integral == pytest.approx(0.5)
    # The full-line quadrature of the sampled kernel reproduces the analytic value.
    s = np.linspace(-40, 40, 8001)
    for ker in (sech, su3[1, "0"], su3[1, "0bar"]):
        assert np.trapezoid(ker(s), s) / (2 * math.pi) == pytest.approx(ker.integral, abs=1e-12)
        assert ker.tail(0.0) == pytest.approx(ker.integral / 2, abs=1e-15)


def test_convolve_constant_function():
    ker = KernelSet(ModelSpec.su2k(1), GRID)["sech"]
    f = GridFunction(GRID, np.full(GRID.count, 3.0), plateau=3.0, limit=3.0)
    out = convolve(ker, f)
    # Only the h^4 end correction is left out.
    assert np.max(np.abs(out.values - 1.5)) < 1e-9
    assert np.max(np.abs(out.values - 1.5)[WINDOW]) < 1e-13


def test_convolve_against_quadrature():
    """Convolution of a smooth step against scipy quad on the whole line."""
    from scipy.integrate import quad

    ker = KernelSet(ModelSpec.su3(), GRID)[1, "0bar"]
    g = lambda t: 1.0 / (1.0 + math.exp(t))  # noqa: E731
    f = GridFunction(GRID, [g(t) for t in GRID.points], plateau=1.0, limit=0.0)
    out = convolve(ker, f)
    for th in (-5.0, 0.0, 2.5):
        ref = quad(lambda t: ker(th - t) * g(t), -80, 80, points=[th], limit=200, epsabs=1e-14)[0] / (2 * math.pi)
        i = int(np.argmin(np.abs(GRID.points - th)))
        assert abs(out.values[i] - ref) < 1e-10


def test_grid_mismatch():
    ker = KernelSet(ModelSpec.su2k(1), GRID)["sech"]
    other = ThetaGrid(-20.0, 5.0, 0.025)
    with pytest.raises(GridMismatchError):
        convolve(ker, GridFunction(other, np.zeros(other.count), 0.0))
    with pytest.raises(GridMismatchError):
        GridFunction(GRID, np.zeros(5), 0.0)


def test_continuous_log_tracks_branch_and_detects_jumps():
    t = np.linspace(0, 3 * math.pi, 400)
    z = np.exp(1j * t)
    assert np.allclose(continuous_log(z, 0.0).imag, t)
    assert np.allclose(continuous_log(z, 2 * math.pi).imag, t + 2 * math.pi)
    with pytest.raises(BranchJumpError):
        continuous_log(np.array([1.0, -1.0 + 1e-3j, 1.0]), 0.0)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 2.5])
def test_su2k_closed_form_residual(k):
    m = ModelSpec.su2k(k)
    res = residual(m, closed_form_candidate(m, GRID))
    assert _sup(res, WINDOW) < 1e-6


def test_su3_closed_form_residual():
    m = ModelSpec.su3()
    res = residual(m, closed_form_candidate(m, GRID))
    assert _sup(res, WINDOW) < 1e-5


def test_residual_detects_wrong_candidate():
    m = ModelSpec.su2k(1)
    cand = closed_form_candidate(m, GRID)
    cand["B"] = cand["B"] * 1.001
    assert _sup(residual(m, cand), WINDOW) > 1e-5


@pytest.mark.parametrize("k", [1, 3])
def test_residual_refinement_order(k):
    m = ModelSpec.su2k(k)
    errs = []
    for h in (0.25, 0.125):
        g = ThetaGrid(-30.0, 5.0, h)
        errs.append(_sup(residual(m, closed_form_candidate(m, g)), g.window(-10, 3)))
    assert math.log2(errs[0] / errs[1]) >= 2


def test_su3_residual_refinement_order():
    m = ModelSpec.su3()
    errs = []
    for h in (0.25, 0.125):
        g = ThetaGrid(-30.0, 5.0, h)
        errs.append(_sup(residual(m, closed_form_candidate(m, g)), g.window(-10, 3)))
    assert math.log2(errs[0] / errs[1]) >= 2


@pytest.mark.parametrize("k", [1, 2, 3])
def test_solve_su2k_matches_closed_form(k):
    A, B, rep = solve_su2k(k, GRID, damping=0.5, tol=1e-11)
    assert rep.converged and rep.iterations < 2000
    cand = closed_form_candidate(ModelSpec.su2k(k), GRID)
    assert np.max(np.abs(A.values - cand["A"])[WINDOW]) < 1e-6
    assert np.max(np.abs(B.values - cand["B"])[WINDOW]) < 1e-6
    # The fixed point satisfies the equations it was solved from.
    assert _sup(residual(ModelSpec.su2k(k), {"A": A, "B": B}), WINDOW) < 1e-9


def test_damping_independence():
    g = ThetaGrid(-30.0, 5.0, 0.05)
    A1, B1, r1 = solve_su2k(1, g, damping=0.3, tol=1e-12)
    A2, B2, r2 = solve_su2k(1, g, damping=0.8, tol=1e-12)
    assert r1.converged and r2.converged
    assert np.max(np.abs(B1.values - B2.values)) < 1e-9


def test_solver_reports_non_convergence():
    _, _, rep = solve_su2k(1, ThetaGrid(-30.0, 5.0, 0.1), max_iter=3)
    assert not rep.converged and rep.iterations == 3


def test_solver_nan_guard(monkeypatch):
    def broken(ks, k, A, B):
        return A * np.nan, B

    monkeypatch.setattr(tba_solver, "_su2k_map", broken)
    with pytest.raises(SolverError):
        solve_su2k(1, ThetaGrid(-30.0, 5.0, 0.1))


def test_solver_argument_validation():
    g = ThetaGrid(-30.0, 5.0, 0.1)
    with pytest.raises(ValueError):
        solve_su2k(1, g, damping=1.5)
    with pytest.raises(ValueError):
        solve_su2k(1, g, tol=1e-14)
    with pytest.raises(ValueError):
        solve_su2k(-1, g)


def test_solve_su3_matches_closed_form():
    g = ThetaGrid(-30.0, 5.0, 0.05)
    A1, A2, B0, B0b, rep = solve_su3(g)
    assert rep.converged
    cand = closed_form_candidate(ModelSpec.su3(), g)
    win = g.window(-10, 3)
    for f, key in ((A1, "A1"), (A2, "A2"), (B0, "B0"), (B0b, "B0bar")):
        assert np.max(np.abs(f.values - cand[key])[win]) < 1e-6
    # The left end sits on the plateau.
    assert abs(B0.values[0] + (3 + 1j) / 4) < 1e-5
    # Conjugation symmetry survives the iteration.
    assert np.max(np.abs(A2.values - np.conj(A1.values))) < 1e-9

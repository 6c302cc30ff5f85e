"""Damped Picard solver and residual evaluator for the massless TBA systems.

SU(2)_k:
    A = e^theta - ln(2 cos(pi/(k+2))) - (sech/2pi) * ln(1 + B^2)
    B = -(sech/2pi) * e^{-A}

SU(3)_1 (a_0 = 1, a_0bar = -1):
    A_r = e^theta - sum_l Phi_{r,l} * ln(i a_l + B_l)
    B_l = -sum_r Phi_{r,l} * e^{-A_r}
    Phi_{1,0} = Phi_{2,0bar} = sin(pi/3)/(cosh - 1/2),
    Phi_{1,0bar} = Phi_{2,0} = sin(pi/3)/(cosh + 1/2).

Every kernel has the form sin(a)/(cosh s + cos a) with a in (0, pi), so
its tail integrals are elementary: int_s^inf = a - 2 atan(tan(a/2) tanh(s/2)).

Convolutions use the trapezoid rule on the grid. The region left of the grid
is closed with the plateau value; the region right of it with an extension
of the grid carrying the limiting value plus a short series in e^{-theta}
fitted to the last two units of the grid, and an analytic tail beyond it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .closedform import ModelKind, ModelSpec

RIGHT_EXTENSION = 20.0
FIT_WIDTH = 0.5
TAIL_TERMS = 5
EXP_CLAMP = 700.0


class GridMismatchError(ValueError):
    """Kernel and function live on different grids."""


class BranchJumpError(RuntimeError):
    """The tracked logarithm jumps between adjacent grid points."""


class SolverError(RuntimeError):
    """Iteration produced non-finite values."""


@dataclass(frozen=True)
class ThetaGrid:
    theta_min: float
    theta_max: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("grid step must be positive")
        if not self.theta_max > self.theta_min:
            raise ValueError("theta_max must exceed theta_min")
        if self.count < 64:
            raise ValueError(f"grid has {self.count} points; at least 64 are required")

    @property
    def count(self) -> int:
        return int(round((self.theta_max - self.theta_min) / self.step)) + 1

    @property
    def points(self) -> np.ndarray:
        return np.round(self.theta_min + self.step * np.arange(self.count), 12)

    def window(self, lo: float, hi: float) -> np.ndarray:
        """Boolean mask of grid points inside [lo, hi]."""
        p = self.points
        return (p >= lo - 1e-9) & (p <= hi + 1e-9)


DEFAULT_GRID = dict(theta_min=-30.0, theta_max=5.0, step=0.025)


@dataclass
class GridFunction:
    """Samples on a grid plus the theta -> -inf plateau and theta -> +inf limit."""

    grid: ThetaGrid
    values: np.ndarray
    plateau: complex
    limit: complex = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.count,):
            raise GridMismatchError("values do not match the grid size")

    def sup(self, mask=None) -> float:
        v = self.values if mask is None else self.values[mask]
        return float(np.max(np.abs(v)))


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    damping: float
    final_residual: float
    converged: bool
    profile: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "damping": self.damping,
            "residual": self.final_residual,
            "converged": self.converged,
        }


# ---------------------------------------------------------------- kernels

class Kernel:
    """sin(a)/(cosh s + cos a) discretized on a grid, as a convolution operator."""

    def __init__(self, name: str, a: float, grid: ThetaGrid):
        self.name = name
        self.a = a
        self.grid = grid
        self.integral = a / math.pi  # int K ds / 2pi
        h = grid.step
        n = grid.count
        n_ext = int(round(RIGHT_EXTENSION / h))
        self.n_ext = n_ext
        theta = grid.points
        ext = theta[-1] + h * np.arange(1, n_ext + 1)
        self.ext = ext
        allpts = np.concatenate([theta, ext])
        w = np.ones(allpts.size)
        w[0] = w[-1] = 0.5
        diff = theta[:, None] - allpts[None, :]
        self.matrix = self(diff) * (w * h / (2.0 * math.pi))[None, :]
        # Tails beyond the ends plus the h^2 Euler-Maclaurin end correction,
        # taking f flat at both ends.
        em = h * h / (12.0 * 2.0 * math.pi)
        self.left_tail = self.tail(theta - theta[0]) - em * self.deriv(theta - theta[0])
        self.right_tail = self.tail(ext[-1] - theta) + em * self.deriv(theta - ext[-1])

    def __call__(self, s):
        return math.sin(self.a) / (np.cosh(s) + math.cos(self.a))

    def deriv(self, s):
        return -math.sin(self.a) * np.sinh(s) / (np.cosh(s) + math.cos(self.a)) ** 2

    def tail(self, s0):
        """int_{s0}^inf K(s) ds / 2pi for s0 >= 0."""
        return (self.a - 2.0 * np.arctan(math.tan(0.5 * self.a) * np.tanh(0.5 * s0))) / (2.0 * math.pi)


def _extension(f: GridFunction, ext: np.ndarray):
    """Values of f on the right extension: limit plus sum_n c_n e^{-n theta}, n = 1..5.

    The sources e^{-A} decay faster than any exponential, so convolution
    outputs and their logarithms approach their limits through the integer
    powers of e^{-theta} carried by the kernel expansion. The c_n are fitted by
    least squares on the last FIT_WIDTH of the grid; coarse grids use fewer terms.
    """
    theta = f.grid.points
    n_fit = max(3, int(round(FIT_WIDTH / f.grid.step)) + 1)
    terms = min(TAIL_TERMS, n_fit - 2)
    d = f.values[-n_fit:] - f.limit
    mag = np.abs(d)
    if not np.all(np.isfinite(mag)) or np.any(mag < 1e-300):
        return np.full(ext.size, f.limit, dtype=complex)
    x = theta[-n_fit:] - theta[-1]
    powers = np.arange(1, terms + 1)
    coef = np.linalg.lstsq(np.exp(-np.outer(x, powers)), d, rcond=None)[0]
    return f.limit + np.exp(-np.outer(ext - theta[-1], powers)) @ coef


def convolve(kernel: Kernel, f: GridFunction) -> GridFunction:
    """(K * f)(theta) = int dtheta'/2pi K(theta - theta') f(theta')."""
    if f.grid != kernel.grid:
        raise GridMismatchError("kernel and function grids differ")
    full = np.concatenate([f.values, _extension(f, kernel.ext)])
    vals = kernel.matrix @ full + f.plateau * kernel.left_tail + f.limit * kernel.right_tail
    return GridFunction(f.grid, vals, kernel.integral * f.plateau, kernel.integral * f.limit)


@dataclass
class KernelSet:
    """All kernels of one model on one grid, keyed by (r, l) row labels."""

    model: ModelSpec
    grid: ThetaGrid
    rows: dict = field(init=False)

    def __post_init__(self):
        if self.model.kind == ModelKind.SU2K:
            self.rows = {"sech": Kernel("sech", 0.5 * math.pi, self.grid)}
        else:
            minus = Kernel("phi_minus", 2.0 * math.pi / 3.0, self.grid)
            plus = Kernel("phi_plus", math.pi / 3.0, self.grid)
            self.rows = {(1, "0"): minus, (2, "0bar"): minus, (1, "0bar"): plus, (2, "0"): plus}

    def __getitem__(self, key) -> Kernel:
        return self.rows[key]


# ---------------------------------------------------------------- helpers

def continuous_log(z: np.ndarray, ref_arg: float) -> np.ndarray:
    """log z with the imaginary part continued along the array from ref_arg."""
    z = np.asarray(z, dtype=complex)
    ang = np.unwrap(np.angle(z))
    if z.size > 1 and np.any(np.abs(np.diff(ang)) > 0.5 * math.pi):
        raise BranchJumpError("argument of the logarithm jumps by more than pi/2 between grid points")
    ang = ang + 2.0 * math.pi * round((ref_arg - ang[0]) / (2.0 * math.pi))
    return np.log(np.abs(z)) + 1j * ang


def _exp_neg(A):
    A = np.asarray(A)
    return np.where(A.real > EXP_CLAMP, 0.0, np.exp(-np.minimum(A.real, EXP_CLAMP) - 1j * A.imag))


def _su2k_constants(k):
    nu = 1.0 / (k + 2.0)
    cot = 1.0 / math.tan(math.pi * nu)
    return math.log(2.0 * math.cos(math.pi * nu)), 2.0 * cot, -cot


def _su3_constants():
    c = 3.0 / (2.0 * math.sqrt(2.0))
    return {
        "A1": -math.log(c) - 0.25j * math.pi,
        "A2": -math.log(c) + 0.25j * math.pi,
        "B0": -(3.0 + 1j) / 4.0,
        "B0bar": -(3.0 - 1j) / 4.0,
        "L0": math.log(c) + 0.75j * math.pi,
        "L0bar": math.log(c) - 0.75j * math.pi,
    }


# ---------------------------------------------------------------- update maps

def _su2k_map(ks, k, A, B):
    grid = ks.grid
    theta = grid.points
    log2c, y_inf, b_inf = _su2k_constants(k)
    sech = ks["sech"]
    L = GridFunction(grid, np.log1p(B.real ** 2), math.log1p(b_inf ** 2), 0.0)
    y = GridFunction(grid, _exp_neg(A).real, y_inf, 0.0)
    A_new = np.exp(theta) - log2c - convolve(sech, L).values.real
    B_new = -convolve(sech, y).values.real
    return A_new, B_new


def _su3_map(ks, A1, A2, B0, B0b):
    grid = ks.grid
    theta = grid.points
    c = _su3_constants()
    L0 = GridFunction(grid, continuous_log(1j + B0, c["L0"].imag), c["L0"], 0.5j * math.pi)
    L0b = GridFunction(grid, continuous_log(-1j + B0b, c["L0bar"].imag), c["L0bar"], -0.5j * math.pi)
    y1 = GridFunction(grid, _exp_neg(A1), np.exp(-c["A1"]), 0.0)
    y2 = GridFunction(grid, _exp_neg(A2), np.exp(-c["A2"]), 0.0)
    drive = np.exp(theta)
    A1n = drive - convolve(ks[1, "0"], L0).values - convolve(ks[1, "0bar"], L0b).values
    A2n = drive - convolve(ks[2, "0"], L0).values - convolve(ks[2, "0bar"], L0b).values
    B0n = -convolve(ks[1, "0"], y1).values - convolve(ks[2, "0"], y2).values
    B0bn = -convolve(ks[1, "0bar"], y1).values - convolve(ks[2, "0bar"], y2).values
    return A1n, A2n, B0n, B0bn


# ---------------------------------------------------------------- solvers

def _iterate(update, x, damping, tol, max_iter, names):
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    if tol < 1e-12:
        raise ValueError("tol must be at least 1e-12")
    res = math.inf
    profile = {}
    it = 0
    for it in range(1, max_iter + 1):
        new = update(*x)
        diffs = [np.max(np.abs(n - o)) for n, o in zip(new, x)]
        if not all(np.all(np.isfinite(n)) for n in new):
            raise SolverError(f"non-finite iterate at iteration {it}")
        profile = dict(zip(names, map(float, diffs)))
        res = max(diffs)
        x = tuple(o + damping * (n - o) for n, o in zip(new, x))
        if res < tol:
            return x, SolveReport(it, damping, float(res), True, profile)
    return x, SolveReport(it, damping, float(res), False, profile)


def solve_su2k(k: float, grid: ThetaGrid, damping: float = 0.5, tol: float = 1e-11,
               max_iter: int = 5000):
    """Fixed point of the SU(2)_k TBA; returns (A, B, report)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    ks = KernelSet(ModelSpec.su2k(k), grid)
    log2c, y_inf, b_inf = _su2k_constants(k)
    n = grid.count
    x0 = (np.full(n, -math.log(y_inf)), np.full(n, b_inf))
    (A, B), report = _iterate(lambda a, b: _su2k_map(ks, k, a, b), x0, damping, tol, max_iter, ("A", "B"))
    return (GridFunction(grid, A, -math.log(y_inf), math.inf),
            GridFunction(grid, B, b_inf, 0.0), report)


def solve_su3(grid: ThetaGrid, damping: float = 0.5, tol: float = 1e-11, max_iter: int = 5000):
    """Fixed point of the SU(3)_1 TBA; returns (A1, A2, B0, B0bar, report)."""
    ks = KernelSet(ModelSpec.su3(), grid)
    c = _su3_constants()
    n = grid.count
    x0 = tuple(np.full(n, c[key], dtype=complex) for key in ("A1", "A2", "B0", "B0bar"))
    x, report = _iterate(lambda *a: _su3_map(ks, *a), x0, damping, tol, max_iter,
                         ("A1", "A2", "B0", "B0bar"))
    A1, A2, B0, B0b = x
    return (GridFunction(grid, A1, c["A1"], math.inf), GridFunction(grid, A2, c["A2"], math.inf),
            GridFunction(grid, B0, c["B0"], 0.0), GridFunction(grid, B0b, c["B0bar"], 0.0), report)


# ---------------------------------------------------------------- residual

def residual(model: ModelSpec, candidate: dict, kernels: KernelSet | None = None) -> dict:
    """Left minus right side of each TBA equation on the candidate's grid.

    SU(2)_k candidates provide "A" and "B"; SU(3) candidates "A1", "A2",
    "B0", "B0bar". Each entry is an array or GridFunction on one grid
    (``candidate["grid"]`` is required for plain arrays).
    """
    grid = candidate.get("grid")
    vals = {}
    for key, v in candidate.items():
        if key == "grid":
            continue
        if isinstance(v, GridFunction):
            grid = v.grid
            v = v.values
        vals[key] = np.asarray(v, dtype=complex)
    if grid is None:
        raise ValueError("candidate needs a grid")
    ks = kernels if kernels is not None else KernelSet(model, grid)
    if ks.grid != grid:
        raise GridMismatchError("kernel set and candidate grids differ")
    if model.kind == ModelKind.SU2K:
        A, B = vals["A"].real, vals["B"].real
        A_new, B_new = _su2k_map(ks, model.k, A, B)
        out = {"A": A - A_new, "B": B - B_new}
    else:
        new = _su3_map(ks, vals["A1"], vals["A2"], vals["B0"], vals["B0bar"])
        out = {key: vals[key] - n for key, n in zip(("A1", "A2", "B0", "B0bar"), new)}
    return {key: GridFunction(grid, r, 0.0, 0.0) for key, r in out.items()}


def closed_form_candidate(model: ModelSpec, grid: ThetaGrid, cf=None) -> dict:
    """Closed-form A, B (or A_r, B_l) sampled on the grid, ready for ``residual``."""
    from . import closedform as cfm

    cf = cf if cf is not None else cfm.ClosedFormSolution.build(model)
    theta = grid.points
    if model.kind == ModelKind.SU2K:
        y = cfm.su2k_expA(cf, theta).real
        B = cfm.su2k_B(cf, theta).real
        log2c = _su2k_constants(model.k)[0]
        # Where e^{-A} underflows A follows its driving term.
        A = np.where(y > 1e-300, -np.log(np.maximum(y, 1e-300)), np.exp(theta) - log2c)
        return {"grid": grid, "A": A, "B": B, "expA": y}
    vals = cfm.su3_all(cf, theta)
    c = _su3_constants()
    out = {"grid": grid, "B0": vals["B0"], "B0bar": vals["B0bar"],
           "expA1": vals["expA1"], "expA2": vals["expA2"]}
    for r in (1, 2):
        y = vals[f"expA{r}"]
        out[f"A{r}"] = -continuous_log(y, -c[f"A{r}"].imag)
    return out

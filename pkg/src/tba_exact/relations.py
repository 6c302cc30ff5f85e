"""Numerical checks of the functional identities behind the exact solutions.

Each check evaluates an identity at a deterministic sample set and reports
the largest absolute residual. Sample sets come from numpy's default_rng
seeded by the caller, so reports are reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import closedform as cfm
from .closedform import ClosedFormSolution, ModelSpec, OMEGA, StripError
from .specfun import aik_pair, su3_phi_eval

AIRY_NORM = math.sqrt(2.0 * math.pi) * np.exp(-0.25j * math.pi)  # sqrt(2 pi / i)
Q3 = np.exp(2j * math.pi / 3.0)


@dataclass
class IdentityCheck:
    name: str
    sample_points: list
    max_abs_residual: float
    tolerance: float
    seed: int | None = None
    passed: bool = field(init=False)

    def __post_init__(self):
        self.max_abs_residual = float(self.max_abs_residual)
        self.passed = bool(self.max_abs_residual < self.tolerance)

    @property
    def n_points(self) -> int:
        return len(self.sample_points)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "tolerance": self.tolerance,
            "max_abs_residual": self.max_abs_residual,
            "passed": self.passed,
            "n_points": self.n_points,
            "seed": self.seed,
        }


def _check(name, points, residuals, tol, seed):
    r = np.abs(np.asarray(residuals))
    worst = float(np.max(r)) if r.size else 0.0
    if not np.isfinite(worst):
        worst = math.inf
    return IdentityCheck(name, [complex(p) for p in np.ravel(points)], worst, tol, seed)


def disc_samples(n: int, radius: float, seed: int) -> np.ndarray:
    """n points uniformly distributed in the disc |z| <= radius."""
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    return r * np.exp(1j * rng.uniform(-math.pi, math.pi, n))


def real_samples(n: int, lo: float, hi: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.sort(rng.uniform(lo, hi, n))


def _ai(z):
    f, fp, *_ = aik_pair(1, np.atleast_1d(np.asarray(z, dtype=complex)))
    return f, fp


# ---------------------------------------------------------------- Airy / SU(2)

def airy_phi(x, E):
    """Decaying solution sqrt(2pi/i) Ai(x - E) of phi'' = (x - E) phi."""
    return AIRY_NORM * _ai(np.asarray(x) - np.asarray(E))[0]


def airy_three_term(E_samples, x=0.0, tol: float = 1e-10, seed=None) -> IdentityCheck:
    """phi(x,E) + q phi(q x, q E) + q^-1 phi(x/q, E/q) = 0, q = e^{2pi i/3}."""
    E = np.atleast_1d(np.asarray(E_samples, dtype=complex))
    res = airy_phi(x, E) + Q3 * airy_phi(Q3 * x, Q3 * E) + airy_phi(x / Q3, E / Q3) / Q3
    return _check("airy_three_term", E, res, tol, seed)


def airy_dvf_t1(E_samples, tol: float = 1e-10, seed=None) -> IdentityCheck:
    """Dressed vacuum form T_1 = e^{-i pi/3} Ai(qE)/Ai(E) + e^{i pi/3} Ai(E/q)/Ai(E) equals 1."""
    E = np.atleast_1d(np.asarray(E_samples, dtype=complex))
    a0 = _ai(E)[0]
    t1 = (np.exp(-1j * math.pi / 3) * _ai(Q3 * E)[0] + np.exp(1j * math.pi / 3) * _ai(E / Q3)[0]) / a0
    return _check("airy_dvf_t1", E, t1 - 1.0, tol, seed)


def q_functions(k: float, E):
    """(Q^-, Q^+) = sqrt(2pi/i) (Ai^(k)(-E), Ai^(k)'(-E))."""
    f, fp, *_ = aik_pair(k, -np.atleast_1d(np.asarray(E, dtype=complex)))
    return AIRY_NORM * f, AIRY_NORM * fp


def quantum_wronskian_h0(E_samples, k: float = 1, tol: float = 1e-9, seed=None) -> IdentityCheck:
    """e^{-i pi nu} Q^+(E W) Q^-(E/W) - e^{i pi nu} Q^-(E W) Q^+(E/W) = 1, W = e^{-i pi nu}."""
    E = np.atleast_1d(np.asarray(E_samples, dtype=complex))
    nu = 1.0 / (k + 2.0)
    om = np.exp(-1j * math.pi * nu)
    qm_a, qp_a = q_functions(k, E * om)
    qm_b, qp_b = q_functions(k, E / om)
    t1 = np.exp(-1j * math.pi * nu) * qp_a * qm_b
    t2 = np.exp(1j * math.pi * nu) * qm_a * qp_b
    # Off the decay sector both products grow like exp(2|zeta|) and cancel;
    # scaling by their size keeps the residual a measure of identity failure.
    scale = np.maximum(1.0, np.maximum(np.abs(t1), np.abs(t2)))
    res = (t1 - t2 - 1.0) / scale
    return _check(f"quantum_wronskian_h0[k={k:g}]", E, res, tol, seed)


def ysystem_first_order_su2k(k: float, theta_samples, tol: float = 1e-7, seed=None,
                             cf: ClosedFormSolution | None = None) -> IdentityCheck:
    """y1(+)y1(-) = t^2 (y_t^2 + 1) and y_t(+) + y_t(-) = y1, shifts +-i pi/2."""
    cf = cf or ClosedFormSolution.build(ModelSpec.su2k(k))
    th = np.atleast_1d(np.asarray(theta_samples, dtype=float))
    if np.any(~np.isfinite(th)):
        raise StripError("theta samples must be finite real numbers")
    s = 0.5j * math.pi
    y1 = cfm.su2k_expA(cf, th)
    yt = -cfm.su2k_B(cf, th)
    y1p, y1m = cfm.su2k_expA(cf, th + s), cfm.su2k_expA(cf, th - s)
    ytp, ytm = -cfm.su2k_B(cf, th + s), -cfm.su2k_B(cf, th - s)
    t = cfm.t0_top(k)
    r1 = y1p * y1m - t * t * (yt * yt + 1.0)
    r2 = ytp + ytm - y1
    return _check(f"ysystem_first_order_su2k[k={k:g}]", th, np.maximum(np.abs(r1), np.abs(r2)), tol, seed)


# ---------------------------------------------------------------- SU(3)

def _su3_shifted(cf, th):
    s = 1j * math.pi / 3.0
    return cfm.su3_all(cf, th), cfm.su3_all(cf, th + s), cfm.su3_all(cf, th - s)


def _y12(v, a):
    return v["B0"] + 1j if a == 1 else v["B0bar"] - 1j


def ysystem_first_order_su3(theta_samples, a: int = 1, tol: float = 1e-6, seed=None,
                            cf: ClosedFormSolution | None = None) -> IdentityCheck:
    """y11(+)y11(-) = y11bar y12 and y12(+) + y12(-) + y11 - y12bar = +-3i, shifts +-i pi/3."""
    if a not in (1, 2):
        raise ValueError("a must be 1 or 2")
    cf = cf or ClosedFormSolution.build(ModelSpec.su3())
    th = np.atleast_1d(np.asarray(theta_samples, dtype=float))
    v, vp, vm = _su3_shifted(cf, th)
    b = 3 - a
    r1 = vp[f"expA{a}"] * vm[f"expA{a}"] - v[f"expA{b}"] * _y12(v, a)
    const = 3j if a == 1 else -3j
    r2 = _y12(vp, a) + _y12(vm, a) + v[f"expA{a}"] - _y12(v, b) - const
    return _check(f"ysystem_first_order_su3[a={a}]", th, np.maximum(np.abs(r1), np.abs(r2)), tol, seed)


def _d(cf, i, x):
    """d_i(x) = Q^[i] built from phi: phi(-x), phi'(-x), phi''(-x)."""
    return su3_phi_eval(cf.phi, -np.asarray(x), i).value


def y12_from_products(cf: ClosedFormSolution, theta):
    """(y^(1)_{1,2}, y^(2)_{1,2}) as triple products of the d_i."""
    E = np.atleast_1d(cfm.energy_of_theta(cf.map, np.asarray(theta, dtype=float)))
    w = OMEGA
    y1 = -3.0 * (_d(cf, 0, -E * w) * _d(cf, 1, -E * w ** 5)
                 + 1j * _d(cf, 0, -E * w ** 5) * _d(cf, 1, -E * w)) * _d(cf, 2, E * w ** 5)
    y2 = 3.0 * (_d(cf, 0, E * w ** 7) * _d(cf, 1, E * w ** 3)
                - 1j * _d(cf, 0, E * w ** 3) * _d(cf, 1, E * w ** 7)) * _d(cf, 2, -E * w ** 3)
    return y1, y2


def su3_cancellation_constants(theta_samples, tol: float = 1e-6, tol_definitional: float = 1e-8,
                        seed=None, cf: ClosedFormSolution | None = None):
    """SU(3) cancellation identities; returns a list of IdentityCheck.

    t^(2)_{1,1} = X2 + y^(2)_{1,2} - i and t^(1)_{1,1} = X1 + y^(1)_{1,2} + i, where
    X_a are the triple-product forms of the extra SU(3) relations and y^(a)_{1,2}
    is the Y-system ratio of the closed forms. Then t^(2)_{1,1} + y^(2)_{1,2} = -i
    and t^(1)_{1,1} + y^(1)_{1,2} = +i are checked, together with the agreement of
    the triple products with B0 + i and B0bar - i and with the ratio form.
    """
    cf = cf or ClosedFormSolution.build(ModelSpec.su3())
    th = np.atleast_1d(np.asarray(theta_samples, dtype=float))
    v, vp, vm = _su3_shifted(cf, th)
    ratio1 = vp["expA1"] * vm["expA1"] / v["expA2"]
    ratio2 = vp["expA2"] * vm["expA2"] / v["expA1"]
    p1, p2 = y12_from_products(cf, th)
    X1, X2 = -2.0 * p1, -2.0 * p2
    t1 = X1 + ratio1 + 1j
    t2 = X2 + ratio2 - 1j
    checks = [
        _check("su3_cancellation_constant[a=2]", th, t2 + ratio2 + 1j, tol, seed),
        _check("su3_cancellation_constant[a=1]", th, t1 + ratio1 - 1j, tol, seed),
        _check("su3_products_vs_B", th,
               np.maximum(np.abs(p1 - (v["B0"] + 1j)), np.abs(p2 - (v["B0bar"] - 1j))), tol_definitional, seed),
        _check("su3_ratio_form", th, np.maximum(np.abs(p1 - ratio1), np.abs(p2 - ratio2)), tol, seed),
    ]
    # The y_{2,m} sums divided by y_{1,2} of the conjugate index reduce to +-3i.
    E = np.atleast_1d(cfm.energy_of_theta(cf.map, th))
    w = OMEGA
    num1 = 9.0 * (_d(cf, 0, E * w ** 3) * _d(cf, 1, E * w ** 7)
                  + 1j * _d(cf, 0, E * w ** 7) * _d(cf, 1, E * w ** 3)) * _d(cf, 2, -E * w ** 3)
    num2 = 9.0 * (1j * _d(cf, 0, -E * w) * _d(cf, 1, -E * w ** 5)
                  - _d(cf, 0, -E * w ** 5) * _d(cf, 1, -E * w)) * _d(cf, 2, E * w ** 5)
    checks.append(_check("su3_cancellation_simplification", th,
                         np.maximum(np.abs(num1 / p2 - 3j), np.abs(num2 / p1 + 3j)), tol, seed))
    return checks


# ---------------------------------------------------------------- squared Wronskian

def _phi_j(j, x, E):
    """phi_j = q^{j/2} phi(q^-j x, Omega^{2j} E) and its first two x-derivatives."""
    z = Q3 ** (-j) * (np.asarray(x) - np.asarray(E))
    f, fp = _ai(z)
    s = np.exp(1j * math.pi * j / 3.0) * AIRY_NORM
    v0 = s * f
    return v0, s * Q3 ** (-j) * fp, (np.asarray(x) - np.asarray(E)) * v0


def wronskian3(f, g, h):
    """3x3 Wronskian from (value, first, second derivative) triples by cofactor expansion."""
    return (f[0] * (g[1] * h[2] - g[2] * h[1]) - g[0] * (f[1] * h[2] - f[2] * h[1])
            + h[0] * (f[1] * g[2] - f[2] * g[1]))


def _products(a, b):
    return (a[0] * b[0], a[1] * b[0] + a[0] * b[1], a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2])


def squared_wronskian(x_samples, E_samples=None, j: int = 0, tol: float = 1e-9, seed=None):
    """W[phi_j^2, phi_j phi_{j+1}, phi_{j+1}^2] = 2 W[phi_j, phi_{j+1}]^3 plus companions.

    Returns checks for the determinant identity, constancy of W[phi_j, phi_{j+1}],
    and phi_1^2 = phi_0^2 + phi_2^2 + 2 phi_0 phi_2.
    """
    x = np.atleast_1d(np.asarray(x_samples, dtype=complex))
    E = np.zeros_like(x) if E_samples is None else np.atleast_1d(np.asarray(E_samples, dtype=complex))
    a, b = _phi_j(j, x, E), _phi_j(j + 1, x, E)
    W = a[0] * b[1] - a[1] * b[0]
    W3 = wronskian3(_products(a, a), _products(a, b), _products(b, b))
    p0, p1, p2 = _phi_j(0, x, E)[0], _phi_j(1, x, E)[0], _phi_j(2, x, E)[0]
    return [
        _check("squared_wronskian", x, W3 - 2.0 * W ** 3, tol, seed),
        _check("wronskian_constancy", x, W - W[0], tol, seed),
        _check("squared_three_term", x, p1 ** 2 - (p0 ** 2 + p2 ** 2 + 2.0 * p0 * p2), tol, seed),
    ]


# ---------------------------------------------------------------- suite

SUITES = ("all", "airy", "wronskian", "su2k", "su3", "cancellation", "squared")


def run_suite(suite: str = "all", seed: int = 42) -> list[IdentityCheck]:
    """Run a named group of checks on default sample sets derived from seed."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    want = (lambda name: suite in ("all", name))
    out: list[IdentityCheck] = []
    if want("airy"):
        E = np.concatenate([[0.0], disc_samples(20, 3.0, seed)])
        out.append(airy_three_term(E, seed=seed))
        out.append(airy_dvf_t1(disc_samples(20, 3.0, seed + 1), seed=seed))
    if want("wronskian"):
        for k in (1, 2, 3):
            E = np.concatenate([[0.0], disc_samples(20, 5.0, seed + k)])
            out.append(quantum_wronskian_h0(E, k=k, seed=seed))
    if want("su2k"):
        th = np.linspace(-4.0, 2.0, 30)
        for k in (1, 2, 3, 4, 2.5):
            out.append(ysystem_first_order_su2k(k, th, seed=seed))
    if want("su3") or want("cancellation"):
        cf = ClosedFormSolution.build(ModelSpec.su3())
        if want("su3"):
            th = np.linspace(-4.0, 1.0, 20)
            out.append(ysystem_first_order_su3(th, a=1, seed=seed, cf=cf))
            out.append(ysystem_first_order_su3(th, a=2, seed=seed, cf=cf))
        if want("cancellation"):
            out.extend(su3_cancellation_constants(real_samples(20, -4.0, 1.5, seed), seed=seed, cf=cf))
    if want("squared"):
        x = np.concatenate([[0.0], disc_samples(10, 2.0, seed)])
        E = np.concatenate([[0.0], disc_samples(10, 2.0, seed + 7)])
        out.extend(squared_wronskian(x, E, seed=seed))
    return out

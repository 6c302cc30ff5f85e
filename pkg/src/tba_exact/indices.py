"""CFIV index and the integrals I~_m of the exact SU(2)_k solution.

Both are computed twice: by adaptive quadrature of the closed form and by
closed Gamma-function formulas.

    Q_CFIV = 2 int dtheta/2pi e^theta e^{-A} = (2/pi) int_0^inf dE E^{k/2} e^{-A(E)}
    I~_m   = int dtheta/2pi e^{m theta} e^{-A}

e^{-A} = -8 pi cos(pi nu) Ai^(k)(E) Ai^(k)'(E) is a product of two K
functions, so every such integral reduces to

    G_n(p, q, l) = int_0^inf E^{2n+l+1} K_{p/(n+1)}(E^{n+1}/(n+1)) K_{q/(n+1)}(E^{n+1}/(n+1)) dE.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .closedform import EnergyMap, ModelSpec
from .specfun import PoleError, aik_pair, gamma_real


class Method(str, enum.Enum):
    QUADRATURE = "quadrature"
    GAMMA_FORMULA = "gamma_formula"


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""


@dataclass(frozen=True)
class IndexResult:
    k: float
    numeric: float
    exact: float
    m: int | None = None
    method: str = Method.QUADRATURE.value

    @property
    def abs_diff(self) -> float:
        return abs(self.numeric - self.exact)

    def to_json(self) -> dict:
        return {"k": self.k, "m": self.m, "numeric": self.numeric, "exact": self.exact,
                "abs_diff": self.abs_diff}


EPSABS = 1e-12
EPSREL = 1e-9


def _gamma_factor(label: str, x: float) -> float:
    if x <= 0 and float(x).is_integer():
        raise PoleError(f"Gamma factor {label} sits on a pole at argument {x:g}")
    try:
        return gamma_real(x)
    except PoleError as exc:
        raise PoleError(f"Gamma factor {label}: {exc}") from exc


def gn(n: float, p: float, q: float, l: float) -> float:
    """Closed form of G_n(p, q, l)."""
    m = n + 1.0
    pref = (2.0 * m) ** (1.0 + l / m) / (4.0 * _gamma_factor("Gamma(2+l/(n+1))", 2.0 + l / m))
    out = pref
    for sp, sq, label in ((1, 1, "p+q"), (-1, 1, "-p+q"), (1, -1, "p-q"), (-1, -1, "-p-q")):
        arg = 1.0 + (sp * p + sq * q + l) / (2.0 * m)
        out *= _gamma_factor(f"Gamma(1+({label}+l)/(2(n+1)))", arg)
    return out


def _parse_method(method) -> Method:
    try:
        return Method(method)
    except ValueError:
        raise ValueError(f"method must be one of {[m.value for m in Method]}") from None


def _expA_of_E(k: float, E: float) -> float:
    f, fp, *_ = aik_pair(k, np.array([complex(E)]))
    return float((-8.0 * math.pi * math.cos(math.pi / (k + 2.0)) * f[0] * fp[0]).real)


def _quad(func, a, b, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(func, a, b, epsabs=EPSABS, epsrel=EPSREL, limit=400, points=points)
        except IntegrationWarning as exc:
            raise QuadratureError(str(exc)) from exc
    return val


def _e_cutoff(k: float) -> float:
    """E beyond which the integrand is below e^-60 (decay exp(-(4/(k+2)) E^{(k+2)/2}))."""
    return (60.0 * (k + 2.0) / 4.0) ** (2.0 / (k + 2.0))


def cfiv(k: float, method="quadrature") -> IndexResult:
    """Q_CFIV for SU(2)_k; exact value k/(k+2)."""
    method = _parse_method(method)
    if not k >= 0:
        raise ValueError("k must be >= 0")
    exact = k / (k + 2.0)
    if k == 0:
        return IndexResult(0.0, 0.0, 0.0, None, method.value)
    if method == Method.GAMMA_FORMULA:
        n = 0.5 * k
        s = gn(n, 0.5, 0.5, -0.5 * k - 1.0) - gn(n, 0.5, -0.5 * (k + 1.0), 0.0) - gn(n, 0.5, 0.5 * (k + 3.0), 0.0)
        numeric = -8.0 * math.cos(math.pi / (k + 2.0)) / (math.pi ** 2 * (k + 2.0)) * s
    else:
        top = _e_cutoff(k)
        numeric = 2.0 / math.pi * _quad(lambda E: E ** (0.5 * k) * _expA_of_E(k, E), 0.0, top,
                                        points=[1.0, 0.5 * top])
    return IndexResult(float(k), float(numeric), exact, None, method.value)


def itilde_exact(m: int, k: float) -> float:
    nu = 1.0 / (k + 2.0)
    g = _gamma_factor
    return (2.0 ** (2 * (m - 1)) / math.pi * g("Gamma(m/2)", 0.5 * m) ** 2 / g("Gamma(m)", m)
            * g("Gamma(m/2+nu)", 0.5 * m + nu) * g("Gamma(m/2+1-nu)", 0.5 * m + 1.0 - nu)
            / (g("Gamma(1/2+nu)", 0.5 + nu) * g("Gamma(1/2-nu)", 0.5 - nu)))


def itilde(m: int, k: float, method="quadrature") -> IndexResult:
    """I~_m = int dtheta/2pi e^{m theta} e^{-A(theta)} with the Gamma-formula value as exact."""
    method = _parse_method(method)
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    if not k > 0:
        raise ValueError("itilde requires k > 0")
    m = int(m)
    exact = itilde_exact(m, k)
    if method == Method.GAMMA_FORMULA:
        return IndexResult(float(k), exact, exact, m, method.value)
    emap = EnergyMap.for_model(ModelSpec.su2k(k))
    c = emap.exponent
    plateau = 2.0 / math.tan(math.pi / (k + 2.0))
    lo = math.log(1e-16 / plateau) / m
    hi = math.log(60.0 + 5.0 * m)
    while math.exp(hi) - m * hi < 60.0:
        hi += 0.5

    def integrand(th):
        return math.exp(m * th) * _expA_of_E(k, emap.E0 * math.exp(c * th))

    numeric = _quad(integrand, lo, hi, points=[0.0]) / (2.0 * math.pi)
    return IndexResult(float(k), float(numeric), exact, m, method.value)

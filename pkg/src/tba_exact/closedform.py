"""Exact solutions of the massless SU(2)_k and SU(3)_1 TBA systems.

SU(2)_k, with nu = 1/(k+2), Omega = e^{-i pi nu} and f = Ai^(k):

    e^{-A(theta)} = -8 pi cos(pi nu) f(E) f'(E)
    B(theta)      = 2 pi d/dE [f(E Omega) f(E / Omega)]
    E = E0 exp(2 theta / (k+2)),  E0 = ((k+2)/4)^{2/(k+2)}

SU(3)_1, with omega = e^{i pi/8}, w_E[f, g] = f g' - g f' (E-derivatives)
and phi the decaying solution of phi''' + u phi = 0:

    e^{-A1} = 3 omega^3  w_E[phi(E/omega), phi(E omega^3)] d2/dE2 phi(E/omega)
    e^{-A2} = 3 omega^-3 w_E[phi(E/omega^3), phi(E omega)] d2/dE2 phi(E omega)
    B0bar   = 3 omega^-1 w_E[phi(E/omega), phi(E/omega^5)] d2/dE2 phi(E omega^3) + i
    B0      = -3 omega   w_E[phi(E omega), phi(E omega^5)] d2/dE2 phi(E/omega^3) - i
    E = E0 exp(3 theta / 4),  E0 = (4/(3 sqrt 3))^{3/4}

All E-derivatives are analytic (Bessel recursion or differentiated series).
theta = -inf is accepted and maps to E = 0, where the plateau values hold exactly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import BranchError, Su3Phi, aik_pair, su3_phi_build, su3_phi_eval


class ModelKind(str, enum.Enum):
    SU2K = "SU2k"
    SU3 = "SU3"


class StripError(ValueError):
    """Complex rapidity outside the validated analyticity strip."""


class DomainError(ValueError):
    """Argument outside the domain of an asymptotic formula."""


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    k: float | None = None

    def __post_init__(self):
        if self.kind == ModelKind.SU2K:
            if self.k is None or not math.isfinite(self.k) or self.k < 0:
                raise ValueError("SU(2)_k requires a finite k >= 0")
        elif self.k is not None:
            raise ValueError("SU(3) takes no k parameter")

    @classmethod
    def su2k(cls, k: float) -> "ModelSpec":
        return cls(ModelKind.SU2K, float(k))

    @classmethod
    def su3(cls) -> "ModelSpec":
        return cls(ModelKind.SU3)

    @property
    def strip_halfwidth(self) -> float:
        return math.pi / 2 if self.kind == ModelKind.SU2K else math.pi / 3


@dataclass(frozen=True)
class EnergyMap:
    model: ModelSpec
    E0: float

    @classmethod
    def for_model(cls, model: ModelSpec) -> "EnergyMap":
        if model.kind == ModelKind.SU2K:
            k = model.k
            return cls(model, ((k + 2.0) / 4.0) ** (2.0 / (k + 2.0)))
        return cls(model, (4.0 / (3.0 * math.sqrt(3.0))) ** 0.75)

    @property
    def exponent(self) -> float:
        if self.model.kind == ModelKind.SU2K:
            return 2.0 / (self.model.k + 2.0)
        return 0.75


def energy_of_theta(emap: EnergyMap, theta):
    """E0 exp(c theta); theta = -inf gives E = 0."""
    th = np.asarray(theta, dtype=complex)
    with np.errstate(invalid="ignore"):
        E = emap.E0 * np.exp(emap.exponent * th)
    E = np.where(np.isneginf(th.real), 0.0, E)
    return E if E.ndim else complex(E)


def theta_of_energy(emap: EnergyMap, E):
    """Inverse of energy_of_theta for real positive E."""
    E = np.asarray(E, dtype=float)
    if np.any(E <= 0):
        raise ValueError("theta_of_energy requires E > 0")
    th = np.log(E / emap.E0) / emap.exponent
    return th if th.ndim else float(th)


@dataclass(frozen=True)
class ClosedFormSolution:
    model: ModelSpec
    map: EnergyMap
    phi: Su3Phi | None = field(default=None, repr=False)

    @classmethod
    def build(cls, model: ModelSpec) -> "ClosedFormSolution":
        emap = EnergyMap.for_model(model)
        phi = su3_phi_build() if model.kind == ModelKind.SU3 else None
        return cls(model, emap, phi)


def _theta_array(cf: ClosedFormSolution, theta):
    th = np.asarray(theta, dtype=complex)
    limit = cf.model.strip_halfwidth + 0.1
    if np.any(np.abs(th.imag) > limit):
        raise StripError(f"|Im theta| must not exceed {limit:.4f} for {cf.model.kind.value}")
    return th


def _require(cf, kind):
    if cf.model.kind != kind:
        raise ValueError(f"operation requires a {kind.value} model")


def _out(x, scalar):
    return complex(x) if scalar else x


# ---------------------------------------------------------------- SU(2)_k

def _nu(k):
    return 1.0 / (k + 2.0)


def _aik_checked(k, E):
    if not float(k).is_integer() and np.any(np.abs(np.angle(E)) >= np.pi):
        raise BranchError("rotated energies cross the branch cut of Ai^(k) for non-integer k")
    f, fp, _, _, _ = aik_pair(k, E)
    return f, fp


def su2k_B(cf: ClosedFormSolution, theta):
    """B(theta) = 2 pi d/dE [Ai^(k)(E Omega) Ai^(k)(E / Omega)]."""
    _require(cf, ModelKind.SU2K)
    th = _theta_array(cf, theta)
    scalar = th.ndim == 0
    k = cf.model.k
    om = np.exp(-1j * np.pi * _nu(k))
    E = np.atleast_1d(energy_of_theta(cf.map, th))
    n = E.size
    f, fp = _aik_checked(k, np.concatenate([E * om, E / om]))
    B = 2.0 * np.pi * (om * fp[:n] * f[n:] + f[:n] * fp[n:] / om)
    return _out(B.reshape(th.shape) if not scalar else B[0], scalar)


def su2k_expA(cf: ClosedFormSolution, theta):
    """e^{-A(theta)} = -8 pi cos(pi nu) Ai^(k)(E) Ai^(k)'(E)."""
    _require(cf, ModelKind.SU2K)
    th = _theta_array(cf, theta)
    scalar = th.ndim == 0
    k = cf.model.k
    E = np.atleast_1d(energy_of_theta(cf.map, th))
    f, fp = _aik_checked(k, E)
    y = -8.0 * np.pi * np.cos(np.pi * _nu(k)) * f * fp
    return _out(y.reshape(th.shape) if not scalar else y[0], scalar)


def su2k_plateaus(k: float):
    """(e^{-A}, B) at theta = -inf: (2 cot(pi nu), -cot(pi nu))."""
    c = 1.0 / math.tan(math.pi * _nu(k))
    return 2.0 * c, -c


def su2k_largeE_asymptotics(cf: ClosedFormSolution, theta):
    """Leading large-E forms (A_asym, B_asym) of the SU(2)_k solution.

    A ~ (4/(k+2)) E^{(k+2)/2} - ln(2 cos(pi nu)) and B ~ -(k/4) E^{-(k+2)/2}.
    """
    _require(cf, ModelKind.SU2K)
    k = cf.model.k
    E = energy_of_theta(cf.map, float(theta)).real
    if E < 5.0:
        raise DomainError("large-E asymptotics require E(theta) >= 5")
    p = 0.5 * (k + 2.0)
    A = 4.0 / (k + 2.0) * E ** p - math.log(2.0 * math.cos(math.pi * _nu(k)))
    B = -0.25 * k * E ** (-p)
    return A, B


def t0_constant(k: float, j: int) -> float:
    """Constant T-system solution t_{0,j} = sin((j+1) pi/(k+2)) / sin(pi/(k+2)).

    j = 0 gives 1. For integer k the index runs up to k+1; for real k up to floor(k)+1.
    """
    if int(j) != j:
        raise ValueError("t0_constant index must be an integer")
    top = int(k) + 1 if float(k).is_integer() else math.floor(k) + 1
    if not 0 <= j <= top:
        raise IndexError(f"t0_constant index j={j} outside [0, {top}]")
    nu = _nu(k)
    return math.sin((j + 1) * math.pi * nu) / math.sin(math.pi * nu)


def t0_top(k: float) -> float:
    """t_{0,k-1} = 2 cos(pi/(k+2)), valid for real k."""
    return 2.0 * math.cos(math.pi * _nu(k))


# ---------------------------------------------------------------- SU(3)

OMEGA = np.exp(1j * np.pi / 8)


def _su3_phi_values(cf, E, powers):
    """phi, phi', phi'' at E omega^m for each m in powers; dict m -> (p0, p1, p2)."""
    pts = np.concatenate([E * OMEGA ** m for m in powers])
    vals = [su3_phi_eval(cf.phi, pts, d).value for d in range(3)]
    n = E.size
    return {m: tuple(v[i * n:(i + 1) * n] for v in vals) for i, m in enumerate(powers)}


def _wronskian(vals, a, b):
    """w_E[phi(E omega^a), phi(E omega^b)] with E-derivatives."""
    fa, dfa, _ = vals[a]
    fb, dfb, _ = vals[b]
    return fa * OMEGA ** b * dfb - fb * OMEGA ** a * dfa


def _d2(vals, a):
    """d^2/dE^2 phi(E omega^a)."""
    return OMEGA ** (2 * a) * vals[a][2]


def su3_all(cf: ClosedFormSolution, theta):
    """Dictionary with expA1, expA2, B0, B0bar at theta (arrays)."""
    _require(cf, ModelKind.SU3)
    th = _theta_array(cf, theta)
    E = np.atleast_1d(energy_of_theta(cf.map, th)).ravel()
    v = _su3_phi_values(cf, E, (-5, -3, -1, 1, 3, 5))
    w3 = OMEGA ** 3
    out = {
        "expA1": 3.0 * w3 * _wronskian(v, -1, 3) * _d2(v, -1),
        "expA2": 3.0 / w3 * _wronskian(v, -3, 1) * _d2(v, 1),
        "B0bar": 3.0 / OMEGA * _wronskian(v, -1, -5) * _d2(v, 3) + 1j,
        "B0": -3.0 * OMEGA * _wronskian(v, 1, 5) * _d2(v, -3) - 1j,
    }
    return {key: val.reshape(th.shape) for key, val in out.items()}


def su3_expA(cf: ClosedFormSolution, r: int, theta):
    """e^{-A_r(theta)} for r = 1, 2."""
    if r not in (1, 2):
        raise ValueError("r must be 1 or 2")
    _require(cf, ModelKind.SU3)
    th = _theta_array(cf, theta)
    scalar = th.ndim == 0
    vals = su3_all(cf, np.atleast_1d(th))[f"expA{r}"]
    return _out(vals[0] if scalar else vals.reshape(th.shape), scalar)


def su3_B(cf: ClosedFormSolution, which: str, theta):
    """B_0 (which = '0') or B_0bar (which = '0bar')."""
    key = {"0": "B0", "0bar": "B0bar"}.get(str(which))
    if key is None:
        raise ValueError("which must be '0' or '0bar'")
    _require(cf, ModelKind.SU3)
    th = _theta_array(cf, theta)
    scalar = th.ndim == 0
    vals = su3_all(cf, np.atleast_1d(th))[key]
    return _out(vals[0] if scalar else vals.reshape(th.shape), scalar)


def su3_plateaus():
    """theta = -inf values of e^{-A1}, e^{-A2}, B0, B0bar."""
    c = 3.0 / (2.0 * math.sqrt(2.0))
    return {
        "expA1": c * np.exp(0.25j * np.pi),
        "expA2": c * np.exp(-0.25j * np.pi),
        "B0": -(3.0 + 1j) / 4.0,
        "B0bar": -(3.0 - 1j) / 4.0,
    }

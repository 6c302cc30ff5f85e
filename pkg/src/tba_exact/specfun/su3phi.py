"""Decaying solution of phi''' + u phi = 0 (the SU(3)_1 ODE at E = 0).

phi is normalized by its large-u behaviour on the positive real axis,

    phi(u) ~ u^{-1/3} exp(-(3/4) u^{4/3}) / (sqrt(3) i),

and is represented near the origin as a combination of three 0F2 series in
the rotated variable x = e^{i pi/4} u,

    phi = a1 F(;3/4,1/2|x^4/64) + a2 x F(;3/4,5/4|x^4/64) + a3 x^2 F(;5/4,3/2|x^4/64).

The coefficients follow from the contour integral
phi(u) = -(2 pi)^{-1/2} int exp(z^4/4 - u z) dz taken from infinity at
arg -pi/4 to infinity at arg pi/4, which gives phi(0), phi'(0), phi''(0)
in terms of Gamma values. An independent oracle (inward ODE integration
plus least-squares collocation) is available as ``su3_phi_collocate``.

The Taylor series is summed in double-double arithmetic: on the decaying
rays it loses about exp(1.125 |u|^{4/3}) to cancellation, which double
precision cannot absorb beyond |u|^{4/3} ~ 15. For large |u| evaluation
switches to the asymptotic expansion (and, for |arg u| > 3pi/4, to the
connection relation phi(u) = -i phi(iu) + phi(-u) + i phi(-iu)).
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _dd
from ._common import EPS, Method, PrecisionWarning, as_complex_array, method_array, pack

ROTATION = np.exp(0.25j * np.pi)
NORM = 1.0 / (np.sqrt(3.0) * 1j)

# Imaginary parts of phi(0) = -i Gamma(1/4)/(2 sqrt(2 pi)), phi'(0) = i/sqrt(2),
# phi''(0) = -i Gamma(3/4)/sqrt(2 pi), as double-double pairs.
_ORIGIN_IM = (
    _dd.from_decimal("-0.723204542316038571267850724921564501699372031"),
    _dd.from_decimal("0.707106781186547524400844362104849039284835938"),
    _dd.from_decimal("-0.488870533723461898815767734112379617072492357"),
)
PHI0, PHI1, PHI2 = (1j * hi for hi, _ in _ORIGIN_IM)

# Region boundaries in units of |u|^{4/3}.
SERIES_ONLY_BELOW = 20.0
ASYMPTOTIC_ONLY_ABOVE = 42.0
_DIRECT_MAX_ANGLE = 0.75 * np.pi


class CollocationError(RuntimeError):
    """Least-squares fit of the series coefficients is badly conditioned."""


@dataclass(frozen=True)
class Su3Phi:
    """Coefficients of phi in the rotated 0F2 basis."""

    alpha: tuple[complex, complex, complex]
    residual: float
    rotation: complex = complex(ROTATION)
    # Optional double-double values (hi, lo) of phi(0), phi'(0), phi''(0).
    origin: tuple | None = None

    def to_json(self) -> str:
        doc = {"alpha": [[a.real, a.imag] for a in self.alpha], "residual": self.residual}
        if self.origin is not None:
            doc["origin"] = [[[p.real, p.imag] for p in pair] for pair in self.origin]
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Su3Phi":
        doc = json.loads(text)
        alpha = tuple(complex(re, im) for re, im in doc["alpha"])
        origin = None
        if "origin" in doc:
            origin = tuple(tuple(complex(re, im) for re, im in pair) for pair in doc["origin"])
        return cls(alpha=alpha, residual=float(doc["residual"]), origin=origin)

    def taylor_values(self):
        """phi(0), phi'(0), phi''(0) implied by alpha."""
        a1, a2, a3 = self.alpha
        return a1, a2 * self.rotation, 2.0 * a3 * self.rotation ** 2

    def origin_dd(self):
        if self.origin is not None:
            return self.origin
        return tuple((complex(v), 0j) for v in self.taylor_values())


def closed_form_alpha():
    """alpha from the exact values phi(0), phi'(0), phi''(0)."""
    return (complex(PHI0), complex(PHI1 / ROTATION), complex(PHI2 / (2.0 * ROTATION ** 2)))


def closed_form_origin():
    return tuple((1j * hi, 1j * lo) for hi, lo in _ORIGIN_IM)


# ---------------------------------------------------------------- series

_N_MAX = 400


@lru_cache(maxsize=16)
def _taylor_dd(origin):
    """Double-double Taylor coefficients of the solution with the given origin data.

    Returns (re_hi, re_lo, im_hi, im_lo, magnitude) arrays of length _N_MAX.
    """
    rh, rl, ih, il = (np.zeros(_N_MAX) for _ in range(4))
    for j, (hi, lo) in enumerate(origin):
        div = 2.0 if j == 2 else 1.0
        rh[j], rl[j] = _dd.dd_div_d(hi.real, lo.real, div)
        ih[j], il[j] = _dd.dd_div_d(hi.imag, lo.imag, div)
    for n in range(_N_MAX - 4):
        # (n+4)(n+3)(n+2) a_{n+4} = -a_n
        den = -float((n + 4) * (n + 3) * (n + 2))
        rh[n + 4], rl[n + 4] = _dd.dd_div_d(rh[n], rl[n], den)
        ih[n + 4], il[n + 4] = _dd.dd_div_d(ih[n], il[n], den)
    return rh, rl, ih, il, np.hypot(rh, ih)


def _series_group(coef, u, deriv):
    rh, rl, ih, il, mag = coef
    r = max(float(np.abs(u).max()), 1e-300)
    n_idx = np.arange(deriv, _N_MAX)
    ff = np.array([float(math.perm(int(n), deriv)) for n in n_idx])
    with np.errstate(divide="ignore"):
        logt = np.log(mag[deriv:] * ff) + (n_idx - deriv) * np.log(r)
    keep = np.nonzero(logt > np.max(logt) - 90.0)[0]
    top = min(deriv + int(keep.max()) + 4, _N_MAX - 1)
    zero = np.zeros(u.shape)
    acc = (zero, zero, zero, zero)
    absacc = zero
    au = np.abs(u)
    for n in range(top, deriv - 1, -1):
        f = float(math.perm(n, deriv))
        cr = _dd.dd_mul_d(rh[n], rl[n], f)
        ci = _dd.dd_mul_d(ih[n], il[n], f)
        acc = _dd.cdd_mul_c(acc, u)
        acc = _dd.cdd_add(acc, (cr[0], cr[1], ci[0], ci[1]))
        absacc = absacc * au + mag[n] * f
    val = (acc[0] + acc[1]) + 1j * (acc[2] + acc[3])
    err = EPS * np.abs(val) + 2.0 * EPS * EPS * absacc
    return val, err


def _series(phi: Su3Phi, u, deriv):
    """Derivative `deriv` (0..3) of phi from its Taylor series, with an error bound."""
    coef = _taylor_dd(phi.origin_dd())
    val = np.zeros_like(u)
    err = np.zeros(u.shape)
    # Group points by size so small |u| does not pay for long sums.
    bucket = np.floor(np.abs(u) ** (4.0 / 3.0) / 5.0)
    for b in np.unique(bucket):
        sel = bucket == b
        val[sel], err[sel] = _series_group(coef, u[sel], deriv)
    return val, err


# ---------------------------------------------------------------- asymptotic

def _asym_coeffs(n):
    """Coefficients c_k of phi ~ NORM e^S sum_k c_k u^{p_k}, p_k = -(1+4k)/3."""
    p = [-(1.0 + 4.0 * k) / 3.0 for k in range(n)]
    c = [1.0]
    for k in range(1, n):
        q = p[k - 1]
        acc = (-3.0 * q * (q - 1.0) - q + 2.0 / 9.0) * c[k - 1]
        if k >= 2:
            r = p[k - 2]
            acc += r * (r - 1.0) * (r - 2.0) * c[k - 2]
        c.append(acc / (4.0 * k))
    return np.array(p), np.array(c)


_ASYM_P, _ASYM_C = _asym_coeffs(160)
_SINGULANT = 0.75 * math.sqrt(3.0)


def _asym_direct(u, deriv):
    """Asymptotic phi^(deriv) for |arg u| <= 3pi/4, with an error bound."""
    logu = np.log(u)
    u13 = np.exp(logu / 3.0)
    U = u13 ** 4
    S = -0.75 * U
    S1 = -u13
    S2 = -(1.0 / 3.0) / (u13 * u13)
    # The coefficients grow like Gamma(k)/|A|^k with complex singulants
    # A = (3/4)(1 - e^{+-2 pi i/3}), |A| = 1.299, modulated by an oscillating
    # factor, so truncate at the optimal index rather than the first rise.
    absU = np.abs(U)
    k_opt = np.clip(np.floor(_SINGULANT * absU), 1, _ASYM_C.size - 8).astype(int)
    v = np.zeros_like(u)
    v1 = np.zeros_like(u)
    v2 = np.zeros_like(u)
    dropped = np.zeros(u.shape)
    for k, (p, c) in enumerate(zip(_ASYM_P, _ASYM_C)):
        if k > k_opt.max() + 6:
            break
        t = c * np.exp(p * logu)
        w = np.where(k < k_opt, t, 0)
        v = v + w
        v1 = v1 + w * p / u
        v2 = v2 + w * p * (p - 1.0) / (u * u)
        dropped = np.where((k >= k_opt) & (k <= k_opt + 6), np.maximum(dropped, np.abs(t)), dropped)
    lead = NORM * np.exp(S)
    if deriv == 0:
        core = v
    elif deriv == 1:
        core = S1 * v + v1
    else:
        core = (S1 * S1 + S2) * v + 2.0 * S1 * v1 + v2
    # The dropped term scales like the leading one times S'^deriv.
    scale = np.abs(S1) ** deriv
    # Recessive exponentials switched on past the Stokes lines.
    stokes = np.zeros(u.shape)
    past = np.abs(np.angle(u)) > 0.5 * np.pi
    for om in (np.exp(2j * np.pi / 3), np.exp(-2j * np.pi / 3)):
        expo = np.real(-0.75 * (om - 1.0) * U)
        stokes = np.maximum(stokes, np.where(past & (expo < 0), np.exp(np.minimum(expo, 0.0)), 0.0))
    err = np.abs(lead) * (scale * dropped + np.abs(core) * (stokes + EPS * (4.0 + np.abs(S))))
    return lead * core, err


def _asym(u, deriv):
    """Asymptotic evaluation anywhere, via the connection relation when needed."""
    val = np.zeros_like(u)
    err = np.zeros(u.shape)
    direct = np.abs(np.angle(u)) <= _DIRECT_MAX_ANGLE
    if np.any(direct):
        val[direct], err[direct] = _asym_direct(u[direct], deriv)
    far = ~direct
    if np.any(far):
        uf = u[far]
        # phi(u) = -i phi(iu) + phi(-u) + i phi(-iu), differentiated `deriv` times.
        for c, r in ((-1j, 1j), (1.0, -1.0), (1j, -1j)):
            fv, fe = _asym_direct(r * uf, deriv)
            val[far] += c * r ** deriv * fv
            err[far] += fe
    return val, err


# ---------------------------------------------------------------- public

def su3_phi_build(method: str = "closed_form") -> Su3Phi:
    """Construct phi.

    ``closed_form`` (default) uses the exact Gamma-function values at the
    origin. ``collocation`` fits the coefficients to an inward ODE
    integration seeded with the large-u asymptotics.
    """
    origin = None
    if method == "closed_form":
        alpha = closed_form_alpha()
        origin = closed_form_origin()
    elif method == "collocation":
        alpha, _ = su3_phi_collocate()
    else:
        raise ValueError(f"unknown construction method {method!r}")
    probe = Su3Phi(alpha=alpha, residual=0.0, origin=origin)
    return Su3Phi(alpha=alpha, residual=ode_residual(probe), origin=origin)


def ode_residual(phi: Su3Phi, points=None) -> float:
    """Max relative residual of phi''' + u phi at log-spaced points in [0.1, 4]."""
    if points is None:
        points = np.geomspace(0.1, 4.0, 20)
    u = np.asarray(points, dtype=complex)
    d3, _ = _series(phi, u, 3)
    d0, _ = _series(phi, u, 0)
    scale = np.abs(d3) + np.abs(u * d0)
    return float(np.max(np.abs(d3 + u * d0) / scale))


def su3_phi_eval(phi: Su3Phi, u, deriv: int = 0):
    """phi(u), phi'(u) or phi''(u) with an error estimate."""
    if deriv not in (0, 1, 2):
        raise ValueError("deriv must be 0, 1 or 2")
    uu, scalar, shape = as_complex_array(u)
    r43 = np.abs(uu) ** (4.0 / 3.0)
    val = np.zeros_like(uu)
    err = np.zeros(uu.shape)
    meth = method_array(uu.shape, Method.SERIES)

    with np.errstate(over="ignore", invalid="ignore"):
        val, err, meth = _eval_regions(phi, uu, deriv, r43, val, err, meth)
    bad = ~(np.isfinite(val) & np.isfinite(err))
    if np.any(bad):
        worst = float(np.max(np.abs(uu[bad])))
        raise OverflowError(f"su3_phi_eval: phi overflows double precision at |u| = {worst:.4g}")
    rel = err / np.maximum(np.abs(val), np.finfo(float).tiny)
    if np.any((meth == Method.ASYMPTOTIC.value) & (rel > 1e-7)):
        warnings.warn("su3_phi_eval: asymptotic evaluation near a Stokes sector boundary "
                      "has estimated relative error above 1e-7", PrecisionWarning, stacklevel=2)
    return pack(val, err, meth, scalar, shape)


def _eval_regions(phi, uu, deriv, r43, val, err, meth):
    ser_only = r43 < SERIES_ONLY_BELOW
    asym_only = r43 > ASYMPTOTIC_ONLY_ABOVE
    both = ~(ser_only | asym_only)
    if np.any(ser_only):
        val[ser_only], err[ser_only] = _series(phi, uu[ser_only], deriv)
        meth[ser_only & (r43 > 6.0)] = Method.COMPENSATED_SERIES.value
    if np.any(asym_only):
        val[asym_only], err[asym_only] = _asym(uu[asym_only], deriv)
        meth[asym_only] = Method.ASYMPTOTIC.value
    if np.any(both):
        sv, se = _series(phi, uu[both], deriv)
        av, ae = _asym(uu[both], deriv)
        pick = ae < se
        val[both] = np.where(pick, av, sv)
        err[both] = np.where(pick, ae, se)
        meth[both] = np.where(pick, Method.ASYMPTOTIC.value, Method.COMPENSATED_SERIES.value)
    return val, err, meth


def su3_phi_collocate(L: float = 12.0, n_points: int = 40, window=(0.0, 2.0)):
    """Oracle for alpha: integrate the ODE inward from u = L and fit the series basis.

    On the real axis phi = -i g with g real, so the real ODE g''' = -u g is
    integrated. Returns (alpha, relative rms fit residual).
    """
    from scipy.integrate import solve_ivp

    from .hyper import hyp0f2

    u0 = np.array([L], dtype=complex)
    seed = [(1j * _asym_direct(u0, d)[0][0]).real for d in range(3)]
    sol = solve_ivp(
        lambda x, y: [y[1], y[2], -x * y[0]],
        (L, window[0]),
        seed,
        method="DOP853",
        rtol=1e-13,
        atol=1e-40,
        dense_output=True,
    )
    if not sol.success:
        raise CollocationError(f"inward integration failed: {sol.message}")
    x = np.linspace(window[0], window[1], n_points)
    target = -1j * sol.sol(x)[0]
    xr = ROTATION * x
    arg = xr ** 4 / 64.0
    basis = np.column_stack([
        hyp0f2(0.75, 0.5, arg).value,
        xr * hyp0f2(0.75, 1.25, arg).value,
        xr ** 2 * hyp0f2(1.25, 1.5, arg).value,
    ])
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    fit = basis @ coef - target
    resid = float(np.sqrt(np.mean(np.abs(fit) ** 2)) / np.sqrt(np.mean(np.abs(target) ** 2)))
    if resid > 1e-8:
        raise CollocationError(f"collocation residual {resid:.3g} exceeds 1e-8")
    return tuple(complex(c) for c in coef), resid

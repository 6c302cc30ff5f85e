"""Modified Bessel K_nu, generalized Airy Ai^(k) and Airy Ai.

Evaluation regions, in terms of the Bessel argument zeta:

* |zeta| <= 2: power series (the I_{-nu} - I_nu combination for K, the
  equivalent entire series in E for Ai^(k)).
* 2 < |zeta| < 18 and |arg zeta| < 3pi/4: Steed/Temme continued fraction,
  which avoids the e^{2 Re zeta} cancellation of the I-series on the real axis.
* 2 < |zeta| < 18 and |arg zeta| >= 3pi/4: power series, compensated when
  |zeta| > 12. Here K grows, so cancellation is mild.
* |zeta| >= 18: asymptotic series truncated at its smallest term.

Ai^(k) is entire in E for integer k. Points with |arg zeta| > 5pi/4 are
rotated back into the asymptotic sector with the three-term rotation relation
2cos(pi nu) f(E) = e^{-i pi nu} f(omega E) + e^{i pi nu} f(E/omega),
omega = e^{2 pi i nu}, nu = 1/(k+2).
"""
from __future__ import annotations

import numpy as np

from ._common import (
    EPS,
    BranchError,
    Method,
    Neumaier,
    as_complex_array,
    method_array,
    pack,
    warn_precision,
)
from .gamma import gamma_real

CROSSOVER = 18.0
SERIES_RADIUS = 2.0
COMPENSATE_ABOVE = 12.0
_CF_MAX_ANGLE = 0.75 * np.pi
_ASYM_MAX_ANGLE = 1.25 * np.pi


# ---------------------------------------------------------------- series

def hyp0f1_series(b, w, compensated=False, max_terms=600):
    """0F1(;b;w) by direct summation.

    Returns (sum, err) where err bounds the rounding error, including the
    relative error accumulated by the recursively generated terms.
    """
    w = np.asarray(w, dtype=complex)
    term = np.ones_like(w)
    acc = Neumaier(w.shape) if compensated else None
    total = np.ones_like(w) if not compensated else None
    if compensated:
        acc.add(term)
    weighted = np.ones(w.shape)
    absw = np.abs(w)
    for m in range(1, max_terms):
        term = term * w / (m * (b + m - 1))
        if compensated:
            acc.add(term)
        else:
            total = total + term
        at = np.abs(term)
        weighted += at * np.sqrt(m + 1.0)
        if m * m > absw.max() and np.all(at <= 0.25 * EPS * weighted):
            break
    s = acc.total if compensated else total
    return s, 4 * EPS * weighted


# ---------------------------------------------------------------- K_nu pieces

def _k_iseries(nu, z, compensated):
    """K_nu(z) from the I_{-nu} - I_nu combination (principal z)."""
    w = 0.25 * z * z
    f1, e1 = hyp0f1_series(1.0 - nu, w, compensated)
    f2, e2 = hyp0f1_series(1.0 + nu, w, compensated)
    half = 0.5 * z
    c1 = half ** (-nu) / gamma_real(1.0 - nu)
    c2 = half ** nu / gamma_real(1.0 + nu)
    pref = np.pi / (2.0 * np.sin(nu * np.pi))
    val = pref * (c1 * f1 - c2 * f2)
    err = pref * (np.abs(c1) * e1 + np.abs(c2) * e2)
    return val, err


def _k_cf2(mu, z, max_iter=20000):
    """K_mu(z) and K_{mu+1}(z) by Steed's method on Temme's CF2, |mu| <= 1/2."""
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(z)
    q2 = np.ones_like(z)
    a1 = 0.25 - mu * mu
    q = np.full_like(z, a1)
    c = np.full_like(z, a1)
    a = -a1
    n_iter = 0
    s = 1.0 + q * delh
    done = np.zeros(z.shape, dtype=bool)
    for i in range(2, max_iter):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q = q + c * qnew
        # c grows factorially while the q_i shrink; only c*q_i matters.
        big = np.abs(c) > 1e100
        if np.any(big):
            c = np.where(big, c * 1e-100, c)
            q1 = np.where(big, q1 * 1e100, q1)
            q2 = np.where(big, q2 * 1e100, q2)
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + np.where(done, 0, dels)
        done |= np.abs(dels) < EPS * np.abs(s)
        n_iter = i
        if np.all(done):
            break
    else:
        raise RuntimeError("continued fraction for K failed to converge")
    h = a1 * h
    k_mu = np.sqrt(np.pi / (2.0 * z)) * np.exp(-z) / s
    k_mu1 = k_mu * (mu + z + 0.5 - h) / z
    return k_mu, k_mu1


def _k_pair_cf(nu, z):
    """K_nu(z) and K_{1-nu}(z) for 0 < nu < 1 via CF2."""
    if nu <= 0.5:
        k_nu, k_nu1 = _k_cf2(nu, z)
        # K_{nu-1} = K_{nu+1} - (2 nu / z) K_nu, and K_{1-nu} = K_{nu-1}.
        return k_nu, k_nu1 - (2.0 * nu / z) * k_nu
    k_m, k_m1 = _k_cf2(nu - 1.0, z)
    return k_m1, k_m


def asym_series(mu, z, max_terms=200):
    """S_mu(z) = sum_m a_m(mu) z^{-m}, truncated before its smallest term.

    Returns (S, first dropped term magnitude).
    """
    z = np.asarray(z, dtype=complex)
    total = np.ones_like(z)
    term = np.ones_like(z)
    dropped = np.zeros(z.shape)
    active = np.ones(z.shape, dtype=bool)
    prev = np.ones(z.shape)
    four_mu2 = 4.0 * mu * mu
    for m in range(1, max_terms):
        term = term * (four_mu2 - (2 * m - 1) ** 2) / (8.0 * m * z)
        at = np.abs(term)
        grow = active & (at > prev)
        dropped[grow] = at[grow]
        active &= ~grow
        total = total + np.where(active, term, 0)
        tiny = active & (at < 0.1 * EPS * np.abs(total))
        dropped[tiny] = at[tiny]
        active &= ~tiny
        prev = np.where(active, at, prev)
        if not np.any(active):
            break
        if m == max_terms - 1:
            dropped[active] = at[active]
    return total, dropped


def _stokes(zeta):
    """Relative size of the switched-on subdominant exponential."""
    ang = np.abs(np.angle(zeta))
    return np.where(ang > _CF_MAX_ANGLE, np.exp(np.minimum(2.0 * zeta.real, 0.0)), 0.0)


# ---------------------------------------------------------------- public K

def bessel_k(nu: float, z):
    """Modified Bessel function K_nu(z) for 0 < nu < 1 on the principal branch."""
    if not 0.0 < nu < 1.0:
        raise ValueError("bessel_k requires 0 < nu < 1")
    zz, scalar, shape = as_complex_array(z)
    ang = np.angle(zz)
    if np.any((np.abs(ang) >= np.pi) & (zz != 0)) or np.any(zz == 0):
        raise BranchError("bessel_k requires |arg z| < pi and z != 0")
    r = np.abs(zz)
    val = np.empty_like(zz)
    err = np.empty(zz.shape)
    meth = method_array(zz.shape, Method.SERIES)

    asym = r >= CROSSOVER
    cf = (~asym) & (r > SERIES_RADIUS) & (np.abs(ang) < _CF_MAX_ANGLE)
    ser = ~(asym | cf)
    comp = ser & (r > COMPENSATE_ABOVE)
    plain = ser & ~comp
    if np.any(plain):
        val[plain], err[plain] = _k_iseries(nu, zz[plain], False)
    if np.any(comp):
        val[comp], err[comp] = _k_iseries(nu, zz[comp], True)
        meth[comp] = Method.COMPENSATED_SERIES.value
    if np.any(cf):
        zc = zz[cf]
        if nu <= 0.5:
            k, _ = _k_cf2(nu, zc)
        else:
            _, k = _k_cf2(nu - 1.0, zc)
        val[cf] = k
        err[cf] = np.abs(k) * EPS * (40.0 + 2.0 * np.abs(zc))
        meth[cf] = Method.CONTINUED_FRACTION.value
    if np.any(asym):
        za = zz[asym]
        s, dropped = asym_series(nu, za)
        lead = np.sqrt(np.pi / (2.0 * za)) * np.exp(-za)
        val[asym] = lead * s
        err[asym] = np.abs(lead) * (dropped + np.abs(s) * (_stokes(za) + EPS * (8.0 + 2.0 * np.abs(za))))
        meth[asym] = Method.ASYMPTOTIC.value
    warn_precision(val, err, "bessel_k")
    return pack(val, err, meth, scalar, shape)


# ---------------------------------------------------------------- Ai^(k)

def _aik_series(k, E, logE):
    nu = 1.0 / (k + 2.0)
    c = 1.0 / (2.0 * np.sin(nu * np.pi) * np.sqrt(k + 2.0))
    a = (k + 2.0) ** nu / gamma_real(1.0 - nu)
    b = (k + 2.0) ** (-nu) / gamma_real(1.0 + nu)
    zero = E == 0
    safe_log = np.where(zero, 0.0, logE)
    w = np.where(zero, 0.0, np.exp((k + 2.0) * safe_log)) / (k + 2.0) ** 2
    ek1 = np.where(zero, 0.0, np.exp((k + 1.0) * safe_log)) / (k + 2.0)
    compensated = bool(np.any(np.abs(w) > (0.5 * COMPENSATE_ABOVE) ** 2))
    f1, e1 = hyp0f1_series(1.0 - nu, w, compensated)
    f2, e2 = hyp0f1_series(1.0 + nu, w, compensated)
    g1, d1 = hyp0f1_series(2.0 - nu, w, compensated)
    g2, d2 = hyp0f1_series(nu, w, compensated)
    aE = np.abs(E)
    f = c * (a * f1 - b * E * f2)
    ef = c * (a * e1 + b * aE * e2) + EPS * np.abs(f)
    fp = c * (a * g1 * ek1 / (1.0 - nu) - b * g2)
    efp = c * (a * d1 * np.abs(ek1) / (1.0 - nu) + b * d2) + EPS * np.abs(fp)
    return f, fp, ef, efp


def _aik_cf(k, E, logE):
    nu = 1.0 / (k + 2.0)
    zeta = (2.0 / (k + 2.0)) * np.exp(0.5 * (k + 2.0) * logE)
    k_nu, k_1mnu = _k_pair_cf(nu, zeta)
    f = np.sqrt(E / (k + 2.0)) * k_nu / np.pi
    fp = -np.exp(0.5 * (k + 1.0) * logE) * k_1mnu / (np.pi * np.sqrt(k + 2.0))
    scale = EPS * (40.0 + 2.0 * np.abs(zeta))
    return f, fp, np.abs(f) * scale, np.abs(fp) * scale


def _aik_asym(k, E, logE):
    nu = 1.0 / (k + 2.0)
    zeta = (2.0 / (k + 2.0)) * np.exp(0.5 * (k + 2.0) * logE)
    s0, r0 = asym_series(nu, zeta)
    s1, r1 = asym_series(1.0 - nu, zeta)
    ez = np.exp(-zeta) / (2.0 * np.sqrt(np.pi))
    lead0 = np.exp(-0.25 * k * logE) * ez
    lead1 = -np.exp(0.25 * k * logE) * ez
    st = _stokes(zeta)
    rnd = EPS * (8.0 + 2.0 * np.abs(zeta))
    f = lead0 * s0
    fp = lead1 * s1
    ef = np.abs(lead0) * (r0 + np.abs(s0) * (st + rnd))
    efp = np.abs(lead1) * (r1 + np.abs(s1) * (st + rnd))
    return f, fp, ef, efp


def aik_pair(k: float, E):
    """Ai^(k)(E) and its E-derivative for arrays of E.

    Returns (f, fprime, err_f, err_fprime, method) arrays.
    """
    if k < 0:
        raise ValueError("aik requires k >= 0")
    E = np.asarray(E, dtype=complex)
    argE = np.angle(E)
    if np.any(np.abs(argE) > np.pi):
        raise BranchError("aik requires |arg E| <= pi")
    p = 0.5 * (k + 2.0)
    absz = (2.0 / (k + 2.0)) * np.abs(E) ** p
    argz = p * argE
    f = np.zeros_like(E)
    fp = np.zeros_like(E)
    ef = np.zeros(E.shape)
    efp = np.zeros(E.shape)
    meth = method_array(E.shape, Method.SERIES)

    rotate = (np.abs(argz) > _ASYM_MAX_ANGLE) & (absz > SERIES_RADIUS)
    with np.errstate(divide="ignore"):
        logE = np.log(np.where(E == 0, 1.0, E))

    ser = (~rotate) & ((absz <= SERIES_RADIUS) | ((absz < CROSSOVER) & (np.abs(argz) >= _CF_MAX_ANGLE)))
    cf = (~rotate) & (absz > SERIES_RADIUS) & (absz < CROSSOVER) & (np.abs(argz) < _CF_MAX_ANGLE)
    asym = (~rotate) & (absz >= CROSSOVER)
    if np.any(ser):
        Es = E[ser]
        f[ser], fp[ser], ef[ser], efp[ser] = _aik_series(k, Es, np.where(Es == 0, 0, logE[ser]))
        if np.any(absz[ser] > COMPENSATE_ABOVE):
            meth[ser] = np.where(absz[ser] > COMPENSATE_ABOVE, Method.COMPENSATED_SERIES.value, Method.SERIES.value)
    if np.any(cf):
        f[cf], fp[cf], ef[cf], efp[cf] = _aik_cf(k, E[cf], logE[cf])
        meth[cf] = Method.CONTINUED_FRACTION.value
    if np.any(asym):
        f[asym], fp[asym], ef[asym], efp[asym] = _aik_asym(k, E[asym], logE[asym])
        meth[asym] = Method.ASYMPTOTIC.value
    if np.any(rotate):
        f[rotate], fp[rotate], ef[rotate], efp[rotate], meth[rotate] = _aik_rotate(k, E[rotate])
    return f, fp, ef, efp, meth


def _aik_rotate(k, E):
    """Apply the rotation relation, moving E by one or two steps toward arg 0.

    For 5pi/4 < |arg zeta| the two rotated points stay inside |arg E| <= pi,
    so the relation is also valid on the cut plane of non-integer k.
    """
    nu = 1.0 / (k + 2.0)
    sign = np.where(np.angle(E) > 0, -1.0, 1.0)
    step = np.exp(2j * np.pi * nu * sign)  # omega^{-1} for arg E > 0
    phase = np.exp(-1j * np.pi * nu * sign)  # e^{i pi nu} for arg E > 0
    E1 = E * step
    E2 = E1 * step
    f1, fp1, ef1, efp1, m1 = aik_pair(k, E1)
    f2, fp2, ef2, efp2, _ = aik_pair(k, E2)
    c2 = 2.0 * np.cos(np.pi * nu)
    f = phase * (c2 * f1 - phase * f2)
    fp = phase * (c2 * step * fp1 - phase * step * step * fp2)
    ef = c2 * ef1 + ef2 + EPS * np.abs(f)
    efp = c2 * efp1 + efp2 + EPS * np.abs(fp)
    return f, fp, ef, efp, m1


def _check_k_branch(k, E):
    """Non-integer k has a cut on the negative E axis."""
    if float(k).is_integer():
        return
    if np.any(np.abs(np.angle(E)) >= np.pi):
        raise BranchError("for non-integer k, Ai^(k) is defined only for |arg E| < pi")


def aik(k: float, E):
    """Generalized Airy function Ai^(k)(E) = (1/pi) sqrt(E/(k+2)) K_{1/(k+2)}(2 E^{(k+2)/2}/(k+2))."""
    EE, scalar, shape = as_complex_array(E)
    _check_k_branch(k, EE)
    f, _, ef, _, meth = aik_pair(k, EE)
    warn_precision(f, ef, "aik")
    return pack(f, ef, meth, scalar, shape)


def aik_prime(k: float, E):
    """E-derivative of Ai^(k)."""
    EE, scalar, shape = as_complex_array(E)
    _check_k_branch(k, EE)
    _, fp, _, efp, meth = aik_pair(k, EE)
    warn_precision(fp, efp, "aik_prime")
    return pack(fp, efp, meth, scalar, shape)


def airy_ai(z):
    """Airy function Ai(z), the k = 1 case of Ai^(k)."""
    return aik(1, z)


def airy_ai_prime(z):
    """Derivative Ai'(z)."""
    return aik_prime(1, z)

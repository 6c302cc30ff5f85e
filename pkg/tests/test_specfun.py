"""Special functions against extended-precision mpmath oracles."""
import json
import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tba_exact.specfun import (
    BranchError,
    EvalResult,
    Method,
    PoleError,
    PrecisionWarning,
    Su3Phi,
    aik,
    aik_pair,
    aik_prime,
    airy_ai,
    airy_ai_prime,
    bessel_k,
    gamma,
    hyp0f2,
    su3_phi_build,
    su3_phi_collocate,
    su3_phi_eval,
)
from tba_exact.specfun import _dd
from tba_exact.specfun.su3phi import ode_residual

N_POINTS = 50


def _disc(rng, n, rmin, rmax, max_angle=math.pi):
    r = np.exp(rng.uniform(math.log(rmin), math.log(rmax), n))
    return r * np.exp(1j * rng.uniform(-max_angle, max_angle, n))


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------- gamma

def test_gamma_matches_mpmath():
    rng = np.random.default_rng(11)
    zs = _disc(rng, N_POINTS, 0.05, 40.0, 0.95 * math.pi)
    for z in zs:
        res = gamma(z)
        ref = complex(mp.gamma(mp.mpc(z)))
        assert _rel(res.value, ref) < 1e-12
        assert abs(res.value - ref) <= 10 * res.abs_error_estimate + 1e-300


def test_gamma_pole_raises():
    for z in (0, -1, -7):
        with pytest.raises(PoleError):
            gamma(z)


def test_gamma_half_and_integers():
    assert abs(gamma(0.5).value - math.sqrt(math.pi)) < 1e-14
    assert abs(gamma(6).value - 120.0) < 1e-11


# ---------------------------------------------------------------- Bessel K

@pytest.mark.parametrize("nu", [0.25, 1 / 3, 0.6, 0.8])
def test_bessel_k_matches_mpmath(nu):
    rng = np.random.default_rng(int(nu * 1000))
    zs = _disc(rng, N_POINTS, 0.01, 40.0, 0.99 * math.pi)
    res = bessel_k(nu, zs)
    for z, v, e in zip(zs, res.value, res.abs_error_estimate):
        ref = complex(mp.besselk(nu, mp.mpc(z)))
        assert _rel(v, ref) < 1e-12
        assert abs(v - ref) <= 10 * e + 1e-300


def test_bessel_k_branch_errors():
    with pytest.raises(BranchError):
        bessel_k(0.3, -2.0)
    with pytest.raises(BranchError):
        bessel_k(0.3, 0.0)


def test_bessel_k_methods_cover_regions():
    res = bessel_k(1 / 3, np.array([0.5, 6.0, 30.0]))
    assert list(res.method) == [Method.SERIES.value, Method.CONTINUED_FRACTION.value, Method.ASYMPTOTIC.value]


# ---------------------------------------------------------------- Ai^(k)

def _aik_ref(k, E, deriv):
    """Entire-series form of Ai^(k), evaluated with enough digits for the cancellation."""
    zeta = abs(E) ** ((k + 2) / 2) * 2 / (k + 2)
    with mp.workdps(40 + int(0.9 * zeta)):
        k = mp.mpf(k)
        nu = 1 / (k + 2)

        def f(e):
            w = e ** (k + 2) / (k + 2) ** 2
            return ((k + 2) ** nu / mp.gamma(1 - nu) * mp.hyp0f1(1 - nu, w)
                    - e * (k + 2) ** (-nu) / mp.gamma(1 + nu) * mp.hyp0f1(1 + nu, w)) / (2 * mp.sin(nu * mp.pi) * mp.sqrt(k + 2))

        e = mp.mpc(E)
        return complex(f(e) if deriv == 0 else mp.diff(f, e))


@pytest.mark.parametrize("k", [0, 1, 2, 2.5, 3, 4])
def test_aik_matches_mpmath(k):
    rng = np.random.default_rng(100 + int(10 * k))
    angle = math.pi if float(k).is_integer() else 0.99 * math.pi
    Es = _disc(rng, N_POINTS, 0.01, 12.0, angle)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionWarning)
        f = aik(k, Es)
        fp = aik_prime(k, Es)
    for i, E in enumerate(Es):
        for deriv, res in ((0, f), (1, fp)):
            ref = _aik_ref(k, E, deriv)
            assert abs(res.value[i] - ref) <= max(1e-11 * abs(ref), 10 * res.abs_error_estimate[i]), (E, deriv)


def test_aik_k1_is_airy():
    rng = np.random.default_rng(3)
    zs = _disc(rng, N_POINTS, 0.01, 10.0)
    a, ap = airy_ai(zs).value, airy_ai_prime(zs).value
    for z, v, vp in zip(zs, a, ap):
        assert _rel(v, complex(mp.airyai(mp.mpc(z)))) < 1e-11
        assert _rel(vp, complex(mp.airyai(mp.mpc(z), derivative=1))) < 1e-11


def test_aik_noninteger_cut():
    with pytest.raises(BranchError):
        aik(2.5, -1.0)


@settings(max_examples=40, deadline=None)
@given(r=st.floats(0.05, 6.0), a=st.floats(-math.pi, math.pi), k=st.sampled_from([1, 2, 3, 4]))
def test_aik_rotation_relation(r, a, k):
    """2 cos(pi nu) f(E) = e^{-i pi nu} f(omega E) + e^{i pi nu} f(E/omega), omega = e^{2 pi i nu}."""
    nu = 1 / (k + 2)
    E = r * np.exp(1j * a)
    om = np.exp(2j * math.pi * nu)
    f, *_ = aik_pair(k, np.array([E, om * E, E / om]))
    lhs = 2 * math.cos(math.pi * nu) * f[0]
    rhs = np.exp(-1j * math.pi * nu) * f[1] + np.exp(1j * math.pi * nu) * f[2]
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(f[1]), abs(f[2]))


@settings(max_examples=40, deadline=None)
@given(r=st.floats(0.0, 8.0), a=st.floats(-3.0, 3.0), k=st.sampled_from([1, 2, 2.5, 3]))
def test_aik_conjugation(r, a, k):
    E = r * np.exp(1j * a)
    f = aik(k, E).value
    fc = aik(k, np.conj(E)).value
    assert abs(fc - np.conj(f)) <= 1e-13 * max(1.0, abs(f))


# ---------------------------------------------------------------- 0F2

def test_hyp0f2_matches_mpmath():
    rng = np.random.default_rng(21)
    zs = _disc(rng, N_POINTS, 0.01, 500.0)
    for b1, b2 in ((0.5, 0.75), (1.25, 1.5), (-0.5, 2 / 3)):
        res = hyp0f2(b1, b2, zs)
        for z, v, e in zip(zs, res.value, res.abs_error_estimate):
            ref = complex(mp.hyper([], [b1, b2], mp.mpc(z)))
            assert abs(v - ref) <= max(1e-12 * abs(ref), 10 * e)


def test_hyp0f2_derivative_ladder():
    """d/dz 0F2(b1, b2; z) = 0F2(b1+1, b2+1; z)/(b1 b2), against central differences."""
    b1, b2 = 0.5, 0.75
    h = 1e-5
    for z in (0.3, -2.0 + 1j, 7.5, 15j):
        fd = (hyp0f2(b1, b2, z + h).value - hyp0f2(b1, b2, z - h).value) / (2 * h)
        ladder = hyp0f2(b1 + 1, b2 + 1, z).value / (b1 * b2)
        assert abs(fd - ladder) <= 1e-6 * max(1.0, abs(ladder))


def test_hyp0f2_errors():
    with pytest.raises(ValueError):
        hyp0f2(-1.0, 0.5, 1.0)
    with pytest.raises(OverflowError):
        hyp0f2(0.5, 0.75, 1e7)
    assert hyp0f2(0.5, 0.75, 200.0).method == Method.COMPENSATED_SERIES.value


# ---------------------------------------------------------------- double-double

def test_double_double_sum_is_exact():
    s, e = _dd.two_sum(1.0, 1e-20)
    assert s == 1.0 and e == 1e-20
    hi, lo = _dd.from_decimal("0.1")
    assert hi == 0.1 and abs(lo) < 1e-17 and lo != 0.0


# ---------------------------------------------------------------- SU(3) phi

_TAYLOR = None


def _phi_ref(u, deriv):
    global _TAYLOR
    with mp.workdps(90):
        if _TAYLOR is None:
            a = [mp.mpc(0, -1) * mp.gamma(mp.mpf(1) / 4) / (2 * mp.sqrt(2 * mp.pi)),
                 mp.mpc(0, 1) / mp.sqrt(2),
                 mp.mpc(0, -1) * mp.gamma(mp.mpf(3) / 4) / mp.sqrt(2 * mp.pi) / 2] + [mp.mpc(0)] * 900
            for n in range(0, 896):
                a[n + 4] = -a[n] / ((n + 4) * (n + 3) * (n + 2))
            _TAYLOR = a
        uu = mp.mpc(complex(u))
        return complex(sum(_TAYLOR[n] * mp.ff(n, deriv) * uu ** (n - deriv) for n in range(deriv, 896)))


@pytest.fixture(scope="module")
def phi():
    return su3_phi_build()


@pytest.mark.parametrize("deriv", [0, 1, 2])
def test_su3_phi_matches_taylor_oracle(phi, deriv):
    rng = np.random.default_rng(31 + deriv)
    us = _disc(rng, N_POINTS, 0.05, 15.0)
    res = su3_phi_eval(phi, us, deriv)
    for u, v, e in zip(us, res.value, res.abs_error_estimate):
        ref = _phi_ref(u, deriv)
        assert abs(v - ref) <= max(1e-12 * abs(ref), 10 * e), (u, deriv)


def test_su3_phi_solves_ode(phi):
    assert ode_residual(phi) < 1e-12


def test_su3_phi_real_axis_sign_and_decay(phi):
    """On the real axis phi = -i g with g > 0 and decreasing."""
    x = np.linspace(0.0, 8.0, 60)
    v = su3_phi_eval(phi, x).value
    g = (1j * v)
    assert np.max(np.abs(g.imag)) < 1e-14 * np.max(np.abs(g))
    assert np.all(g.real > 0)
    assert np.all(np.diff(g.real) < 0)


def test_su3_phi_asymptotic_series(phi):
    """At x = 8 phi agrees with its full asymptotic expansion; the leading term alone is only 1e-2 close."""
    x = 8.0
    v = su3_phi_eval(phi, x).value
    lead = 1 / (math.sqrt(3) * 1j) * x ** (-1 / 3) * math.exp(-0.75 * x ** (4 / 3))
    assert abs(v / lead - 1) < 0.02
    ref = _phi_ref(x, 0)
    assert abs(v - ref) < 1e-12 * abs(ref)


def test_su3_phi_collocation_agrees_with_closed_form(phi):
    alpha, fit_residual = su3_phi_collocate()
    for a, b in zip(alpha, phi.alpha):
        assert abs(a - b) < 1e-10
    assert fit_residual < 1e-8
    built = su3_phi_build("collocation")
    # Away from the origin the growing solutions amplify the 1e-13 coefficient gap.
    u = np.array([0.5, 2 + 1j, 3.0])
    assert np.allclose(su3_phi_eval(built, u).value, su3_phi_eval(phi, u).value, rtol=1e-9, atol=0)


def test_su3_phi_json_roundtrip(phi):
    back = Su3Phi.from_json(phi.to_json())
    assert json.loads(back.to_json()) == json.loads(phi.to_json())
    u = np.array([0.3, 2 + 1j, 9.0])
    assert np.array_equal(su3_phi_eval(back, u).value, su3_phi_eval(phi, u).value)


def test_su3_phi_overflow_is_reported(phi):
    with pytest.raises(OverflowError):
        su3_phi_eval(phi, -400.0 * np.exp(0.1j))


def test_evalresult_rejects_bad_estimate():
    with pytest.raises(ValueError):
        EvalResult(1.0, -1.0, "series")

"""CFIV index and the I~_m family."""
import json
import math

import mpmath as mp
import pytest

from tba_exact.indices import IndexResult, Method, cfiv, gn, itilde, itilde_exact
from tba_exact.specfun import PoleError

KS = [1, 2, 3, 4, 2.5]


def _gn_oracle(n, p, q, l):
    m = n + 1
    with mp.workdps(30):
        f = lambda E: E ** (2 * n + l + 1) * mp.besselk(p / m, E ** m / m) * mp.besselk(q / m, E ** m / m)  # noqa: E731
        return float(mp.quad(f, [0, 0.5, 2, 6, mp.inf]))


@pytest.mark.parametrize("args", [(0.5, 0.5, 0.5, -1.5), (0.5, 0.5, -1.0, 0.0), (1.0, 0.5, 0.25, 0.3)])
def test_gn_against_quadrature(args):
    assert abs(gn(*args) - _gn_oracle(*args)) < 1e-8 * max(1.0, abs(gn(*args)))


def test_gn_symmetry():
    for n, p, q, l in ((0.5, 0.5, 0.3, -1.0), (1.25, 0.2, 0.7, 0.4)):
        v = gn(n, p, q, l)
        assert gn(n, q, p, l) == v
        assert gn(n, -p, q, l) == pytest.approx(v, rel=1e-15)


def test_gn_pole_names_factor():
    with pytest.raises(PoleError, match="Gamma"):
        gn(0.5, 1.5, 1.5, 0.0)


@pytest.mark.parametrize("k", KS)
@pytest.mark.parametrize("method", ["quadrature", "gamma_formula"])
def test_cfiv(k, method):
    r = cfiv(k, method)
    assert r.exact == pytest.approx(k / (k + 2), abs=1e-15)
    assert r.numeric > 0
    assert r.abs_diff < 1e-6


def test_cfiv_k1_is_one_third():
    assert abs(cfiv(1).numeric - 1 / 3) < 1e-9
    assert abs(cfiv(1, Method.GAMMA_FORMULA).numeric - 1 / 3) < 1e-13


def test_cfiv_k0_and_errors():
    assert cfiv(0).numeric == 0.0
    with pytest.raises(ValueError):
        cfiv(-1)
    with pytest.raises(ValueError):
        cfiv(1, "simpson")


def test_cfiv_monotone_and_bounded():
    vals = [cfiv(k, "gamma_formula").numeric for k in (0.5, 1, 2, 3, 4, 6)]
    assert all(a < b for a, b in zip(vals, vals[1:])) and vals[-1] < 1


@pytest.mark.parametrize("k", [0.5, 1, 2, 3, 4])
@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_itilde_quadrature_vs_formula(m, k):
    r = itilde(m, k)
    assert r.abs_diff < 1e-6 * abs(r.exact)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_itilde_m1_is_half_cfiv(k):
    assert abs(itilde_exact(1, k) - k / (2 * (k + 2))) < 1e-14
    assert abs(2 * itilde(1, k).numeric - cfiv(k).numeric) < 1e-8


def test_itilde_values_and_errors():
    assert abs(itilde(1, 1).numeric - 1 / 6) < 1e-7
    assert abs(itilde(3, 1).abs_diff) < 1e-7
    with pytest.raises(ValueError):
        itilde(0, 1)
    with pytest.raises(ValueError):
        itilde(1.5, 1)


def test_index_result_json():
    r = IndexResult(1.0, 0.3333, 1 / 3, 2)
    d = r.to_json()
    assert set(d) == {"k", "m", "numeric", "exact", "abs_diff"}
    assert math.isclose(d["abs_diff"], abs(0.3333 - 1 / 3))
    json.dumps(d)

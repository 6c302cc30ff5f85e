"""Functional identities between Airy-type functions and the closed forms."""
import json

import numpy as np
import pytest

from tba_exact import relations as rel
from tba_exact.closedform import ClosedFormSolution, ModelSpec


@pytest.fixture(scope="module")
def su3():
    return ClosedFormSolution.build(ModelSpec.su3())


def test_airy_three_term_including_origin():
    E = np.concatenate([[0.0], rel.disc_samples(20, 3.0, 1)])
    chk = rel.airy_three_term(E)
    assert chk.passed and chk.n_points == 21
    assert rel.airy_three_term(E, x=0.7 - 0.2j).passed


def test_airy_dvf_t1():
    assert rel.airy_dvf_t1(rel.disc_samples(20, 3.0, 2)).passed


@pytest.mark.parametrize("k", [1, 2, 3])
def test_quantum_wronskian(k):
    E = np.concatenate([[0.0], rel.disc_samples(20, 5.0, 3)])
    chk = rel.quantum_wronskian_h0(E, k=k)
    assert chk.passed, chk.max_abs_residual


def test_quantum_wronskian_at_origin_is_exact():
    assert rel.quantum_wronskian_h0([0.0], k=2).max_abs_residual < 1e-13


@pytest.mark.parametrize("k", [1, 2, 3, 4, 2.5])
def test_su2k_ysystem(k):
    chk = rel.ysystem_first_order_su2k(k, np.linspace(-4, 2, 30))
    assert chk.passed, chk.max_abs_residual


@pytest.mark.parametrize("a", [1, 2])
def test_su3_ysystem(su3, a):
    chk = rel.ysystem_first_order_su3(np.linspace(-4, 1, 20), a=a, cf=su3)
    assert chk.passed, chk.max_abs_residual
    with pytest.raises(ValueError):
        rel.ysystem_first_order_su3([0.0], a=3, cf=su3)


def test_su3_cancellation_constants(su3):
    checks = rel.su3_cancellation_constants(rel.real_samples(20, -4.0, 1.5, 5), cf=su3)
    names = [c.name for c in checks]
    assert len(checks) == 5 and len(set(names)) == 5
    for c in checks:
        assert c.passed, (c.name, c.max_abs_residual)


def test_products_reproduce_B(su3):
    from tba_exact.closedform import su3_all
    th = np.array([-2.0, 0.0, 1.0])
    p1, p2 = rel.y12_from_products(su3, th)
    v = su3_all(su3, th)
    assert np.max(np.abs(p1 - (v["B0"] + 1j))) < 1e-10
    assert np.max(np.abs(p2 - (v["B0bar"] - 1j))) < 1e-10


def test_squared_wronskian():
    x = np.concatenate([[0.0], rel.disc_samples(10, 2.0, 8)])
    E = np.concatenate([[0.0], rel.disc_samples(10, 2.0, 9)])
    for c in rel.squared_wronskian(x, E):
        assert c.passed, (c.name, c.max_abs_residual)
    # W[phi_0, phi_1] = 1 in this normalization, so the determinant equals 2.
    a, b = rel._phi_j(0, x, E), rel._phi_j(1, x, E)
    assert np.max(np.abs(a[0] * b[1] - a[1] * b[0] - 1.0)) < 1e-12


def test_failed_check_reports_failure():
    chk = rel._check("dummy", [0.0, 1.0], [1e-3, np.nan], 1e-6, 1)
    assert not chk.passed and chk.max_abs_residual == float("inf")


def test_run_suite_is_deterministic_and_serializable():
    a = [c.to_json() for c in rel.run_suite("airy", seed=42)]
    b = [c.to_json() for c in rel.run_suite("airy", seed=42)]
    assert a == b
    assert set(a[0]) == {"name", "tolerance", "max_abs_residual", "passed", "n_points", "seed"}
    json.dumps(a)
    with pytest.raises(ValueError):
        rel.run_suite("nope")


def test_run_suite_all_passes():
    checks = rel.run_suite("all", seed=42)
    failed = [(c.name, c.max_abs_residual) for c in checks if not c.passed]
    assert not failed
    assert len(checks) == 2 + 3 + 5 + 2 + 5 + 3

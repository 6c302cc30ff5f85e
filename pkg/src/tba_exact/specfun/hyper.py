"""Generalized hypergeometric 0F2 by direct summation."""
from __future__ import annotations

import numpy as np

from ._common import EPS, Method, Neumaier, as_complex_array, method_array, pack

OVERFLOW_BOUND = 1e6
COMPENSATE_ABOVE = 100.0


def hyp0f2(b1: float, b2: float, zeta, max_terms: int = 2000):
    """0F2(; b1, b2 | zeta) = sum_m zeta^m / ((b1)_m (b2)_m m!).

    Summation stops once the terms are decreasing and negligible against
    the running sum of magnitudes.
    """
    for b in (b1, b2):
        if b <= 0 and float(b).is_integer():
            raise ValueError(f"0F2 parameter {b} is a non-positive integer")
    zz, scalar, shape = as_complex_array(zeta)
    if np.any(np.abs(zz) > OVERFLOW_BOUND):
        raise OverflowError(f"|zeta| exceeds {OVERFLOW_BOUND:g}")
    compensated = np.abs(zz) > COMPENSATE_ABOVE
    acc = Neumaier(zz.shape)
    plain = np.ones_like(zz)
    term = np.ones_like(zz)
    acc.add(term)
    weighted = np.ones(zz.shape)
    cube = np.abs(zz)
    for m in range(1, max_terms):
        term = term * zz / ((b1 + m - 1) * (b2 + m - 1) * m)
        acc.add(term)
        plain = plain + term
        at = np.abs(term)
        weighted += at * np.sqrt(m + 1.0)
        if m ** 3 > cube.max() and np.all(at <= 0.25 * EPS * weighted):
            break
    val = np.where(compensated, acc.total, plain)
    err = 4 * EPS * weighted
    meth = method_array(zz.shape, Method.SERIES)
    meth[compensated] = Method.COMPENSATED_SERIES.value
    return pack(val, err, meth, scalar, shape)

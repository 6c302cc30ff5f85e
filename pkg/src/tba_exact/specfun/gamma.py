"""Complex Gamma function (Lanczos approximation with reflection)."""
from __future__ import annotations

import numpy as np

from ._common import EPS, Method, PoleError, as_complex_array, method_array, pack

# Lanczos coefficients for g = 7, n = 9.
_G = 7.0
_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_SQRT2PI = np.sqrt(2.0 * np.pi)


def _lanczos(z):
    """Gamma(z) for Re z >= 1/2, plus the magnitude of the exponent (for error bookkeeping)."""
    z = z - 1.0
    a = np.full_like(z, _COEF[0])
    for i in range(1, len(_COEF)):
        a = a + _COEF[i] / (z + i)
    t = z + _G + 0.5
    expo = (z + 0.5) * np.log(t) - t
    return _SQRT2PI * np.exp(expo) * a, np.abs(expo)


def gamma(z):
    """Complex Gamma function.

    Relative error is about 1e-14 for |z| <= 50. Raises PoleError at
    non-positive integers.
    """
    zz, scalar, shape = as_complex_array(z)
    on_pole = (zz.imag == 0) & (zz.real <= 0) & (zz.real == np.round(zz.real))
    if np.any(on_pole):
        raise PoleError(f"Gamma has a pole at z = {zz[on_pole][0].real:g}")
    out = np.empty_like(zz)
    mag = np.empty(zz.shape)
    left = zz.real < 0.5
    right = ~left
    if np.any(right):
        out[right], mag[right] = _lanczos(zz[right])
    if np.any(left):
        zl = zz[left]
        g, m = _lanczos(1.0 - zl)
        s = np.sin(np.pi * zl)
        out[left] = np.pi / (s * g)
        mag[left] = m + np.abs(np.pi * zl)
    err = np.abs(out) * (4e-15 + 4 * EPS * mag)
    return pack(out, err, method_array(zz.shape, Method.SERIES), scalar, shape)


def gamma_real(x: float) -> float:
    """Gamma at a real argument, returned as float."""
    return gamma(complex(x)).value.real

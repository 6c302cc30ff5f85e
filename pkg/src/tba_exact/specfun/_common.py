"""Shared result type, error classes and summation helpers."""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

EPS = np.finfo(float).eps


class Method(str, enum.Enum):
    SERIES = "series"
    COMPENSATED_SERIES = "compensated_series"
    CONTINUED_FRACTION = "continued_fraction"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class EvalResult:
    """Value of a special function with an error estimate and the method used.

    For array input ``value`` and ``abs_error_estimate`` are arrays and
    ``method`` is a string array of :class:`Method` values.
    """

    value: complex | np.ndarray
    abs_error_estimate: float | np.ndarray
    method: Method | np.ndarray

    def __post_init__(self):
        err = np.asarray(self.abs_error_estimate)
        if not np.all(np.isfinite(err)) or np.any(err < 0):
            raise ValueError("abs_error_estimate must be finite and non-negative")

    def __complex__(self):
        return complex(self.value)


class PoleError(ValueError):
    """Argument sits on a pole of a Gamma factor."""


class BranchError(ValueError):
    """Argument lies outside the principal domain of the function."""


class PrecisionWarning(UserWarning):
    """Estimated error exceeds the advertised accuracy."""


def warn_precision(value, err, what, threshold=1e-9):
    scale = np.maximum(np.abs(value), 1.0)
    bad = np.asarray(err / scale > threshold)
    if np.any(bad):
        warnings.warn(
            f"{what}: estimated relative error above {threshold:g} at {int(bad.sum())} point(s)",
            PrecisionWarning,
            stacklevel=3,
        )


def method_array(shape, method):
    return np.full(shape, Method(method).value, dtype="<U20")


def pack(value, err, method, scalar, shape=None):
    """Build an EvalResult, unwrapping length-1 arrays for scalar input."""
    if scalar:
        return EvalResult(complex(value.flat[0]), float(err.flat[0]), Method(str(method.flat[0])))
    if shape is not None:
        value, err, method = value.reshape(shape), err.reshape(shape), method.reshape(shape)
    return EvalResult(value, err, method)


def as_complex_array(z):
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    return np.atleast_1d(arr).ravel().copy(), scalar, arr.shape


class Neumaier:
    """Vectorised compensated (Neumaier) accumulator for complex arrays."""

    def __init__(self, shape):
        self.re = np.zeros(shape)
        self.im = np.zeros(shape)
        self.cre = np.zeros(shape)
        self.cim = np.zeros(shape)

    @staticmethod
    def _add(s, c, x):
        t = s + x
        big = np.abs(s) >= np.abs(x)
        c += np.where(big, (s - t) + x, (x - t) + s)
        return t, c

    def add(self, x):
        self.re, self.cre = self._add(self.re, self.cre, x.real)
        self.im, self.cim = self._add(self.im, self.cim, x.imag)

    @property
    def total(self):
        return (self.re + self.cre) + 1j * (self.im + self.cim)

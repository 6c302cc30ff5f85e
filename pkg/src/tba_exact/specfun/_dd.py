"""Vectorised double-double arithmetic (Dekker/Knuth error-free transforms).

A double-double number is a pair (hi, lo) of float arrays with |lo| <= ulp(hi)/2.
Complex double-doubles are carried as four real arrays (re_hi, re_lo, im_hi, im_lo).
"""
from __future__ import annotations

from decimal import Decimal, getcontext

import numpy as np

_SPLITTER = 134217729.0  # 2^27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e += t
    s, e = quick_two_sum(s, e)
    e += f
    return quick_two_sum(s, e)


def dd_mul_d(ah, al, b):
    p, e = two_prod(ah, b)
    e += al * b
    return quick_two_sum(p, e)


def dd_div_d(ah, al, b):
    q1 = ah / b
    p, e = two_prod(q1, b)
    s, f = two_sum(ah, -p)
    f -= e
    f += al
    q2 = (s + f) / b
    return quick_two_sum(q1, q2)


def cdd_mul_c(z, u):
    """Complex double-double z times complex double u."""
    rh, rl, ih, il = z
    ur, ui = u.real, u.imag
    a = dd_mul_d(rh, rl, ur)
    b = dd_mul_d(ih, il, -ui)
    c = dd_mul_d(rh, rl, ui)
    d = dd_mul_d(ih, il, ur)
    return (*dd_add(*a, *b), *dd_add(*c, *d))


def cdd_add(z, w):
    return (*dd_add(z[0], z[1], w[0], w[1]), *dd_add(z[2], z[3], w[2], w[3]))


def from_decimal(text: str):
    """(hi, lo) float pair representing a decimal string to ~32 digits."""
    getcontext().prec = 50
    d = Decimal(text)
    hi = float(d)
    lo = float(d - Decimal(hi))
    return hi, lo

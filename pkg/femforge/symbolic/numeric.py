"""
IEEE double helpers shared by the tree evaluator and the kernel runner.

Both evaluators must perform the same floating point operations in the same
order, so the primitive operations live here once. Scalar helpers never raise
on division by zero, overflow or domain errors; they return inf/nan like the
hardware would.
"""
import math
from fractions import Fraction
from typing import Union

import numpy as np

Number = Union[Fraction, float]

# Integer powers up to this magnitude are unrolled into multiplication chains.
UNROLL_LIMIT = 4


def ieee_div(a: float, b: float) -> float:
    if b == 0.0:
        if a == 0.0 or math.isnan(a):
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)
    return a / b


def ieee_sqrt(a: float) -> float:
    if a < 0.0:
        return math.nan
    return math.sqrt(a)


def ieee_sin(a: float) -> float:
    if math.isinf(a):
        return math.nan
    return math.sin(a)


def ieee_cos(a: float) -> float:
    if math.isinf(a):
        return math.nan
    return math.cos(a)


def ieee_pow(a: float, n: int) -> float:
    # n > 0 here; negative powers are divisions by the positive power.
    try:
        return math.pow(a, n)
    except OverflowError:
        return -math.inf if (a < 0 and n % 2) else math.inf


def ipow(base, n: int):
    """Positive integer power: a left multiplication chain for small n."""
    if n <= UNROLL_LIMIT:
        acc = base
        for _ in range(n - 1):
            acc = acc * base
        return acc
    if isinstance(base, np.ndarray):
        return np.power(base, float(n))
    return ieee_pow(base, n)


class ScalarBackend:
    """Primitive operations on Python floats."""

    div = staticmethod(ieee_div)
    sqrt = staticmethod(ieee_sqrt)
    sin = staticmethod(ieee_sin)
    cos = staticmethod(ieee_cos)

    @staticmethod
    def const(value: Number, like=None) -> float:
        return float(value)


class ArrayBackend:
    """Primitive operations on numpy float64 arrays (call inside np.errstate)."""

    div = staticmethod(np.divide)
    sqrt = staticmethod(np.sqrt)
    sin = staticmethod(np.sin)
    cos = staticmethod(np.cos)

    @staticmethod
    def const(value: Number, like=None):
        return np.float64(float(value))

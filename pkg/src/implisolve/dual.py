"""First-order dual numbers and guarded arithmetic.

A dual number value + derivative*eps carries one directional derivative
through a computation. Seeding eps on one input variable makes the
derivative part of the output an exact (to roundoff) partial derivative,
not a finite-difference estimate.

The module-level functions (div, pow_, sin, ...) accept floats or Duals
and enforce domain restrictions uniformly; they raise DomainViolation,
which the expression evaluator converts into a located DomainError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class DomainViolation(Exception):
    """Internal: an arithmetic step left the domain of definition."""


@dataclass(frozen=True, slots=True)
class Dual:
    """Dual number: value + derivative * eps, with eps^2 = 0."""

    value: float
    derivative: float

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value + other.value, self.derivative + other.derivative)
        return Dual(self.value + other, self.derivative)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value - other.value, self.derivative - other.derivative)
        return Dual(self.value - other, self.derivative)

    def __rsub__(self, other):
        return Dual(other - self.value, -self.derivative)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(
                self.value * other.value,
                self.value * other.derivative + self.derivative * other.value,
            )
        return Dual(self.value * other, self.derivative * other)

    __rmul__ = __mul__

    def __neg__(self):
        return Dual(-self.value, -self.derivative)


def _val(v) -> float:
    return v.value if isinstance(v, Dual) else v


def is_finite(v) -> bool:
    if isinstance(v, Dual):
        return math.isfinite(v.value) and math.isfinite(v.derivative)
    return math.isfinite(v)


def div(a, b):
    bv = _val(b)
    if bv == 0.0:
        raise DomainViolation("division by zero")
    if isinstance(a, Dual) or isinstance(b, Dual):
        if not isinstance(a, Dual):
            a = Dual(a, 0.0)
        if not isinstance(b, Dual):
            return Dual(a.value / b, a.derivative / b)
        return Dual(
            a.value / bv,
            (a.derivative * bv - a.value * b.derivative) / (bv * bv),
        )
    return a / b


def _pow_float(a: float, n: float) -> float:
    if a > 0.0:
        try:
            return math.pow(a, n)
        except OverflowError:
            raise DomainViolation("overflow in power") from None
    if a == 0.0:
        if n == 0.0:
            return 1.0
        if n < 0.0:
            raise DomainViolation("zero raised to a nonpositive power")
        return 0.0
    # negative base: only integer exponents are defined over the reals
    if n != math.floor(n):
        raise DomainViolation("negative base with non-integer exponent")
    try:
        return math.pow(a, n)
    except OverflowError:
        raise DomainViolation("overflow in power") from None


def pow_(a, b):
    """a ^ b. Exponents with a nonzero derivative part require a > 0;
    constant exponents follow the real power rule, including negative
    bases with integer exponents."""
    if not isinstance(a, Dual) and not isinstance(b, Dual):
        return _pow_float(a, b)
    if isinstance(b, Dual) and b.derivative != 0.0:
        av, ad = (a.value, a.derivative) if isinstance(a, Dual) else (a, 0.0)
        if av <= 0.0:
            raise DomainViolation("power with varying exponent needs positive base")
        v = _pow_float(av, b.value)
        return Dual(v, v * (b.derivative * math.log(av) + b.value * ad / av))
    n = _val(b)
    av, ad = (a.value, a.derivative) if isinstance(a, Dual) else (a, 0.0)
    v = _pow_float(av, n)
    if n == 0.0:
        return Dual(1.0, 0.0)
    if av == 0.0:
        if n == 1.0:
            return Dual(0.0, ad)
        if n > 1.0:
            return Dual(0.0, 0.0)
        raise DomainViolation("power rule derivative undefined at zero base")
    return Dual(v, n * _pow_float(av, n - 1.0) * ad)


def sin(v):
    if isinstance(v, Dual):
        return Dual(math.sin(v.value), math.cos(v.value) * v.derivative)
    return math.sin(v)


def cos(v):
    if isinstance(v, Dual):
        return Dual(math.cos(v.value), -math.sin(v.value) * v.derivative)
    return math.cos(v)


def exp(v):
    x = _val(v)
    try:
        ev = math.exp(x)
    except OverflowError:
        raise DomainViolation("overflow in exp") from None
    if isinstance(v, Dual):
        return Dual(ev, ev * v.derivative)
    return ev


def ln(v):
    x = _val(v)
    if x <= 0.0:
        raise DomainViolation("logarithm of a nonpositive number")
    if isinstance(v, Dual):
        return Dual(math.log(x), v.derivative / x)
    return math.log(x)


def sqrt(v):
    x = _val(v)
    if isinstance(v, Dual):
        # derivative of sqrt is unbounded at 0, so require strict positivity
        if x <= 0.0:
            raise DomainViolation("sqrt derivative needs a positive argument")
        s = math.sqrt(x)
        return Dual(s, v.derivative / (2.0 * s))
    if x < 0.0:
        raise DomainViolation("sqrt of a negative number")
    return math.sqrt(x)


def abs_(v):
    # convention: abs'(0) = 0
    if isinstance(v, Dual):
        s = 1.0 if v.value > 0.0 else (-1.0 if v.value < 0.0 else 0.0)
        return Dual(abs(v.value), s * v.derivative)
    return abs(v)

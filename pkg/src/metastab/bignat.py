"""Saturating arbitrary-precision naturals.

Every effective modulus computed by this package lives in ℕ but can blow up
to towers of exponentials.  A `BoundNat` is either an exact Python integer
below a saturation threshold tau, or the token Huge meaning "the true value
is >= tau".  All bound formulas are monotone nondecreasing in every
subexpression, so collapsing anything >= tau to Huge never changes the
verdict of a comparison against an exact value below tau.

Comparisons between two Huge values are genuinely indeterminate and raise
rather than guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_TAU_EXPONENT = 4096


class IndeterminateComparison(ArithmeticError):
    """Both sides saturated: the order cannot be decided at this threshold."""


def tau_from_exponent(exponent: int) -> int:
    if exponent < 1:
        raise ValueError("saturation exponent must be >= 1")
    return 10**exponent


DEFAULT_TAU = tau_from_exponent(DEFAULT_TAU_EXPONENT)


@dataclass(frozen=True)
class BoundNat:
    """Exact natural below tau, or Huge (value None) meaning >= tau."""

    value: int | None
    tau: int = DEFAULT_TAU

    @staticmethod
    def exact(v: int, tau: int = DEFAULT_TAU) -> "BoundNat":
        if v < 0:
            raise ValueError(f"BoundNat holds naturals, got {v}")
        return BoundNat(None, tau) if v >= tau else BoundNat(int(v), tau)

    @staticmethod
    def huge(tau: int = DEFAULT_TAU) -> "BoundNat":
        return BoundNat(None, tau)

    @property
    def is_huge(self) -> bool:
        return self.value is None

    def _coerce(self, other) -> "BoundNat":
        if isinstance(other, BoundNat):
            if other.tau != self.tau:
                raise ValueError("mixing BoundNats with different saturation thresholds")
            return other
        if isinstance(other, int):
            return BoundNat.exact(other, self.tau)
        return NotImplemented

    # arithmetic ------------------------------------------------------------

    def __add__(self, other) -> "BoundNat":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.is_huge or o.is_huge:
            return BoundNat.huge(self.tau)
        return BoundNat.exact(self.value + o.value, self.tau)

    __radd__ = __add__

    def __mul__(self, other) -> "BoundNat":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if (self.value == 0) or (o.value == 0):
            return BoundNat.exact(0, self.tau)
        if self.is_huge or o.is_huge:
            return BoundNat.huge(self.tau)
        return BoundNat.exact(self.value * o.value, self.tau)

    __rmul__ = __mul__

    def squared(self) -> "BoundNat":
        return self * self

    def max_with(self, other) -> "BoundNat":
        o = self._coerce(other)
        if self.is_huge or o.is_huge:
            return BoundNat.huge(self.tau)
        return BoundNat.exact(max(self.value, o.value), self.tau)

    def ceil_sqrt(self) -> "BoundNat":
        # shrinking maps are indeterminate on a saturated input
        if self.is_huge:
            raise IndeterminateComparison("ceil-sqrt of a saturated value is indeterminate")
        return BoundNat.exact(ceil_sqrt_int(self.value), self.tau)

    def ceil_div(self, divisor: int) -> "BoundNat":
        if divisor <= 0:
            raise ValueError("divisor must be a positive integer")
        if self.is_huge:
            raise IndeterminateComparison("ceil-div of a saturated value is indeterminate")
        return BoundNat.exact(-(-self.value // divisor), self.tau)

    # comparison ------------------------------------------------------------

    def compare(self, other) -> int | None:
        """-1 / 0 / +1, or None when both sides are Huge."""
        o = self._coerce(other)
        if self.is_huge and o.is_huge:
            return None
        if self.is_huge:
            return 1
        if o.is_huge:
            return -1
        return (self.value > o.value) - (self.value < o.value)

    def __le__(self, other) -> bool:
        c = self.compare(other)
        if c is None:
            raise IndeterminateComparison(f"both sides >= 1e{_exp_of(self.tau)}")
        return c <= 0

    def __lt__(self, other) -> bool:
        c = self.compare(other)
        if c is None:
            raise IndeterminateComparison(f"both sides >= 1e{_exp_of(self.tau)}")
        return c < 0

    def __ge__(self, other) -> bool:
        return not self.__lt__(other)

    def __gt__(self, other) -> bool:
        return not self.__le__(other)

    def at_least(self, n: int) -> bool:
        """True iff the represented value is >= n < tau; decisive for exact n."""
        if n >= self.tau:
            raise IndeterminateComparison("cannot compare against a value at or above tau")
        return True if self.is_huge else self.value >= n

    # rendering -------------------------------------------------------------

    def token(self) -> str:
        """Decimal string when exact, '>=1eEXP' when saturated."""
        return f">=1e{_exp_of(self.tau)}" if self.is_huge else str(self.value)

    def __str__(self) -> str:
        return self.token()

    def __repr__(self) -> str:
        return f"BoundNat({self.token()})"


def _exp_of(tau: int) -> int:
    # tau is always constructed as a power of ten
    return len(str(tau)) - 1


def ceil_sqrt_int(n: int) -> int:
    """Exact ceiling of sqrt(n), verified by squaring."""
    if n < 0:
        raise ValueError("square root of a negative number")
    s = math.isqrt(n)
    r = s if s * s == n else s + 1
    if not (r * r >= n and (r == 0 or (r - 1) * (r - 1) < n)):
        raise ArithmeticError(f"ceiling sqrt self-check failed for {n}")
    return r


def sat_pow(base: int, exponent: "BoundNat | int", tau: int = DEFAULT_TAU) -> BoundNat:
    """base**exponent with saturation, never materializing numbers >= tau.

    The exponent may itself be saturated; for base >= 2 the result is then
    Huge (b**e >= 2**e >= e+1 > tau for e >= tau).
    """
    if base < 0:
        raise ValueError("base must be a natural number")
    if isinstance(exponent, BoundNat):
        if exponent.tau != tau:
            raise ValueError("mixing saturation thresholds")
        if exponent.is_huge:
            if base == 0:
                return BoundNat.exact(0, tau)
            if base == 1:
                return BoundNat.exact(1, tau)
            return BoundNat.huge(tau)
        exponent = exponent.value
    if exponent < 0:
        raise ValueError("exponent must be a natural number")
    if base == 0:
        return BoundNat.exact(0 if exponent else 1, tau)
    if base == 1:
        return BoundNat.exact(1, tau)
    # base >= 2**(bits-1), so exponent*(bits-1) >= tau.bit_length() forces
    # base**exponent >= 2**tau.bit_length() > tau
    if exponent * (base.bit_length() - 1) >= tau.bit_length():
        return BoundNat.huge(tau)
    return BoundNat.exact(base**exponent, tau)

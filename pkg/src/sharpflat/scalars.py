"""Exact p-adic valuation scalars.

Valuations in this package are exact rationals extended by a single +infinity
value.  The rational part is carried by ``fractions.Fraction``; ``INFINITY``
is a first-class singleton (never a sentinel integer) that absorbs addition
and is the identity for ``min``.  Together they form the value type that the
rest of the package calls an *extended rational*.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

__all__ = [
    "INFINITY",
    "Infinity",
    "ExtRational",
    "check_odd_prime",
    "is_prime",
    "ord_p",
    "val_add",
    "val_min",
    "val_scale",
    "val_from_str",
    "val_to_str",
]


class Infinity:
    """The +infinity valuation: absorbing under +, identity under min.

    A singleton; compares strictly greater than every int or Fraction and
    equal only to itself, so built-in ``min``/``sorted`` work on mixed
    collections of valuations.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Infinity)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        # Only positive scaling is meaningful for valuations.
        if isinstance(other, (int, Fraction)):
            if other <= 0:
                raise ValueError("cannot scale INFINITY by a non-positive factor")
            return self
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("sharpflat-infinity")

    def __lt__(self, other):
        if isinstance(other, (int, Fraction, Infinity)):
            return False
        return NotImplemented

    def __le__(self, other):
        if other is self:
            return True
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __gt__(self, other):
        if other is self:
            return False
        if isinstance(other, (int, Fraction)):
            return True
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, (int, Fraction, Infinity)):
            return True
        return NotImplemented

    def __repr__(self):
        return "INFINITY"


INFINITY = Infinity()

# The value type of every p-adic valuation in this package.
ExtRational = Union[Fraction, Infinity]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond any prime used here."""
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_odd_prime(p: int) -> int:
    """Validate the prime parameter: odd prime >= 3."""
    if not isinstance(p, int) or p < 3 or not is_prime(p):
        raise ValueError(f"p must be an odd prime >= 3, got {p!r}")
    return p


def ord_p(x: Union[int, Fraction], p: int) -> ExtRational:
    """p-adic valuation of an integer or rational; ord_p(0) = INFINITY."""
    check_odd_prime(p)
    if isinstance(x, Fraction):
        if x == 0:
            return INFINITY
        return ord_p(x.numerator, p) - ord_p(x.denominator, p)
    if x == 0:
        return INFINITY
    x = abs(x)
    k = 0
    while x % p == 0:
        k += 1
        x //= p
    return Fraction(k)


def val_add(a: ExtRational, b: ExtRational) -> ExtRational:
    """Sum of valuations; INFINITY absorbs."""
    if a is INFINITY or b is INFINITY:
        return INFINITY
    return a + b


def val_min(a: ExtRational, b: ExtRational) -> ExtRational:
    """Minimum of valuations; INFINITY is the identity."""
    if a is INFINITY:
        return b
    if b is INFINITY:
        return a
    return min(a, b)


def val_scale(k: Union[int, Fraction], a: ExtRational) -> ExtRational:
    """Scale a valuation by a positive factor (e.g. by phi(p^n))."""
    if k <= 0:
        raise ValueError("scale factor must be positive")
    if a is INFINITY:
        return INFINITY
    return k * a


def val_to_str(v: ExtRational) -> str:
    """Serialize as "num/den" (always with denominator) or "inf"."""
    if v is INFINITY:
        return "inf"
    f = Fraction(v)
    return f"{f.numerator}/{f.denominator}"


def val_from_str(s: str) -> ExtRational:
    """Parse the "num/den" / "inf" wire format (bare integers accepted)."""
    s = s.strip()
    if s == "inf":
        return INFINITY
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(s))

"""Truncated p-adic power series: coefficients mod p^N, degrees below a cap.

Used only where genuine series (unit factors (1+X)^(-k)) enter the picture;
all core identities run on exact integer polynomials.  The precision policy
is strict: any valuation query that the stored window cannot decide raises
``PrecisionError`` instead of guessing.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable

from .scalars import INFINITY, ExtRational, check_odd_prime
from .polynomials import IntPolynomial, euler_phi_pn, ord_at_zeta

__all__ = ["PrecisionError", "TruncatedSeries", "binomial_series", "series_inverse"]


class PrecisionError(ArithmeticError):
    """A p-adic computation exceeded its certified precision window.

    ``bound`` is the valuation the window can still certify: the true value
    is only known to be >= bound.
    """

    def __init__(self, message: str, bound: Fraction | None = None):
        super().__init__(message)
        self.bound = bound


class TruncatedSeries:
    """Element of Z_p[[X]] known mod (p^precision, X^cap).

    Coefficients are stored as canonical residues in [0, p^precision).
    Binary operations require identical (p, precision, cap).
    """

    __slots__ = ("p", "precision", "cap", "coeffs")

    def __init__(self, p: int, precision: int, cap: int, coeffs: Iterable[int] = ()):
        check_odd_prime(p)
        if precision < 1 or cap < 1:
            raise ValueError("precision and degree cap must be >= 1")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "precision", precision)
        object.__setattr__(self, "cap", cap)
        mod = p**precision
        cs = [c % mod for c in coeffs][:cap]
        cs += [0] * (cap - len(cs))
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedSeries is immutable")

    @classmethod
    def from_polynomial(cls, f: IntPolynomial, p: int, precision: int, cap: int) -> "TruncatedSeries":
        return cls(p, precision, cap, f.coeffs)

    @classmethod
    def constant(cls, c: int, p: int, precision: int, cap: int) -> "TruncatedSeries":
        return cls(p, precision, cap, (c,))

    def _modulus(self) -> int:
        return self.p**self.precision

    def _check_compatible(self, other: "TruncatedSeries"):
        if (self.p, self.precision, self.cap) != (other.p, other.precision, other.cap):
            raise ValueError("mismatched series parameters")

    def is_zero_to_precision(self) -> bool:
        """True when every stored residue vanishes mod p^precision."""
        return all(c == 0 for c in self.coeffs)

    def lift(self) -> IntPolynomial:
        """Canonical integer lift of the stored window."""
        return IntPolynomial(self.coeffs)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = TruncatedSeries.constant(other, self.p, self.precision, self.cap)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check_compatible(other)
        return TruncatedSeries(
            self.p, self.precision, self.cap,
            (a + b for a, b in zip(self.coeffs, other.coeffs)),
        )

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.p, self.precision, self.cap, (-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return TruncatedSeries(self.p, self.precision, self.cap,
                                   (other * c for c in self.coeffs))
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check_compatible(other)
        mod = self._modulus()
        out = [0] * self.cap
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j in range(self.cap - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] = (out[i + j] + a * b) % mod
        return TruncatedSeries(self.p, self.precision, self.cap, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return (self.p, self.precision, self.cap, self.coeffs) == (
                other.p, other.precision, other.cap, other.coeffs)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.precision, self.cap, self.coeffs))

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse mod (p^N, X^cap); constant term must be a unit."""
        c0 = self.coeffs[0]
        if c0 % self.p == 0:
            raise ValueError("series is not invertible: constant term is not a unit")
        mod = self._modulus()
        inv0 = pow(c0, -1, mod)
        out = [inv0] + [0] * (self.cap - 1)
        for k in range(1, self.cap):
            acc = 0
            for j in range(1, k + 1):
                if self.coeffs[j]:
                    acc += self.coeffs[j] * out[k - j]
            out[k] = (-inv0 * acc) % mod
        return TruncatedSeries(self.p, self.precision, self.cap, out)

    # -- valuations --------------------------------------------------------

    def certification_bound(self, n: int) -> Fraction:
        """Largest valuation at zeta_{p^n}-1 the stored window can certify.

        The unknown coefficient tails contribute ord >= precision, the
        degree tail ord >= cap/phi(p^n); anything below the minimum of the
        two is exact.
        """
        return min(Fraction(self.precision), Fraction(self.cap, euler_phi_pn(self.p, n)))

    def ord_at_zeta(self, n: int) -> ExtRational:
        """ord_p at zeta_{p^n}-1 when the window certifies it.

        Returns INFINITY only for the window-wise zero series (exact zeros
        propagate through the matrix constructions that feed this).  A
        nonzero window whose valuation reaches the certification bound
        raises PrecisionError carrying that bound.
        """
        if n < 1:
            raise ValueError("ord_at_zeta requires n >= 1")
        if self.is_zero_to_precision():
            return INFINITY
        bound = self.certification_bound(n)
        w = ord_at_zeta(self.lift(), self.p, n)
        if w is INFINITY or w >= bound:
            raise PrecisionError(
                f"valuation at zeta_(p^{n})-1 not decided: >= {bound}", bound=bound)
        return w

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        tail = ", ..." if self.cap > 6 else ""
        return (f"TruncatedSeries(p={self.p}, N={self.precision}, cap={self.cap}, "
                f"[{head}{tail}])")


def binomial_series(exponent: int, p: int, precision: int, cap: int) -> TruncatedSeries:
    """(1+X)^exponent as a truncated series; the exponent may be negative.

    Negative exponents use C(-e, k) = (-1)^k C(e+k-1, k), which is integral,
    so no precision is lost.
    """
    e = exponent
    if e >= 0:
        coeffs = [comb(e, k) for k in range(min(e, cap - 1) + 1)]
    else:
        coeffs = [(-1) ** k * comb(-e + k - 1, k) for k in range(cap)]
    return TruncatedSeries(p, precision, cap, coeffs)


def series_inverse(f: TruncatedSeries) -> TruncatedSeries:
    """Function form of TruncatedSeries.inverse."""
    return f.inverse()

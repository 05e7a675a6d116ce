"""Construction of the 2x2 matrices that encode the sharp/flat column pairs.

The level-n matrix is the product -C_1 ... C_n A^{-1} with
A = (a_p, 1; -1, 0) and C_i = (a_p, 1; -Phi_i(1+X), 0).  Its columns carry
the four polynomials (omega_n^sharp, omega_n^flat) and, after dividing the
right column by Phi_n(1+X), (omega_{n-1}^sharp, omega_{n-1}^flat).

Plain matrices keep exact integer-polynomial entries.  The completed
variant multiplies each -Phi_i(1+X) by the unit (1+X)^(-p^(i-1)(p-1)/2) and
therefore lives over truncated series.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Any

from .scalars import check_odd_prime
from .polynomials import IntPolynomial, ONE, ZERO, phi
from .series import TruncatedSeries, binomial_series

__all__ = [
    "SeriesMatrix",
    "SharpFlatColumns",
    "build_A_inv",
    "build_Hn",
    "build_completed_Hn",
    "extract_columns",
    "column_determinant",
    "unit_exponent",
    "weil_bound_holds",
]


@dataclass(frozen=True)
class SeriesMatrix:
    """2x2 matrix over integer polynomials (or truncated series), with the
    prime and the trace-of-Frobenius parameter it was built from."""

    e11: Any
    e12: Any
    e21: Any
    e22: Any
    p: int
    a_p: int

    def __matmul__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        return SeriesMatrix(
            self.e11 * other.e11 + self.e12 * other.e21,
            self.e11 * other.e12 + self.e12 * other.e22,
            self.e21 * other.e11 + self.e22 * other.e21,
            self.e21 * other.e12 + self.e22 * other.e22,
            self.p,
            self.a_p,
        )

    def __neg__(self) -> "SeriesMatrix":
        return SeriesMatrix(-self.e11, -self.e12, -self.e21, -self.e22, self.p, self.a_p)

    def det(self):
        return self.e11 * self.e22 - self.e12 * self.e21

    def entries(self) -> tuple[Any, Any, Any, Any]:
        return (self.e11, self.e12, self.e21, self.e22)


@dataclass(frozen=True)
class SharpFlatColumns:
    """The four column polynomials extracted from a level-n matrix."""

    omega_sharp_n: IntPolynomial
    omega_flat_n: IntPolynomial
    omega_sharp_nminus1: IntPolynomial
    omega_flat_nminus1: IntPolynomial


def weil_bound_holds(p: int, a_p: int) -> bool:
    """|a_p| < 2*sqrt(p), checked exactly as a_p^2 < 4p."""
    return a_p * a_p < 4 * p


def build_A_inv(p: int, a_p: int) -> SeriesMatrix:
    """A^{-1} = (0, -1; 1, a_p); det A = 1 so this is the adjugate."""
    check_odd_prime(p)
    return SeriesMatrix(
        ZERO, -ONE, ONE, IntPolynomial([a_p]), p, a_p,
    )


def _c_matrix(p: int, a_p: int, i: int) -> SeriesMatrix:
    return SeriesMatrix(
        IntPolynomial([a_p]), ONE, -phi(p, i), ZERO, p, a_p,
    )


def build_Hn(p: int, a_p: int, n: int, warn_weil: bool = True) -> SeriesMatrix:
    """-C_1 ... C_n A^{-1} (just -A^{-1} for n = 0), exact entries.

    Its determinant is prod_{i<=n} Phi_i(1+X).  The supersingular dichotomy
    ord_p(a_p) in {1, infinity} needs the Weil bound, so a violation is
    worth a warning even though the construction itself is fine for any a_p.
    """
    check_odd_prime(p)
    if n < 0:
        raise ValueError("level n must be >= 0")
    if warn_weil and a_p != 0 and not weil_bound_holds(p, a_p):
        warnings.warn(
            f"|a_p| = {abs(a_p)} >= 2*sqrt({p}): outside the Weil bound, so the "
            "closed-form valuation lemma's v in {1, inf} dichotomy may fail",
            stacklevel=2,
        )
    if n == 0:
        return -build_A_inv(p, a_p)
    # left-to-right, as written: degrees stay bounded by deg omega_n
    acc = _c_matrix(p, a_p, 1)
    for i in range(2, n + 1):
        acc = acc @ _c_matrix(p, a_p, i)
    return -(acc @ build_A_inv(p, a_p))


def unit_exponent(p: int, i: int) -> int:
    """Exponent p^(i-1)(p-1)/2 of the completing unit (1+X)^(-exponent)."""
    check_odd_prime(p)
    if i < 1:
        raise ValueError("factor index must be >= 1")
    return p ** (i - 1) * (p - 1) // 2


def build_completed_Hn(p: int, a_p: int, n: int, precision: int, cap: int) -> SeriesMatrix:
    """Completed variant over truncated series.

    Each factor's lower-left entry is -Phi_i(1+X) (1+X)^(-p^(i-1)(p-1)/2);
    the extra factor is a unit, so valuations at every zeta_{p^m}-1 agree
    with the plain matrix (within the precision window).
    """
    check_odd_prime(p)
    if n < 0:
        raise ValueError("level n must be >= 0")

    def lift(f: IntPolynomial) -> TruncatedSeries:
        return TruncatedSeries.from_polynomial(f, p, precision, cap)

    a_inv = SeriesMatrix(
        lift(ZERO), lift(-ONE), lift(ONE), lift(IntPolynomial([a_p])), p, a_p,
    )

    def c_hat(i: int) -> SeriesMatrix:
        unit = binomial_series(-unit_exponent(p, i), p, precision, cap)
        return SeriesMatrix(
            lift(IntPolynomial([a_p])), lift(ONE), -(lift(phi(p, i)) * unit),
            lift(ZERO), p, a_p,
        )

    if n == 0:
        return -a_inv
    acc = c_hat(1)
    for i in range(2, n + 1):
        acc = acc @ c_hat(i)
    return -(acc @ a_inv)


def extract_columns(h: SeriesMatrix, p: int, n: int) -> SharpFlatColumns:
    """Split a level-n matrix into its four column polynomials.

    The right column must be exactly divisible by Phi_n(1+X); a nonzero
    remainder would mean the matrix was not built at level n.
    """
    check_odd_prime(p)
    if n < 1:
        raise ValueError("column extraction needs n >= 1")
    ph = phi(p, n)
    q12, r12 = h.e12.divmod(ph)
    q22, r22 = h.e22.divmod(ph)
    if not r12.is_zero() or not r22.is_zero():
        raise ValueError("right column not divisible by phi(p, n); wrong level?")
    return SharpFlatColumns(
        omega_sharp_n=h.e11,
        omega_flat_n=h.e21,
        omega_sharp_nminus1=q12,
        omega_flat_nminus1=q22,
    )


def reassemble(cols: SharpFlatColumns, p: int, a_p: int, n: int) -> SeriesMatrix:
    """Inverse of extract_columns; useful as an exactness check."""
    ph = phi(p, n)
    return SeriesMatrix(
        cols.omega_sharp_n, ph * cols.omega_sharp_nminus1,
        cols.omega_flat_n, ph * cols.omega_flat_nminus1,
        p, a_p,
    )


def column_determinant(cols: SharpFlatColumns) -> IntPolynomial:
    """omega_n^sharp * omega_{n-1}^flat - omega_{n-1}^sharp * omega_n^flat.

    Equals prod_{i<n} Phi_i(1+X) exactly (that is omega_{n-1}/X, one factor
    X short of omega_{n-1} itself; callers report the comparison rather
    than asserting the latter).
    """
    return (cols.omega_sharp_n * cols.omega_flat_nminus1
            - cols.omega_sharp_nminus1 * cols.omega_flat_n)

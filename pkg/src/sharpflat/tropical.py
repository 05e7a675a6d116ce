"""Valuation matrices and their min-plus (tropical) algebra.

A valuation matrix is the entrywise ord_p of a 2x2 matrix evaluated at
zeta_{p^n} - 1.  Products of matrices are estimated from below by the
min-plus product of their valuation matrices; for the level matrices the
left column of that estimate is exact and has a closed form in terms of
v = ord_p(a_p) and geometric tails of p-powers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import (INFINITY, ExtRational, check_odd_prime, ord_p, val_add,
                      val_min, val_to_str)
from .polynomials import IntPolynomial, ord_at_zeta
from .series import PrecisionError, TruncatedSeries
from .matrices import SeriesMatrix, build_A_inv, build_Hn, build_completed_Hn, _c_matrix

__all__ = [
    "ValuationMatrix",
    "valuation_of_matrix_at_zeta",
    "minplus_mul",
    "lemma_left_column",
    "lemma_brute_force_check",
    "LemmaReport",
    "completed_agreement_report",
    "CompletedEntryComparison",
]


@dataclass(frozen=True)
class ValuationMatrix:
    """2x2 matrix of extended-rational valuations."""

    e11: ExtRational
    e12: ExtRational
    e21: ExtRational
    e22: ExtRational

    @staticmethod
    def tropical_identity() -> "ValuationMatrix":
        zero = Fraction(0)
        return ValuationMatrix(zero, INFINITY, INFINITY, zero)

    def left_column(self) -> tuple[ExtRational, ExtRational]:
        return (self.e11, self.e21)

    def minplus(self, other: "ValuationMatrix") -> "ValuationMatrix":
        a, b, c, d = self.e11, self.e12, self.e21, self.e22
        a2, b2, c2, d2 = other.e11, other.e12, other.e21, other.e22
        return ValuationMatrix(
            val_min(val_add(a, a2), val_add(b, c2)),
            val_min(val_add(a, b2), val_add(b, d2)),
            val_min(val_add(c, a2), val_add(d, c2)),
            val_min(val_add(c, b2), val_add(d, d2)),
        )

    def entrywise_ge(self, other: "ValuationMatrix") -> bool:
        return all(s >= o for s, o in zip(
            (self.e11, self.e12, self.e21, self.e22),
            (other.e11, other.e12, other.e21, other.e22)))

    def to_json(self) -> dict:
        return {
            "e11": val_to_str(self.e11),
            "e12": val_to_str(self.e12),
            "e21": val_to_str(self.e21),
            "e22": val_to_str(self.e22),
        }


def minplus_mul(v: ValuationMatrix, w: ValuationMatrix) -> ValuationMatrix:
    """Standard 2x2 tropical product: (i,j) -> min_k v(i,k) + w(k,j)."""
    return v.minplus(w)


def valuation_of_matrix_at_zeta(m: SeriesMatrix, p: int, n: int) -> ValuationMatrix:
    """Entrywise ord_p at zeta_{p^n} - 1 for polynomial or truncated entries."""
    vals = []
    for entry in m.entries():
        if isinstance(entry, TruncatedSeries):
            vals.append(entry.ord_at_zeta(n))
        elif isinstance(entry, IntPolynomial):
            vals.append(ord_at_zeta(entry, p, n))
        else:
            raise TypeError(f"unsupported matrix entry type {type(entry).__name__}")
    return ValuationMatrix(*vals)


def _geometric_tail(p: int, exponents: range) -> Fraction:
    """sum of p^(-e) over the given exponents (empty sum = 0)."""
    return sum((Fraction(1, p**e) for e in exponents), Fraction(0))


def lemma_left_column(p: int, n: int, v: ExtRational, strict: bool = True,
                      ) -> tuple[ExtRational, ExtRational]:
    """Closed form of the left column of the level-n valuation matrix.

    For n even: (v + p^-2 + p^-4 + ... + p^(2-n),  p^-1 + p^-3 + ... + p^(1-n));
    for odd n >= 3 the two rows trade places (sums ending at p^(2-n) on top,
    v + ... + p^(1-n) below).  n = 1 is degenerate: the chain of lower-left
    entries is empty and the a_p-dependence cancels out of the left column
    exactly, leaving (0, INFINITY) for every v.

    The closed form is proved only for v = 1 and v = INFINITY; other v raise
    in strict mode and otherwise fall back to the min-plus chain.
    """
    check_odd_prime(p)
    if n < 1:
        raise ValueError("lemma_left_column requires n >= 1")
    if not (v is INFINITY or v == 1):
        if strict:
            raise ValueError(
                f"closed form is proved for v in {{1, inf}} only, got {v}; "
                "rerun in non-strict mode for the min-plus chain value")
        return _minplus_chain(p, n, v).left_column()
    if n == 1:
        return (Fraction(0), INFINITY)
    if n % 2 == 0:
        top = val_add(v, _geometric_tail(p, range(2, n - 1, 2)))
        bottom = _geometric_tail(p, range(1, n, 2))
    else:
        top = _geometric_tail(p, range(1, n - 1, 2))
        bottom = val_add(v, _geometric_tail(p, range(2, n, 2)))
    return (top, bottom)


def _factor_valuations(p: int, a_p: int, n: int) -> list[ValuationMatrix]:
    """Valuation matrices of C_1, ..., C_n, -A^{-1} at zeta_{p^n} - 1."""
    factors = [valuation_of_matrix_at_zeta(_c_matrix(p, a_p, i), p, n)
               for i in range(1, n + 1)]
    factors.append(valuation_of_matrix_at_zeta(-build_A_inv(p, a_p), p, n))
    return factors


def _minplus_chain(p: int, n: int, v: ExtRational) -> ValuationMatrix:
    """Chain of the factor valuation matrices for a given v = ord_p(a_p)."""
    factors = []
    for i in range(1, n):
        factors.append(ValuationMatrix(v, Fraction(0), Fraction(1, p ** (n - i)), INFINITY))
    factors.append(ValuationMatrix(v, Fraction(0), INFINITY, INFINITY))
    factors.append(ValuationMatrix(INFINITY, Fraction(0), Fraction(0), v))
    acc = ValuationMatrix.tropical_identity()
    for f in factors:
        acc = acc.minplus(f)
    return acc


@dataclass(frozen=True)
class LemmaReport:
    """Three-way computation of the level-n valuation matrix.

    ``direct`` and ``minplus`` are full matrices; the closed form only
    speaks about the left column.  Agreement flags compare left columns:
    the right column of the direct matrix is identically INFINITY at level
    n (it carries the factor Phi_n), which the min-plus estimate cannot
    see, so it is reported but not compared.
    """

    p: int
    a_p: int
    n: int
    v: ExtRational
    direct: ValuationMatrix
    minplus: ValuationMatrix
    closed_form: tuple[ExtRational, ExtRational] | None
    closed_form_is_chain_fallback: bool

    @property
    def direct_equals_minplus(self) -> bool:
        return self.direct.left_column() == self.minplus.left_column()

    @property
    def closed_form_agrees(self) -> bool:
        if self.closed_form is None:
            return False
        return self.closed_form == self.direct.left_column()

    @property
    def all_agree(self) -> bool:
        return self.direct_equals_minplus and self.closed_form_agrees

    @property
    def ultrametric_sound(self) -> bool:
        return self.direct.entrywise_ge(self.minplus)

    def to_json(self) -> dict:
        return {
            "prime": self.p,
            "ap": self.a_p,
            "level": self.n,
            "v": val_to_str(self.v),
            "direct": self.direct.to_json(),
            "minPlus": self.minplus.to_json(),
            "closedFormLeftColumn": (
                None if self.closed_form is None
                else [val_to_str(self.closed_form[0]), val_to_str(self.closed_form[1])]),
            "closedFormIsChainFallback": self.closed_form_is_chain_fallback,
            "agree": {
                "directVsMinPlus": self.direct_equals_minplus,
                "closedFormVsDirect": self.closed_form_agrees,
                "all": self.all_agree,
                "ultrametricSound": self.ultrametric_sound,
            },
        }


def lemma_brute_force_check(p: int, a_p: int, n: int) -> LemmaReport:
    """Compute the level-n valuation matrix three ways and compare.

    (a) direct entrywise valuations through the resultant oracle,
    (b) min-plus product of the factor valuation matrices,
    (c) the closed-form left column.
    Disagreements are reported, never raised.
    """
    check_odd_prime(p)
    if n < 1:
        raise ValueError("level must be >= 1")
    h = build_Hn(p, a_p, n, warn_weil=False)
    direct = valuation_of_matrix_at_zeta(h, p, n)
    factors = _factor_valuations(p, a_p, n)
    acc = ValuationMatrix.tropical_identity()
    for f in factors:
        acc = acc.minplus(f)
    v = ord_p(a_p, p)
    fallback = not (v is INFINITY or v == 1)
    closed = lemma_left_column(p, n, v, strict=False)
    return LemmaReport(
        p=p, a_p=a_p, n=n, v=v,
        direct=direct, minplus=acc,
        closed_form=closed,
        closed_form_is_chain_fallback=fallback,
    )


@dataclass(frozen=True)
class CompletedEntryComparison:
    """One entry of the completed-vs-plain comparison at zeta_{p^m}-1.

    ``status`` is "equal" for certified equal finite valuations;
    "infinite-window" when the plain entry vanishes identically at the
    test point and the completed window is consistent with that (all-zero
    residues, or valuation pushed beyond the certification bound);
    "undecided" when the plain value is finite but the window could not
    certify a value (precision/cap too small); "mismatch" otherwise.
    """

    m: int
    position: str
    plain: ExtRational
    completed: ExtRational | None
    completed_bound: Fraction | None
    status: str

    @property
    def agrees(self) -> bool:
        return self.status in ("equal", "infinite-window")


def completed_agreement_report(p: int, a_p: int, n: int, precision: int, cap: int,
                               ) -> list[CompletedEntryComparison]:
    """Compare valuation matrices of the plain and completed level-n
    matrices at zeta_{p^m} - 1 for every 1 <= m <= n."""
    check_odd_prime(p)
    plain = build_Hn(p, a_p, n, warn_weil=False)
    completed = build_completed_Hn(p, a_p, n, precision, cap)
    positions = ("e11", "e12", "e21", "e22")
    rows: list[CompletedEntryComparison] = []
    for m in range(1, n + 1):
        plain_vm = valuation_of_matrix_at_zeta(plain, p, m)
        for pos in positions:
            plain_val = getattr(plain_vm, pos)
            entry: TruncatedSeries = getattr(completed, pos)
            completed_val: ExtRational | None
            bound: Fraction | None = None
            try:
                completed_val = entry.ord_at_zeta(m)
            except PrecisionError as exc:
                completed_val = None
                bound = exc.bound
            if completed_val is None:
                status = "infinite-window" if plain_val is INFINITY else "undecided"
            elif completed_val is INFINITY:
                status = "infinite-window" if plain_val is INFINITY else "mismatch"
            else:
                status = "equal" if completed_val == plain_val else "mismatch"
            rows.append(CompletedEntryComparison(
                m=m, position=pos, plain=plain_val,
                completed=completed_val, completed_bound=bound, status=status))
    return rows

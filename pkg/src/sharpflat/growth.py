"""Growth bookkeeping: q-sequences, asymptotic order increments, and the
closed-form total with its floor identity.

Two parity conventions for attaching sharp/flat to odd/even levels are in
circulation; ``body`` (sharp at odd n, the one the selection algorithm
uses) is the default and ``intro`` swaps the parities.  The discrepancy is
surfaced through the convention flag, never reconciled silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .scalars import INFINITY, Infinity, check_odd_prime, val_to_str

__all__ = [
    "SHARP",
    "FLAT",
    "BODY",
    "INTRO",
    "GrowthParams",
    "PerrinRiouParams",
    "q_value",
    "q_alternating",
    "growth_branch",
    "growth_increment",
    "perrin_riou_total",
    "footnote_identity_check",
    "dictionary_crosscheck",
]

SHARP = "sharp"
FLAT = "flat"
BODY = "body"
INTRO = "intro"

MuValue = Union[int, Infinity]


def _check_star(star: str):
    if star not in (SHARP, FLAT):
        raise ValueError(f"star must be '{SHARP}' or '{FLAT}', got {star!r}")


def _check_convention(convention: str):
    if convention not in (BODY, INTRO):
        raise ValueError(f"convention must be '{BODY}' or '{INTRO}', got {convention!r}")


def q_value(p: int, n: int, star: str) -> int:
    """q_n^sharp / q_n^flat by the floor forms.

    sharp: [p^n/(p+1)] at odd n, extended to even n by q_n := q_{n+1};
    flat:  [p^n/(p+1)] at even n, extended to odd n the same way.
    """
    check_odd_prime(p)
    if n < 0:
        raise ValueError("q_value requires n >= 0")
    _check_star(star)
    native_parity = 1 if star == SHARP else 0
    if n % 2 == native_parity:
        return p**n // (p + 1)
    return p ** (n + 1) // (p + 1)


def q_alternating(p: int, n: int, star: str) -> int:
    """The alternating-sum forms of the same sequences (independent route).

    sharp: p^(n-1) - p^(n-2) + ... + p^2 - p       (n odd; empty below n=3)
           p^n - p^(n-1) + ... + p^2 - p           (n even)
    flat:  p^n - p^(n-1) + ... - p^2 + p - 1       (n odd)
           p^(n-1) - p^(n-2) + ... + p - 1         (n even)
    """
    check_odd_prime(p)
    if n < 0:
        raise ValueError("q_alternating requires n >= 0")
    _check_star(star)
    if star == SHARP:
        top = n - 1 if n % 2 == 1 else n
        low = 1
    else:
        top = n if n % 2 == 1 else n - 1
        low = 0
    total = 0
    for j in range(top, low - 1, -1):
        sign = 1 if (top - j) % 2 == 0 else -1
        total += sign * p**j
    return total


@dataclass(frozen=True)
class GrowthParams:
    """Inputs of the order-growth formula.

    mu values may be INFINITY (non-torsion side); at least one must be
    finite.  lambda values are read only when the matching mu is finite.
    """

    p: int
    a_p_zero: bool
    mu_sharp: MuValue
    lambda_sharp: int
    mu_flat: MuValue
    lambda_flat: int
    r_infinity: int = 0
    eta_trivial: bool = True

    def __post_init__(self):
        check_odd_prime(self.p)
        if self.mu_sharp is INFINITY and self.mu_flat is INFINITY:
            raise ValueError("at least one of mu_sharp, mu_flat must be finite")
        if self.r_infinity < 0:
            raise ValueError("r_infinity must be >= 0")

    def pair(self, star: str) -> tuple[MuValue, int]:
        _check_star(star)
        if star == SHARP:
            return (self.mu_sharp, self.lambda_sharp)
        return (self.mu_flat, self.lambda_flat)


def _parity_star(n: int, convention: str) -> str:
    """sharp at odd n under the body convention, at even n under intro."""
    _check_convention(convention)
    if convention == BODY:
        return SHARP if n % 2 == 1 else FLAT
    return SHARP if n % 2 == 0 else FLAT


def growth_branch(params: GrowthParams, n: int, convention: str = BODY) -> str:
    """Side the increment formula reads at level n: the parity rule when
    a_p = 0 or the mu-invariants agree, otherwise the smaller mu."""
    _check_convention(convention)
    if params.a_p_zero or params.mu_sharp == params.mu_flat:
        return _parity_star(n, convention)
    if params.mu_sharp < params.mu_flat:
        return SHARP
    return FLAT


def growth_increment(params: GrowthParams, n: int, convention: str = BODY) -> int:
    """Asymptotic-formula value of e_n - e_{n-1} at level n.

    Three-case dispatch through growth_branch, with the +1 correction on
    the sharp branch when a_p = 0 and eta is nontrivial.  The formula is an
    asymptotic statement; this evaluates it at any n >= 1 and leaves the
    threshold judgment to the caller.
    """
    if n < 1:
        raise ValueError("growth_increment requires n >= 1")
    p = params.p
    star = growth_branch(params, n, convention)
    mu, lam = params.pair(star)
    if mu is INFINITY:
        raise ValueError(
            f"the {star} branch is selected at n={n} but its mu-invariant is infinite")
    correction = 1 if (params.a_p_zero and not params.eta_trivial and star == SHARP) else 0
    return ((p**n - p ** (n - 1)) * mu + lam - params.r_infinity
            + q_value(p, n, star) + correction)


@dataclass(frozen=True)
class PerrinRiouParams:
    """Constants of the closed-form total: two (mu, lambda) pairs, the
    stabilized rank s, and a free rational nu."""

    mu_plus: int
    mu_minus: int
    lambda_plus: int
    lambda_minus: int
    s: int = 0
    nu: Fraction = Fraction(0)

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("s must be >= 0")


def _pr_total(pr: PerrinRiouParams, p: int, n: int, minus_offset: int) -> Fraction:
    if n < 0:
        raise ValueError("level must be >= 0")
    half_down = n // 2
    half_up = (n + 1) // 2
    total = Fraction(p ** (2 * half_down + 1), p + 1) * pr.mu_plus
    total += Fraction(p ** (2 * half_up + 1 - minus_offset), p + 1) * pr.mu_minus
    total += p ** (n + 1) // (p * p - 1)
    total += (pr.lambda_plus - pr.s) * half_down
    total += (pr.lambda_minus - pr.s) * half_up
    total += pr.nu
    return total


def perrin_riou_total(pr: PerrinRiouParams, p: int, n: int) -> Fraction:
    """The closed-form total

    p^(2[n/2]+1)/(p+1) mu+ + p^(2[(n+1)/2]+1)/(p+1) mu- + [p^(n+1)/(p^2-1)]
    + (lambda+ - s)[n/2] + (lambda- - s)[(n+1)/2] + nu,

    evaluated with exact rationals and integer floors.
    """
    check_odd_prime(p)
    return _pr_total(pr, p, n, minus_offset=0)


def footnote_identity_check(p: int, n_max: int) -> dict:
    """Check [p^(n+1)/(p^2-1)] - [p^n/(p^2-1)] = q_n^sharp + 1 (odd n) or
    q_n^flat (even n) for 1 <= n <= n_max; violations are reported."""
    check_odd_prime(p)
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    rows = []
    ok = True
    for n in range(1, n_max + 1):
        diff = p ** (n + 1) // (p * p - 1) - p**n // (p * p - 1)
        if n % 2 == 1:
            expected = q_value(p, n, SHARP) + 1
            expected_desc = "q_sharp+1"
        else:
            expected = q_value(p, n, FLAT)
            expected_desc = "q_flat"
        match = diff == expected
        ok = ok and match
        rows.append({
            "n": n,
            "floorDifference": diff,
            "expected": expected,
            "expectedForm": expected_desc,
            "matches": match,
        })
    return {"prime": p, "rows": rows, "allMatch": ok}


def dictionary_crosscheck(params: GrowthParams, p: int, n_range: range,
                          pr: PerrinRiouParams | None = None) -> dict:
    """Diagnostic comparison of the closed-form total's increments with the
    level-increment formula, under the invariant dictionary.

    The dictionary sets mu+ = mu_sharp, mu- = mu_flat, lambda+ =
    lambda_sharp, lambda- = lambda_flat - 1 and s = r_infinity (nu cancels
    in differences).  Because the normalization of the mu- weight is
    under-specified, the comparison is run over both parity conventions
    and over an exponent offset in {0, 1} applied to the mu- term; the
    combinations with full agreement across the range are recorded.  This
    is a report, not an assertion.
    """
    check_odd_prime(p)
    if params.mu_sharp is INFINITY or params.mu_flat is INFINITY:
        raise ValueError("the dictionary needs both mu-invariants finite")
    if pr is None:
        pr = PerrinRiouParams(
            mu_plus=int(params.mu_sharp),
            mu_minus=int(params.mu_flat),
            lambda_plus=params.lambda_sharp,
            lambda_minus=params.lambda_flat - 1,
            s=params.r_infinity,
            nu=Fraction(0),
        )
    tables = []
    agreements = []
    for convention in (BODY, INTRO):
        for offset in (0, 1):
            rows = []
            all_agree = True
            for n in n_range:
                if n < 1:
                    continue
                pr_diff = _pr_total(pr, p, n, offset) - _pr_total(pr, p, n - 1, offset)
                inc = growth_increment(params, n, convention)
                agree = pr_diff == inc
                all_agree = all_agree and agree
                rows.append({
                    "n": n,
                    "totalDifference": val_to_str(Fraction(pr_diff)),
                    "increment": inc,
                    "agree": agree,
                })
            tables.append({
                "convention": convention,
                "muMinusExponentOffset": offset,
                "rows": rows,
                "allAgree": all_agree,
            })
            if all_agree:
                agreements.append({"convention": convention, "muMinusExponentOffset": offset})
    return {
        "prime": p,
        "dictionary": {
            "muPlus": pr.mu_plus,
            "muMinus": pr.mu_minus,
            "lambdaPlus": pr.lambda_plus,
            "lambdaMinus": pr.lambda_minus,
            "s": pr.s,
        },
        "tables": tables,
        "fullAgreementChoices": agreements,
    }

"""Iwasawa invariants, the two level-rank notions, and the modesty selection.

The two ranks are computed along genuinely different routes: the
characteristic rank scales a single valuation at zeta_{p^n}-1, while the
length-difference rank subtracts p-adic valuations of resultants against
consecutive annihilators omega_n.  Their agreement (above the lambda
threshold) is one of the package's standing cross-checks.

Synthetic sharp/flat series pairs stand in for the image of a global class
under the two projection maps: any (mu, lambda) pair is realized as
p^mu * (distinguished of degree lambda) * unit, which is exactly the shape
the selection proposition quantifies over.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

from .scalars import INFINITY, ExtRational, Infinity, check_odd_prime, ord_p, val_to_str
from .polynomials import (IntPolynomial, euler_phi_pn, omega, ord_at_zeta, phi,
                          resultant)
from .series import PrecisionError, TruncatedSeries
from .matrices import SharpFlatColumns, build_Hn, extract_columns
from .growth import FLAT, SHARP, q_value
from .tropical import lemma_left_column

__all__ = [
    "InvariantPair",
    "SyntheticColemanPair",
    "VanishesAtZeta",
    "weierstrass_invariants",
    "upsilon_n",
    "nabla_by_lengths",
    "weierstrass_agreement_onset",
    "modesty_select",
    "sample_invariant_series",
    "sample_coleman_pair",
    "build_M_generator",
    "nabla_M",
    "ModestyCell",
    "modesty_proposition_report",
]


class VanishesAtZeta(ValueError):
    """The series vanishes at the evaluation point, so no finite rank exists."""


@dataclass(frozen=True)
class InvariantPair:
    """(mu, lambda) of a nonzero series; mu = INFINITY for the zero series,
    in which case lambda carries no meaning and is None."""

    mu: Union[int, Infinity]
    lam: Optional[int]

    def to_json(self) -> dict:
        return {
            "mu": "inf" if self.mu is INFINITY else self.mu,
            "lambda": self.lam,
        }


@dataclass(frozen=True)
class SyntheticColemanPair:
    """A sharp/flat pair of test series standing in for projected classes."""

    f_sharp: IntPolynomial
    f_flat: IntPolynomial
    p: int


def weierstrass_invariants(f: Union[IntPolynomial, TruncatedSeries], p: int,
                           ) -> InvariantPair:
    """mu = minimal coefficient valuation, lambda = first index attaining it.

    For truncated input the answer is certified only when some stored
    residue is nonzero mod p^N; otherwise precision is exhausted and a
    PrecisionError is raised instead of a guess.
    """
    if isinstance(f, TruncatedSeries):
        if f.p != p:
            raise ValueError("series prime does not match")
        if f.is_zero_to_precision():
            raise PrecisionError(
                "all inspected coefficients have valuation >= precision; "
                "mu/lambda not decidable", bound=Fraction(f.precision))
        coeffs = f.coeffs
    else:
        if f.is_zero():
            return InvariantPair(mu=INFINITY, lam=None)
        coeffs = f.coeffs
    best: Optional[int] = None
    best_index = -1
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        v = int(ord_p(c, p))
        if best is None or v < best:
            best = v
            best_index = i
            if best == 0:
                break
    assert best is not None
    return InvariantPair(mu=best, lam=best_index)


def upsilon_n(f: IntPolynomial, p: int, n: int) -> int:
    """Characteristic rank: phi(p^n) * ord_p(f(zeta_{p^n}-1)).

    The scaled valuation is the valuation of a norm, hence an integer.
    """
    w = ord_at_zeta(f, p, n)
    if w is INFINITY:
        raise VanishesAtZeta(f"series vanishes at zeta_(p^{n})-1")
    scaled = w * euler_phi_pn(p, n)
    assert scaled.denominator == 1, "conjugate-sum valuation must be integral"
    return int(scaled)


def nabla_by_lengths(f: IntPolynomial, p: int, n: int) -> int:
    """Length-difference rank of the cyclic tower: the level-m length is
    ord_p Res(omega_m, f), and the rank is the n vs n-1 difference."""
    check_odd_prime(p)
    if n < 1:
        raise ValueError("nabla_by_lengths requires n >= 1")
    if f.is_zero():
        raise VanishesAtZeta("zero series has no finite lengths")
    res_n = resultant(omega(p, n), f)
    res_prev = resultant(omega(p, n - 1), f)
    if res_n == 0 or res_prev == 0:
        raise ValueError("series is not coprime to omega_n; lengths are infinite")
    return int(ord_p(res_n, p)) - int(ord_p(res_prev, p))


def weierstrass_agreement_onset(f: IntPolynomial, p: int, n_max: int) -> Optional[int]:
    """Smallest n <= n_max from which upsilon_n = phi(p^n)*mu + lambda holds
    through n_max, verified rather than assumed; None if it never sets in."""
    inv = weierstrass_invariants(f, p)
    if inv.mu is INFINITY:
        raise VanishesAtZeta("zero series")
    onset: Optional[int] = None
    for n in range(1, n_max + 1):
        expected = euler_phi_pn(p, n) * int(inv.mu) + inv.lam
        if upsilon_n(f, p, n) == expected:
            if onset is None:
                onset = n
        else:
            onset = None
    return onset


def modesty_select(mu_sharp: Union[int, Infinity], mu_flat: Union[int, Infinity],
                   a_p_zero: bool, n: int) -> str:
    """Choose the growth-governing side.

    Parity rule (sharp at odd n, flat at even n) when a_p = 0 or the
    mu-invariants agree; otherwise the side with the smaller mu.
    """
    if mu_sharp is INFINITY and mu_flat is INFINITY:
        raise ValueError("no torsion side: both mu-invariants are infinite")
    if a_p_zero or mu_sharp == mu_flat:
        return SHARP if n % 2 == 1 else FLAT
    return SHARP if mu_sharp < mu_flat else FLAT


def _derived_rng(seed: int, *parts) -> random.Random:
    tag = ":".join(str(x) for x in (seed,) + parts)
    digest = hashlib.sha256(tag.encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def sample_invariant_series(p: int, mu: int, lam: int, rng: random.Random,
                            unit_degree: int = 2, avoid_levels: int = 6,
                            ) -> IntPolynomial:
    """p^mu * (monic distinguished of degree lam) * (unit, constant term 1).

    Realizes the exact invariants (mu, lam).  Resamples until the result is
    coprime to X and to phi(p, m) for m <= avoid_levels, so downstream
    length computations stay finite.
    """
    check_odd_prime(p)
    if mu < 0 or lam < 0:
        raise ValueError("invariants must be >= 0")
    while True:
        lower = [p * rng.randrange(1, p * p)] if lam else []
        lower += [p * rng.randrange(0, p * p) for _ in range(lam - 1)]
        dist = IntPolynomial(lower + [1])
        unit = IntPolynomial([1] + [rng.randrange(-3, 4) for _ in range(unit_degree)])
        f = dist * unit * (p**mu)
        if f.coefficient(0) == 0:
            continue
        if any((f % phi(p, m)).is_zero() for m in range(1, avoid_levels + 1)):
            continue
        return f


def sample_coleman_pair(p: int, mu_sharp: int, lam_sharp: int, mu_flat: int,
                        lam_flat: int, rng: random.Random) -> SyntheticColemanPair:
    return SyntheticColemanPair(
        f_sharp=sample_invariant_series(p, mu_sharp, lam_sharp, rng),
        f_flat=sample_invariant_series(p, mu_flat, lam_flat, rng),
        p=p,
    )


def _check_unit(u: int, p: int):
    if u % p == 0:
        raise ValueError(f"u = {u} is divisible by p = {p}, not a unit")


@lru_cache(maxsize=None)
def _columns(p: int, a_p: int, n: int) -> SharpFlatColumns:
    return extract_columns(build_Hn(p, a_p, n, warn_weil=False), p, n)


def build_M_generator(cols: SharpFlatColumns, pair: SyntheticColemanPair,
                      u: int, p: int, n: int) -> IntPolynomial:
    """The displayed generator
    omega_n^s f_s + u omega_n^f f_f + Phi_n omega_{n-1}^s f_s + u Phi_n omega_{n-1}^f f_f."""
    _check_unit(u, p)
    ph = phi(p, n)
    return (cols.omega_sharp_n * pair.f_sharp
            + u * (cols.omega_flat_n * pair.f_flat)
            + ph * cols.omega_sharp_nminus1 * pair.f_sharp
            + u * (ph * cols.omega_flat_nminus1 * pair.f_flat))


def nabla_M(cols: SharpFlatColumns, pair: SyntheticColemanPair, u: int,
            p: int, n: int) -> int:
    """Rank of the generated cyclic module at level n.

    Phi_n vanishes at zeta_{p^n}-1, so only the left-column combination
    omega_n^sharp f_sharp + u omega_n^flat f_flat contributes; the rank is
    phi(p^n) times its valuation there.
    """
    _check_unit(u, p)
    combo = cols.omega_sharp_n * pair.f_sharp + u * (cols.omega_flat_n * pair.f_flat)
    w = ord_at_zeta(combo, p, n)
    if w is INFINITY:
        raise VanishesAtZeta(
            f"left-column combination vanishes at zeta_(p^{n})-1 (u = {u})")
    scaled = w * euler_phi_pn(p, n)
    assert scaled.denominator == 1
    return int(scaled)


@dataclass(frozen=True)
class ModestyCell:
    """One (n, units) cell of the selection-proposition check.

    ``valid`` marks cells inside the asymptotic regime: both lambda values
    below p^(n-1), v = ord_p(a_p) within the {1, inf} dichotomy, and the
    selected side's predicted total strictly minimal (a tie or an inverted
    minimum at small n means the formula is not yet asserted there).
    """

    n: int
    valid: bool
    reason: str
    star: str
    nabla_by_u: dict
    expected: Optional[int]
    u_independent: bool
    passes: Optional[bool]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "valid": self.valid,
            "reason": self.reason,
            "star": self.star,
            "nablaByUnit": {str(u): v for u, v in self.nabla_by_u.items()},
            "expected": self.expected,
            "uIndependent": self.u_independent,
            "passes": self.passes,
        }


def _candidate_totals(p: int, n: int, v: ExtRational,
                      mu_sharp: int, lam_sharp: int, mu_flat: int, lam_flat: int,
                      ) -> tuple[ExtRational, ExtRational]:
    """phi(p^n)-scaled predicted valuations of the two left-column terms."""
    top, bottom = lemma_left_column(p, n, v, strict=False)
    ph = euler_phi_pn(p, n)
    cand_sharp = INFINITY if top is INFINITY else ph * top + ph * mu_sharp + lam_sharp
    cand_flat = INFINITY if bottom is INFINITY else ph * bottom + ph * mu_flat + lam_flat
    return cand_sharp, cand_flat


def modesty_cell(p: int, a_p: int, pair: SyntheticColemanPair, n: int,
                 units: Sequence[int]) -> ModestyCell:
    """Evaluate the selection-proposition identity at one level."""
    inv_sharp = weierstrass_invariants(pair.f_sharp, p)
    inv_flat = weierstrass_invariants(pair.f_flat, p)
    mu_s, lam_s = int(inv_sharp.mu), inv_sharp.lam
    mu_f, lam_f = int(inv_flat.mu), inv_flat.lam
    star = modesty_select(mu_s, mu_f, a_p == 0, n)
    v = ord_p(a_p, p)

    valid = True
    reasons = []
    if not (v is INFINITY or v == 1):
        valid = False
        reasons.append(f"v = {val_to_str(v)} outside the {{1, inf}} dichotomy")
    threshold = p ** (n - 1)
    if lam_s >= threshold or lam_f >= threshold:
        valid = False
        reasons.append(f"lambda >= p^(n-1) = {threshold}")
    cand_s, cand_f = _candidate_totals(p, n, v, mu_s, lam_s, mu_f, lam_f)
    cand_star, cand_other = (cand_s, cand_f) if star == SHARP else (cand_f, cand_s)
    if valid:
        if cand_star is INFINITY:
            valid = False
            reasons.append("selected side predicts infinite valuation")
        elif not (cand_star < cand_other):
            valid = False
            reasons.append("selected side not strictly minimal at this level "
                           f"(candidates {val_to_str(cand_s)} vs {val_to_str(cand_f)})")

    nabla_by_u: dict = {}
    cols = _columns(p, a_p, n)
    for u in units:
        try:
            nabla_by_u[u] = nabla_M(cols, pair, u, p, n)
        except VanishesAtZeta:
            nabla_by_u[u] = None
    u_independent = len({v for v in nabla_by_u.values()}) == 1

    expected: Optional[int] = None
    passes: Optional[bool] = None
    if valid:
        f_star = pair.f_sharp if star == SHARP else pair.f_flat
        expected = q_value(p, n, star) + upsilon_n(f_star, p, n)
        passes = u_independent and all(v == expected for v in nabla_by_u.values())
    return ModestyCell(
        n=n, valid=valid, reason="; ".join(reasons) if reasons else "in range",
        star=star, nabla_by_u=nabla_by_u, expected=expected,
        u_independent=u_independent, passes=passes,
    )


def default_units(a_p: int) -> list[int]:
    """The unit set {1, 2, 1+a_p}, deduplicated in order."""
    units = []
    for u in (1, 2, 1 + a_p):
        if u not in units:
            units.append(u)
    return units


def _cell_task(task: tuple) -> "ModestyCell":
    p, a_p, pair, n, units = task
    return modesty_cell(p, a_p, pair, n, units)


def modesty_proposition_report(p: int, a_p: int, mu_sharp: int, lam_sharp: int,
                               mu_flat: int, lam_flat: int, seed: int,
                               max_n: int, units: Optional[Sequence[int]] = None,
                               map_fn=None) -> dict:
    """Run the selection-proposition check for one invariant tuple.

    Samples a synthetic pair deterministically from (seed, invariants, a_p)
    and evaluates every level n <= max_n with every unit.  Only cells inside
    the validity region assert the identity; the rest are reported.
    ``map_fn`` may fan the per-level cells out to workers; results keep
    input order either way.
    """
    check_odd_prime(p)
    if units is None:
        units = default_units(a_p)
    for u in units:
        _check_unit(u, p)
    rng = _derived_rng(seed, p, a_p, mu_sharp, lam_sharp, mu_flat, lam_flat)
    pair = sample_coleman_pair(p, mu_sharp, lam_sharp, mu_flat, lam_flat, rng)
    tasks = [(p, a_p, pair, n, tuple(units)) for n in range(1, max_n + 1)]
    cells = list((map_fn or map)(_cell_task, tasks))
    all_valid_pass = all(c.passes for c in cells if c.valid)
    return {
        "prime": p,
        "ap": a_p,
        "invariants": {
            "muSharp": mu_sharp, "lambdaSharp": lam_sharp,
            "muFlat": mu_flat, "lambdaFlat": lam_flat,
        },
        "seed": seed,
        "units": list(units),
        "fSharpCoeffs": [str(c) for c in pair.f_sharp.coeffs],
        "fFlatCoeffs": [str(c) for c in pair.f_flat.coeffs],
        "cells": [c.to_json() for c in cells],
        "validCellsPass": all_valid_pass,
    }

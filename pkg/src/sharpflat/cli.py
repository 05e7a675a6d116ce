"""Batch command-line surface.

Every command reads its parameters from flags (with optional key=value
config-file defaults), runs exact computations, and emits an aligned text
table, CSV, or a canonical JSON report embedding the full run
configuration.  Exit codes: 0 success, 1 an asserted check failed, 2 usage
error.  Diagnostic-only comparisons (the dictionary crosscheck) never flip
the exit code.

Set SHARPFLAT_WORKERS=<k> to fan independent grid cells across k worker
processes; results are assembled in input order either way.
"""

from __future__ import annotations

import argparse
import multiprocessing
import os
import sys

from .scalars import INFINITY, val_to_str
from .polynomials import IntPolynomial, omega, phi
from .matrices import build_Hn, column_determinant, extract_columns
from .tropical import (completed_agreement_report, lemma_brute_force_check,
                       valuation_of_matrix_at_zeta)
from .ranks import modesty_proposition_report, weierstrass_invariants
from .growth import (BODY, FLAT, INTRO, SHARP, GrowthParams, q_alternating,
                     q_value, growth_branch, growth_increment,
                     footnote_identity_check, dictionary_crosscheck)
from .serialize import (canonical_json, matrix_to_json, poly_from_json,
                        poly_to_str, render_csv, render_table)

SCHEMA_VERSION = 1
VALMAT_GUARD = 2000

__all__ = ["main"]


class UsageError(Exception):
    """Invalid inputs discovered after argument parsing; exits with code 2."""


def _emit(args, headers, rows, report) -> None:
    fmt = args.format
    if fmt == "json":
        text = canonical_json(report)
    elif fmt == "csv":
        text = render_csv(headers, rows)
    else:
        text = render_table(headers, rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(args, command: str, payload: dict) -> dict:
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "out") and not callable(v)}
    return {"schemaVersion": SCHEMA_VERSION, "command": command,
            "config": config, **payload}


def _parse_mu(text: str):
    if text.strip().lower() == "inf":
        return INFINITY
    return int(text)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("SHARPFLAT_WORKERS", "1")))
    except ValueError:
        return 1


def _map_cells(fn, cells):
    """Apply fn over cells, optionally in parallel; order is preserved."""
    k = _workers()
    if k <= 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with multiprocessing.get_context("fork").Pool(min(k, len(cells))) as pool:
        return pool.map(fn, cells)


# -- qseq ---------------------------------------------------------------


def cmd_qseq(args) -> int:
    rows = []
    ok = True
    for n in range(0, args.max_n + 1):
        qs, qsa = q_value(args.prime, n, SHARP), q_alternating(args.prime, n, SHARP)
        qf, qfa = q_value(args.prime, n, FLAT), q_alternating(args.prime, n, FLAT)
        consistent = qs == qsa and qf == qfa
        ok = ok and consistent
        rows.append([n, qs, qsa, qf, qfa, consistent])
    headers = ["n", "qSharpFloor", "qSharpAlt", "qFlatFloor", "qFlatAlt", "consistent"]
    report = _report(args, "qseq", {
        "rows": [dict(zip(headers, r)) for r in rows],
        "allConsistent": ok,
    })
    _emit(args, headers, rows, report)
    return 0 if ok else 1


# -- valmat -------------------------------------------------------------


def cmd_valmat(args) -> int:
    p, a_p, n = args.prime, args.ap, args.level
    if p**n > VALMAT_GUARD and not args.force:
        raise UsageError(
            f"p^n = {p**n} exceeds the tractability guard {VALMAT_GUARD}; "
            "rerun with --force to proceed anyway")
    rep = lemma_brute_force_check(p, a_p, n)
    headers = ["route", "e11", "e12", "e21", "e22"]
    rows = [
        ["direct"] + [val_to_str(v) for v in
                      (rep.direct.e11, rep.direct.e12, rep.direct.e21, rep.direct.e22)],
        ["minPlus"] + [val_to_str(v) for v in
                       (rep.minplus.e11, rep.minplus.e12, rep.minplus.e21, rep.minplus.e22)],
        ["closedFormLeftColumn", val_to_str(rep.closed_form[0]), "-",
         val_to_str(rep.closed_form[1]), "-"],
    ]
    report = _report(args, "valmat", rep.to_json())
    _emit(args, headers, rows, report)
    dichotomy = rep.v is INFINITY or rep.v == 1
    if not dichotomy:
        if args.format == "table" and not args.out:
            sys.stdout.write(
                f"note: v = {val_to_str(rep.v)} is outside the closed-form "
                "dichotomy; left column above is the min-plus chain value\n")
        return 0 if rep.ultrametric_sound else 1
    return 0 if (rep.all_agree and rep.ultrametric_sound) else 1


# -- growth -------------------------------------------------------------


def _growth_params(args) -> GrowthParams:
    return GrowthParams(
        p=args.prime,
        a_p_zero=args.ap == 0,
        mu_sharp=_parse_mu(args.mu_sharp),
        lambda_sharp=args.lambda_sharp,
        mu_flat=_parse_mu(args.mu_flat),
        lambda_flat=args.lambda_flat,
        r_infinity=args.r_infinity,
        eta_trivial=args.eta == "trivial",
    )


def cmd_growth(args) -> int:
    try:
        params = _growth_params(args)
        increments = []
        for n in range(args.min_n, args.max_n + 1):
            star = growth_branch(params, n, args.convention)
            increments.append((n, star, growth_increment(params, n, args.convention)))
    except ValueError as exc:
        raise UsageError(str(exc))
    rows = []
    cumulative = 0
    for n, star, inc in increments:
        cumulative += inc
        rows.append([n, star, inc, cumulative])
    headers = ["n", "branch", "increment", "cumulative"]
    report = _report(args, "growth", {
        "note": "asymptotic formula value; no threshold for 'large n' is implied",
        "rows": [dict(zip(headers, r)) for r in rows],
    })
    _emit(args, headers, rows, report)
    return 0


# -- prcheck ------------------------------------------------------------


def cmd_prcheck(args) -> int:
    footnote = footnote_identity_check(args.prime, args.max_n)
    headers = ["n", "floorDifference", "expected", "expectedForm", "matches"]
    rows = [[r["n"], r["floorDifference"], r["expected"], r["expectedForm"], r["matches"]]
            for r in footnote["rows"]]
    payload = {"footnote": footnote}
    if args.dictionary:
        params = _growth_params(args)
        payload["dictionaryCrosscheck"] = dictionary_crosscheck(
            params, args.prime, range(max(2, args.min_n), args.max_n + 1))
    report = _report(args, "prcheck", payload)
    _emit(args, headers, rows, report)
    if args.dictionary and args.format == "table" and not args.out:
        found = payload["dictionaryCrosscheck"]["fullAgreementChoices"]
        sys.stdout.write(f"dictionary full-agreement choices: {found}\n")
    return 0 if footnote["allMatch"] else 1


# -- mtest --------------------------------------------------------------


def cmd_mtest(args) -> int:
    units = None
    if args.units:
        units = [int(u) for u in args.units.split(",")]
    rep = modesty_proposition_report(
        args.prime, args.ap, _parse_mu(args.mu_sharp), args.lambda_sharp,
        _parse_mu(args.mu_flat), args.lambda_flat, seed=args.seed,
        max_n=args.max_n, units=units, map_fn=_map_cells)
    headers = ["n", "valid", "star", "nablaByUnit", "expected", "uIndependent",
               "passes", "reason"]
    rows = [[c["n"], c["valid"], c["star"], c["nablaByUnit"], c["expected"],
             c["uIndependent"], c["passes"], c["reason"]] for c in rep["cells"]]
    report = _report(args, "mtest", rep)
    _emit(args, headers, rows, report)
    return 0 if rep["validCellsPass"] else 1


# -- invariants ---------------------------------------------------------


def _load_poly(args) -> IntPolynomial:
    import json as _json

    sources = [s for s in (args.coeffs, args.poly_json, args.poly_file) if s]
    if len(sources) != 1:
        raise UsageError("provide exactly one of --coeffs, --poly-json, --poly-file")
    if args.coeffs:
        f = IntPolynomial(int(c) for c in args.coeffs.split(","))
        if args.p_power:
            f = f * (args.prime**args.p_power)
        return f
    if args.poly_json:
        obj = _json.loads(args.poly_json)
    else:
        with open(args.poly_file) as fh:
            obj = _json.load(fh)
    if args.p_power:
        obj = {**obj, "pPower": args.p_power + int(obj.get("pPower", 0))}
    return poly_from_json(obj, args.prime)


def cmd_invariants(args) -> int:
    f = _load_poly(args)
    inv = weierstrass_invariants(f, args.prime)
    if inv.mu is INFINITY:
        mu_out = "inf"
        certificate = None
    else:
        mu_out = inv.mu
        certificate = {"index": inv.lam, "coefficientValuation": inv.mu}
    headers = ["mu", "lambda"]
    rows = [[mu_out, inv.lam]]
    report = _report(args, "invariants", {
        "mu": mu_out,
        "lambda": inv.lam,
        "certificate": certificate,
    })
    _emit(args, headers, rows, report)
    return 0


# -- hn -----------------------------------------------------------------


def cmd_hn(args) -> int:
    p, a_p, n = args.prime, args.ap, args.level
    h = build_Hn(p, a_p, n, warn_weil=False)
    payload: dict = {"matrix": matrix_to_json(h)}
    ok = True
    if n >= 1:
        cols = extract_columns(h, p, n)
        det_cols = column_determinant(cols)
        prod = IntPolynomial([1])
        for i in range(1, n):
            prod = prod * phi(p, i)
        matches_prod = det_cols == prod
        matches_omega = det_cols == omega(p, n - 1)
        ok = ok and matches_prod
        payload["columnIdentity"] = {
            "matchesPhiProduct": matches_prod,
            "matchesOmegaNminus1": matches_omega,
        }
    if args.eval_at_zeta:
        m = args.eval_at_zeta
        vm = valuation_of_matrix_at_zeta(h, p, m)
        payload["valuationMatrix"] = {"level": m, **vm.to_json()}
        headers = ["entry", "valuation"]
        rows = [["e11", val_to_str(vm.e11)], ["e12", val_to_str(vm.e12)],
                ["e21", val_to_str(vm.e21)], ["e22", val_to_str(vm.e22)]]
    elif args.completed:
        agreement = completed_agreement_report(p, a_p, n, args.precision, args.cap)
        payload["completed"] = {
            "precision": args.precision,
            "cap": args.cap,
            "entriesMod": f"(p^{args.precision}, X^{args.cap})",
            "agreement": [
                {"m": r.m, "position": r.position,
                 "plain": val_to_str(r.plain),
                 "completed": None if r.completed is None else val_to_str(r.completed),
                 "status": r.status}
                for r in agreement],
        }
        ok = ok and all(r.agrees for r in agreement)
        headers = ["m", "position", "plain", "completed", "status"]
        rows = [[r.m, r.position, val_to_str(r.plain),
                 "-" if r.completed is None else val_to_str(r.completed), r.status]
                for r in agreement]
    else:
        headers = ["entry", "polynomial"]
        rows = [["e11", poly_to_str(h.e11)], ["e12", poly_to_str(h.e12)],
                ["e21", poly_to_str(h.e21)], ["e22", poly_to_str(h.e22)]]
    report = _report(args, "hn", payload)
    _emit(args, headers, rows, report)
    return 0 if ok else 1


# -- parser -------------------------------------------------------------


def _add_common(sub, prime_default=3):
    sub.add_argument("--prime", type=int, default=prime_default,
                     help="odd prime p (default %(default)s)")
    sub.add_argument("--format", choices=("table", "csv", "json"), default="table",
                     help="output format (default %(default)s)")
    sub.add_argument("--out", default=None, help="write output to this file")


def _add_growth_invariant_flags(sub):
    sub.add_argument("--mu-sharp", default="0", help="mu_sharp (integer or 'inf')")
    sub.add_argument("--lambda-sharp", type=int, default=0)
    sub.add_argument("--mu-flat", default="0", help="mu_flat (integer or 'inf')")
    sub.add_argument("--lambda-flat", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sharpflat",
        description="Exact sharp/flat Iwasawa invariants, tropical valuation "
                    "matrices, and growth formulas at supersingular primes.")
    parser.add_argument("--config", default=None,
                        help="key=value file supplying flag defaults")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    q = subs.add_parser("qseq", help="q-sequence table: floor vs alternating forms")
    _add_common(q)
    q.add_argument("--max-n", type=int, default=10)
    q.set_defaults(func=cmd_qseq)

    v = subs.add_parser("valmat", help="three-way valuation-matrix comparison")
    _add_common(v)
    v.add_argument("--ap", type=int, default=0)
    v.add_argument("--level", type=int, required=True, help="level n >= 1")
    v.add_argument("--force", action="store_true",
                   help="ignore the p^n tractability guard")
    v.set_defaults(func=cmd_valmat)

    g = subs.add_parser("growth", help="order-growth increment table")
    _add_common(g)
    g.add_argument("--ap", type=int, default=0)
    _add_growth_invariant_flags(g)
    g.add_argument("--r-infinity", type=int, default=0)
    g.add_argument("--eta", choices=("trivial", "nontrivial"), default="trivial")
    g.add_argument("--min-n", type=int, default=1)
    g.add_argument("--max-n", type=int, default=6)
    g.add_argument("--convention", choices=(BODY, INTRO), default=BODY)
    g.set_defaults(func=cmd_growth)

    pr = subs.add_parser("prcheck", help="floor identity table and dictionary diagnostic")
    _add_common(pr)
    pr.add_argument("--ap", type=int, default=0)
    pr.add_argument("--max-n", type=int, default=10)
    pr.add_argument("--min-n", type=int, default=2)
    pr.add_argument("--dictionary", action="store_true",
                    help="also run the diagnostic dictionary crosscheck")
    _add_growth_invariant_flags(pr)
    pr.add_argument("--r-infinity", type=int, default=0)
    pr.add_argument("--eta", choices=("trivial", "nontrivial"), default="trivial")
    pr.add_argument("--convention", choices=(BODY, INTRO), default=BODY)
    pr.set_defaults(func=cmd_prcheck)

    m = subs.add_parser("mtest", help="selection-proposition grid check")
    _add_common(m)
    m.add_argument("--ap", type=int, default=0)
    _add_growth_invariant_flags(m)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--max-n", type=int, default=4)
    m.add_argument("--units", default=None,
                   help="comma-separated units (default 1,2,1+ap deduplicated)")
    m.set_defaults(func=cmd_mtest)

    i = subs.add_parser("invariants", help="mu/lambda of a polynomial")
    _add_common(i)
    i.add_argument("--coeffs", default=None,
                   help="comma-separated integer coefficients, low degree first")
    i.add_argument("--poly-json", default=None, help="polynomial JSON literal")
    i.add_argument("--poly-file", default=None, help="path to polynomial JSON")
    i.add_argument("--p-power", type=int, default=0,
                   help="scale the polynomial by p^k")
    i.set_defaults(func=cmd_invariants)

    h = subs.add_parser("hn", help="level matrix: entries, valuations, completion")
    _add_common(h)
    h.add_argument("--ap", type=int, default=0)
    h.add_argument("--level", type=int, required=True, help="level n >= 0")
    h.add_argument("--eval-at-zeta", type=int, default=None, metavar="M",
                   help="print the valuation matrix at zeta_(p^M)-1 instead")
    h.add_argument("--completed", action="store_true",
                   help="compare against the completed (unit-twisted) matrix")
    h.add_argument("--precision", type=int, default=24)
    h.add_argument("--cap", type=int, default=72)
    h.set_defaults(func=cmd_hn)

    return parser


def _load_config(path: str) -> dict:
    values: dict = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SystemExit(f"bad config line (need key=value): {line!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Read --config (if given) and install its values as parser defaults.

    Flags given on the command line still win: defaults only fill gaps.
    """
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return argv
    values = _load_config(known.config)
    converted = {}
    for key, value in values.items():
        if value.lstrip("-").isdigit():
            converted[key] = int(value)
        elif value in ("true", "false"):
            converted[key] = value == "true"
        else:
            converted[key] = value
    for action in parser._subparsers._group_actions:  # noqa: SLF001
        if isinstance(action, argparse._SubParsersAction):  # noqa: SLF001
            for sub in action.choices.values():
                sub.set_defaults(**{k: v for k, v in converted.items()
                                    if any(a.dest == k for a in sub._actions)})
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    argv = _apply_config(parser, argv)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

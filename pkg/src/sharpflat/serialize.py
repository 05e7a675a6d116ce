"""Wire formats: polynomial JSON, matrix JSON, and canonical report text.

Polynomials travel as {"coeffs": ["c0", "c1", ...]} with decimal strings,
low degree first; an optional "pPower" k means the whole polynomial is
scaled by p^k.  Valuations travel as "num/den" or "inf".  Reports are
serialized canonically (sorted keys, fixed separators) so identical runs
are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Optional

from .polynomials import IntPolynomial
from .matrices import SeriesMatrix

__all__ = [
    "canonical_json",
    "poly_to_json",
    "poly_from_json",
    "poly_to_str",
    "matrix_to_json",
    "render_table",
    "render_csv",
]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def poly_to_json(f: IntPolynomial) -> dict:
    return {"coeffs": [str(c) for c in f.coeffs]}


def poly_from_json(obj: dict, p: Optional[int] = None) -> IntPolynomial:
    if "coeffs" not in obj:
        raise ValueError('polynomial JSON needs a "coeffs" array')
    f = IntPolynomial(int(c) for c in obj["coeffs"])
    k = int(obj.get("pPower", 0))
    if k:
        if p is None:
            raise ValueError('"pPower" requires the prime from the run configuration')
        f = f * (p**k)
    return f


def poly_to_str(f: IntPolynomial) -> str:
    """Human-readable polynomial, constant term first."""
    if f.is_zero():
        return "0"
    parts = []
    for i, c in enumerate(f.coeffs):
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        elif i == 1:
            body = "X" if mag == 1 else f"{mag}*X"
        else:
            body = f"X^{i}" if mag == 1 else f"{mag}*X^{i}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


def matrix_to_json(m: SeriesMatrix) -> dict:
    return {
        "e11": poly_to_json(m.e11),
        "e12": poly_to_json(m.e12),
        "e21": poly_to_json(m.e21),
        "e22": poly_to_json(m.e22),
    }


def render_table(headers: list[str], rows: list[list]) -> str:
    cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = []
    for k, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_csv(headers: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    for row in rows:
        writer.writerow([str(c) for c in row])
    return buf.getvalue()

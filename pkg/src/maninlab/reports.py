"""Canonical artifact serialization.

Floats are written with 12 significant digits, exact rationals as
"num/den" strings, JSON keys sorted; CSV follows RFC 4180 (CRLF, UTF-8).
Identical inputs therefore produce byte-identical artifacts.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction


def fmt12(x: float) -> str:
    return format(float(x), ".12g")


def _canon(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        return float(fmt12(obj))
    if isinstance(obj, complex):
        return {"re": float(fmt12(obj.real)), "im": float(fmt12(obj.imag))}
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if hasattr(obj, "as_dict"):
        return _canon(obj.as_dict())
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    import numpy as np

    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(fmt12(float(obj)))
    return str(obj)


def canonical_json(obj) -> str:
    return json.dumps(_canon(obj), sort_keys=True, indent=2) + "\n"


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(canonical_json(obj))


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)  # RFC 4180 line endings
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(header, rows))


def count_records_rows(records, timings: str = "zero"):
    """CSV rows B, N, seconds for CountRecords."""
    rows = []
    for r in records:
        secs = r.wall_time if timings == "real" else 0.0
        rows.append([fmt12(r.B), r.N, fmt12(secs)])
    return rows


def point_rows(points_with_h, n: int):
    """CSV rows b, a1..an, H."""
    rows = []
    for x, h in points_with_h:
        rows.append([x.b, *list(x.a), fmt12(h)])
    return rows

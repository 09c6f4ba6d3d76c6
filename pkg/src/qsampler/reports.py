"""Machine-readable output: JSON and CSV writers.

Floats are written with 17 significant digits and exact rationals as
``"num/den"`` strings, so reruns are byte-identical and values round-trip.
"""
from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import ProblemInstance, subset_table
from .protocol import OutcomeDistribution
from .spectral import StateMatrix

__all__ = [
    "format_float",
    "format_fraction",
    "dumps",
    "rows_to_csv",
    "matrix_to_csv",
    "samples_to_csv",
    "distribution_to_json",
]


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _scalar(obj):
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, Fraction):
        return json.dumps(format_fraction(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = format_float(float(obj))
        return json.dumps(s) if not math.isfinite(float(obj)) else s
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text for nested dicts/lists of scalars, Fractions and floats."""

    def walk(o, depth):
        pad = " " * (indent * (depth + 1))
        end = " " * (indent * depth)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {walk(v, depth + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list, tuple)) for v in o):
                return "[" + ", ".join(_scalar(v) for v in o) + "]"
            items = [pad + walk(v, depth + 1) for v in o]
            return "[\n" + ",\n".join(items) + "\n" + end + "]"
        return _scalar(o)

    return walk(obj, 0) + "\n"


def _cell(v) -> str:
    if isinstance(v, Fraction):
        return format_fraction(v)
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    if v is None:
        return ""
    return str(v)


def rows_to_csv(header: Sequence[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row[h]) for h in header])
    return buf.getvalue()


def matrix_to_csv(M: StateMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in M.entries:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def samples_to_csv(inst: ProblemInstance, draws: np.ndarray) -> str:
    """Rows ``sample_index,S,T`` with subsets as space-separated sorted elements."""
    table = subset_table(inst)
    labels = [" ".join(str(x) for x in row) for row in table.tolist()]
    lines = ["sample_index,S,T"]
    lines.extend(f"{idx},{labels[i]},{labels[j]}" for idx, (i, j) in enumerate(draws.tolist()))
    return "\n".join(lines) + "\n"


def distribution_to_json(dist: OutcomeDistribution) -> str:
    return dumps({
        "n": dist.inst.n,
        "k": dist.inst.k,
        "pairs": [[i, j, p] for i, j, p in dist.pairs()],
    })


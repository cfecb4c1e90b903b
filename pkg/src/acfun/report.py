"""Verdicts, tables and their deterministic JSON / CSV rendering."""

from __future__ import annotations

import csv
import io
import json
import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .realfn import Dyadic

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class Verdict:
    claim: str
    status: str
    lhs: object = None
    rhs: object = None
    tolerance: object = None
    notes: str = ""

    @classmethod
    def compare(cls, claim, lhs, rhs, tolerance=0, notes="", op="<="):
        """Verdict for ``lhs <op> rhs`` up to ``tolerance``; ``op`` is ``<=``, ``>=`` or ``==``."""
        if op == "<=":
            ok = lhs <= rhs + tolerance
        elif op == ">=":
            ok = lhs >= rhs - tolerance
        elif op == "==":
            ok = abs(lhs - rhs) <= tolerance
        else:
            raise ValueError(op)
        return cls(claim, PASS if ok else FAIL, lhs, rhs, tolerance, notes)

    @classmethod
    def flag(cls, claim, ok: bool, notes="", lhs=None, rhs=None):
        return cls(claim, PASS if ok else FAIL, lhs, rhs, None, notes)

    @property
    def passed(self) -> bool:
        return self.status == PASS


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)

    def add(self, *row):
        self.rows.append(list(row))


@dataclass
class Report:
    tool_version: str
    config: dict
    verdicts: list = field(default_factory=list)
    tables: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_obj(self):
        return {
            "tool_version": self.tool_version,
            "config": self.config,
            "verdicts": [
                {"claim": v.claim, "status": v.status, "lhs": v.lhs, "rhs": v.rhs, "tolerance": v.tolerance, "notes": v.notes}
                for v in self.verdicts
            ],
            "tables": [{"name": t.name, "columns": t.columns, "rows": t.rows} for t in self.tables],
        }


def _float_text(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


# Rationals wider than this are rendered as 17-digit decimals (exponent unbounded).
MAX_EXACT_BITS = 256


def _wide_decimal(q: Fraction) -> str:
    if q == 0:
        return "0"
    with mpmath.workprec(80):
        return mpmath.nstr(mpmath.mpf(q.numerator) / q.denominator, 17, min_fixed=1, max_fixed=0).replace("e+", "e")


def _is_wide(q: Fraction) -> bool:
    return max(q.numerator.bit_length(), q.denominator.bit_length()) > MAX_EXACT_BITS


def _encode(obj, out: list):
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, (Fraction, Dyadic)):
        q = Fraction(obj.numerator, obj.denominator)
        if _is_wide(q):
            out.append(_wide_decimal(q))
        elif q.denominator == 1:
            out.append(str(q.numerator))
        else:
            out.append(f'{{"num": {q.numerator}, "den": {q.denominator}}}')
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_float_text(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)) + ": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    elif isinstance(obj, numbers.Real):
        out.append(_float_text(float(obj)))
    else:
        out.append(json.dumps(str(obj)))


def to_json(report: Report) -> str:
    """Numbers with 17 significant digits; non-integer rationals as ``{"num", "den"}``."""
    out: list = []
    _encode(report.to_obj(), out)
    return "".join(out) + "\n"


def _cell(v) -> str:
    if isinstance(v, (Fraction, Dyadic)):
        q = Fraction(v.numerator, v.denominator)
        return _wide_decimal(q) if _is_wide(q) else str(q)
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def table_csv(t: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(t.columns)
    for row in t.rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def verdict_table(report: Report) -> Table:
    t = Table("verdicts", ["claim", "status", "lhs", "rhs", "tolerance", "notes"])
    for v in report.verdicts:
        t.add(v.claim, v.status, v.lhs, v.rhs, v.tolerance, v.notes)
    return t


def to_csv_tables(report: Report) -> dict:
    """``{table name: csv text}`` with the verdict table first."""
    tables = [verdict_table(report)] + list(report.tables)
    return {t.name: table_csv(t) for t in tables}

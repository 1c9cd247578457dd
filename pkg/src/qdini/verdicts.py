"""Verdicts, diagnostic grids and the windowed trend rule.

A finite window can never certify a limit, so asymptotic claims are reported
with a fixed trend rule: a residual sequence "shrinks" iff its last value is
below half its first value and at least 60 percent of consecutive steps
decrease.  Statuses follow a strict convention: "violated" is reserved for
actual inequality failures beyond tolerance, a +inf inside a hypothesis makes
the verdict "inconclusive", and trend-based conclusions are at most
"consistent" and carry trend_only = true.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

CONSISTENT = "consistent"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

TREND_HALVING = 0.5
TREND_MAJORITY = 0.6
TREND_ZERO_TOL = 1e-12


def residual_shrinks(residuals) -> bool:
    """Fixed trend rule: last < first/2 and >= 60% of steps decrease.

    An all-zero window counts as shrunk; any non-finite entry does not.
    """
    res = [float(r) for r in residuals]
    if not res or any(not math.isfinite(r) for r in res):
        return False
    if max(abs(r) for r in res) <= TREND_ZERO_TOL:
        return True
    if len(res) < 2:
        return False
    steps = len(res) - 1
    # a step that has already reached (numerical) zero counts as decreasing,
    # so exactly-converged plateaus do not defeat the majority rule
    decreases = sum(
        1 for a, b in zip(res, res[1:])
        if b < a or (abs(a) <= TREND_ZERO_TOL and abs(b) <= TREND_ZERO_TOL)
    )
    return res[-1] < TREND_HALVING * res[0] and decreases >= TREND_MAJORITY * steps


def shrinks_toward_zero(values) -> bool:
    """Trend rule plus smallness: the last value must be near zero in scale.

    Used for tail sups, where halving alone is not evidence of vanishing.
    """
    vals = [float(v) for v in values]
    if not residual_shrinks(vals):
        return False
    if max(abs(v) for v in vals) <= TREND_ZERO_TOL:
        return True
    return vals[-1] <= max(0.05 * vals[0], 1e-6)


def windowed_sup(values, n_max: int) -> float:
    """Tail surrogate for a limsup: max over the last ceil(n_max/2) entries."""
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("windowed_sup needs at least one value")
    tail = max(1, math.ceil(n_max / 2))
    return max(vals[-tail:])


def encode_number(x) -> object:
    """JSON-safe scalar: +inf becomes the string 'inf'."""
    v = float(x)
    if math.isinf(v):
        return "inf"
    return v


@dataclass(frozen=True)
class CheckResult:
    """A named boolean hypothesis or inequality check with its worst slack."""

    name: str
    passed: bool
    slack: float = 0.0
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "slack": encode_number(self.slack),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class TrendSummary:
    """A residual sequence over the window with its trend classification."""

    name: str
    residuals: tuple
    shrinks: bool

    @classmethod
    def from_residuals(cls, name: str, residuals) -> "TrendSummary":
        res = tuple(float(r) for r in residuals)
        return cls(name, res, residual_shrinks(res))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "residuals": [encode_number(r) for r in self.residuals],
            "shrinks": self.shrinks,
        }


@dataclass(frozen=True)
class Verdict:
    name: str
    status: str
    hypothesis_checks: tuple = ()
    conclusion_trends: tuple = ()
    trend_only: bool = False
    notes: tuple = ()
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in (CONSISTENT, VIOLATED, INCONCLUSIVE):
            raise ValueError(f"unknown status {self.status!r}")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "trend_only": self.trend_only,
            "hypothesis_checks": [c.to_json() for c in self.hypothesis_checks],
            "conclusion_trends": [t.to_json() for t in self.conclusion_trends],
            "notes": list(self.notes),
            "values": {k: _encode_value(v) for k, v in sorted(self.values.items())},
        }


def _encode_value(v):
    if isinstance(v, (list, tuple)):
        return [_encode_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _encode_value(x) for k, x in sorted(v.items())}
    if isinstance(v, bool) or isinstance(v, str):
        return v
    if isinstance(v, (int,)):
        return v
    return encode_number(v)


def combine_status(hypothesis_ok: bool, inequality_violated: bool, trends_ok: bool) -> str:
    """Shared status logic: inequality failures dominate, then unmet hypotheses."""
    if inequality_violated:
        return VIOLATED
    if not hypothesis_ok:
        return INCONCLUSIVE
    return CONSISTENT if trends_ok else INCONCLUSIVE


@dataclass(frozen=True)
class GridCell:
    n: int
    m: int
    mu: float
    gap: float  # may be +inf
    tail: float  # may be +inf
    flags: tuple = ()


@dataclass(frozen=True)
class DiagnosticsGrid:
    """Per-(n, m) masses, approximation gaps and tail terms."""

    n_range: tuple
    m_range: tuple
    cells: tuple  # GridCell in (n, m) lexicographic order

    def cell(self, n: int, m: int) -> GridCell:
        idx = self.n_range.index(n) * len(self.m_range) + self.m_range.index(m)
        return self.cells[idx]

    def sup_gap_per_m(self) -> dict:
        return {m: max(c.gap for c in self.cells if c.m == m) for m in self.m_range}

    def sup_tail_per_m(self) -> dict:
        return {m: max(c.tail for c in self.cells if c.m == m) for m in self.m_range}

    def to_rows(self):
        for c in self.cells:
            yield {
                "n": c.n,
                "m": c.m,
                "mu": encode_number(c.mu),
                "gap": encode_number(c.gap),
                "tail": encode_number(c.tail),
                "flags": ";".join(c.flags),
            }

    def to_json(self) -> dict:
        return {
            "n_range": list(self.n_range),
            "m_range": list(self.m_range),
            "cells": list(self.to_rows()),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["n", "m", "mu", "gap", "tail", "flags"], lineterminator="\n")
        writer.writeheader()
        for row in self.to_rows():
            writer.writerow(row)
        return buf.getvalue()


def dumps_canonical(obj: dict) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"

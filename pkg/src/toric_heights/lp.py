"""Exact linear programming by Fourier–Motzkin elimination.

Sized for the small systems this package produces (a handful of variables,
a few dozen constraints).  The objective is carried as an extra variable
``t = c.x`` that is never eliminated; after every decision variable has been
projected away, the optimum is the largest lower bound left on ``t``.  A
point attaining it is recovered by back-substitution, always taking the
smallest admissible value, which yields the lexicographically least optimal
point when no equality pivots intervene.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    x: tuple[Fraction, ...] | None = None


Row = tuple[tuple[Fraction, ...], Fraction]  # coefs . x <= rhs


def _normalize(coefs: Sequence[Fraction], rhs: Fraction) -> Row:
    nz = [x for x in coefs if x]
    if not nz:
        return tuple(coefs), rhs
    den = math.lcm(*(x.denominator for x in nz))
    g = math.gcd(*(int(x * den) for x in nz))
    scale = Fraction(den, g)
    return tuple(x * scale for x in coefs), rhs * scale


def _dedupe(rows: list[Row]) -> list[Row]:
    best: dict[tuple, Fraction] = {}
    for coefs, rhs in rows:
        coefs, rhs = _normalize(coefs, rhs)
        if coefs not in best or rhs < best[coefs]:
            best[coefs] = rhs
    return list(best.items())


def _bounds(rows: list[Row], var: int, values: dict[int, Fraction]):
    lo, hi = None, None
    for coefs, rhs in rows:
        a = coefs[var]
        if not a:
            continue
        rest = rhs - sum(coefs[i] * values[i] for i, x in enumerate(coefs) if x and i != var)
        bound = rest / a
        if a > 0:
            hi = bound if hi is None else min(hi, bound)
        else:
            lo = bound if lo is None else max(lo, bound)
    return lo, hi


def linprog_exact(c, a_ub=(), b_ub=(), a_eq=(), b_eq=()) -> LPResult:
    """Minimize ``c.x`` subject to ``a_ub x <= b_ub`` and ``a_eq x == b_eq``."""
    n = len(c)
    t = n  # objective variable index
    width = n + 1
    ineqs: list[Row] = [
        (tuple(Fraction(x) for x in row) + (Fraction(0),), Fraction(b))
        for row, b in zip(a_ub, b_ub)
    ]
    eqs: list[Row] = [
        (tuple(Fraction(x) for x in row) + (Fraction(0),), Fraction(b))
        for row, b in zip(a_eq, b_eq)
    ]
    eqs.append((tuple(Fraction(x) for x in c) + (Fraction(-1),), Fraction(0)))

    # equality substitution: var = (rhs - sum_{o != var} a_o x_o) / a_var
    subs: list[tuple[int, Row]] = []

    def substitute(row: Row, var: int, expr: Row) -> Row:
        coefs, rhs = row
        a = coefs[var]
        if not a:
            return row
        ecoefs, erhs = expr
        p = ecoefs[var]
        new = tuple(x - a * y / p if i != var else Fraction(0)
                    for i, (x, y) in enumerate(zip(coefs, ecoefs)))
        return new, rhs - a * erhs / p

    pending = list(eqs)
    while pending:
        row = pending.pop(0)
        coefs, rhs = row
        cand = [i for i in range(n) if coefs[i]]
        if not cand:
            if coefs[t]:
                val = rhs / coefs[t]
                unit = tuple(Fraction(int(i == t)) for i in range(width))
                ineqs.append((unit, val))
                ineqs.append((tuple(-x for x in unit), -val))
            elif rhs != 0:
                return LPResult("infeasible")
            continue
        var = cand[-1]
        subs.append((var, row))
        pending = [substitute(r, var, row) for r in pending]
        ineqs = [substitute(r, var, row) for r in ineqs]

    eliminated = {v for v, _ in subs}
    order = [i for i in reversed(range(n)) if i not in eliminated]
    stages: list[tuple[int, list[Row]]] = []
    rows = _dedupe(ineqs)
    for var in order:
        stages.append((var, rows))
        pos = [r for r in rows if r[0][var] > 0]
        neg = [r for r in rows if r[0][var] < 0]
        keep = [r for r in rows if not r[0][var]]
        for pc, pr in pos:
            for nc, nr in neg:
                a, b = pc[var], -nc[var]
                coefs = tuple(b * x + a * y for x, y in zip(pc, nc))
                keep.append((coefs, b * pr + a * nr))
        rows = _dedupe(keep)

    for coefs, rhs in rows:
        if not any(coefs) and rhs < 0:
            return LPResult("infeasible")
    values: dict[int, Fraction] = {}
    lo, hi = _bounds(rows, t, values)
    if lo is not None and hi is not None and lo > hi:
        return LPResult("infeasible")
    if lo is None:
        return LPResult("unbounded")
    values[t] = lo

    for var, stage_rows in reversed(stages):
        vlo, vhi = _bounds(stage_rows, var, values)
        values[var] = vlo if vlo is not None else (vhi if vhi is not None else Fraction(0))
    for var, (coefs, rhs) in reversed(subs):
        rest = rhs - sum(coefs[i] * values[i] for i in range(width) if i != var and coefs[i])
        values[var] = rest / coefs[var]
    x = tuple(values.get(i, Fraction(0)) for i in range(n))
    return LPResult("optimal", lo, x)


def feasible_point(a_ub=(), b_ub=(), a_eq=(), b_eq=(), nvars: int | None = None):
    """A point of the polyhedron, or None when it is empty."""
    if nvars is None:
        nvars = len((list(a_ub) or list(a_eq))[0])
    res = linprog_exact([0] * nvars, a_ub, b_ub, a_eq, b_eq)
    return res.x if res.status == "optimal" else None

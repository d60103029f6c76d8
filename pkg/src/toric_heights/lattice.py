"""Exact integer and rational linear algebra.

Matrices are plain sequences of rows.  Integer routines return tuples of
tuples of ``int``; rational routines use :class:`fractions.Fraction`.

Hermite convention: ``hermite_normal_form(m)`` returns ``(h, u)`` with
``u @ m == h``, ``u`` unimodular and ``h`` in row echelon form whose pivots
are positive and whose entries above each pivot lie in ``[0, pivot)``.
The nonzero rows of ``h`` are therefore a canonical basis of the row
lattice of ``m``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .errors import LPError, ToricError
from .lp import linprog_exact

IntMatrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]


def _rows(m) -> list[list]:
    rows = [list(r) for r in m]
    if not rows or not rows[0]:
        raise ToricError("empty-matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ToricError("ragged-matrix")
    return rows


def _freeze(rows) -> tuple:
    return tuple(tuple(r) for r in rows)


def identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(m) -> tuple:
    return tuple(zip(*m))


def matmul(a, b) -> tuple:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a, v) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def primitive(v: Sequence) -> Vector:
    """Scale a rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    den = math.lcm(*(x.denominator for x in fr)) if fr else 1
    ints = [int(x * den) for x in fr]
    g = math.gcd(*ints)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def hermite_normal_form(m) -> tuple[IntMatrix, IntMatrix]:
    a = [[int(x) for x in row] for row in _rows(m)]
    nrows, ncols = len(a), len(a[0])
    u = [list(row) for row in identity(nrows)]
    r = 0
    for j in range(ncols):
        if r == nrows:
            break
        while True:
            nz = [i for i in range(r, nrows) if a[i][j]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][j]))
            a[r], a[piv] = a[piv], a[r]
            u[r], u[piv] = u[piv], u[r]
            clean = True
            for i in range(r + 1, nrows):
                if a[i][j]:
                    q = a[i][j] // a[r][j]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    clean = clean and a[i][j] == 0
            if clean:
                break
        if a[r][j] == 0:
            continue
        if a[r][j] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = a[i][j] // a[r][j]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return _freeze(a), _freeze(u)


def smith_normal_form(m) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(d, u, v)`` with ``u @ m @ v == d`` and d_1 | d_2 | ... >= 0."""
    a = [[int(x) for x in row] for row in _rows(m)]
    nrows, ncols = len(a), len(a[0])
    u = [list(row) for row in identity(nrows)]
    v = [list(row) for row in identity(ncols)]

    def swap_cols(mat, i, j):
        for row in mat:
            row[i], row[j] = row[j], row[i]

    def add_col(mat, dst, src, q):
        # col_dst -= q * col_src
        for row in mat:
            row[dst] -= q * row[src]

    for t in range(min(nrows, ncols)):
        while True:
            entries = [(abs(a[i][j]), i, j) for i in range(t, nrows)
                       for j in range(t, ncols) if a[i][j]]
            if not entries:
                return _freeze(a), _freeze(u), _freeze(v)
            _, pi, pj = min(entries)
            a[t], a[pi] = a[pi], a[t]
            u[t], u[pi] = u[pi], u[t]
            swap_cols(a, t, pj)
            swap_cols(v, t, pj)
            p = a[t][t]
            for i in range(t + 1, nrows):
                if a[i][t]:
                    q = a[i][t] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[t])]
            for j in range(t + 1, ncols):
                if a[t][j]:
                    q = a[t][j] // p
                    add_col(a, j, t, q)
                    add_col(v, j, t, q)
            if any(a[i][t] for i in range(t + 1, nrows)) or any(a[t][j] for j in range(t + 1, ncols)):
                continue
            bad = next(((i, j) for i in range(t + 1, nrows) for j in range(t + 1, ncols)
                        if a[i][j] % p), None)
            if bad is None:
                break
            i = bad[0]
            a[t] = [x + y for x, y in zip(a[t], a[i])]
            u[t] = [x + y for x, y in zip(u[t], u[i])]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return _freeze(a), _freeze(u), _freeze(v)


def smith_invariants(m) -> tuple[int, ...]:
    d, _, _ = smith_normal_form(m)
    return tuple(d[i][i] for i in range(min(len(d), len(d[0]))))


def kernel_basis(m) -> list[Vector]:
    """Basis of the integer kernel ``{x : m @ x == 0}``, Hermite-reduced."""
    rows = _rows(m)
    h, u = hermite_normal_form(transpose(rows))
    ker = [u[i] for i, row in enumerate(h) if not any(row)]
    if not ker:
        return []
    hk, _ = hermite_normal_form(ker)
    return [row for row in hk if any(row)]


def cokernel_order(m) -> int | float:
    """Order of ``Z^rows / m Z^cols``; ``math.inf`` when the map is not onto over Q."""
    rows = _rows(m)
    inv = smith_invariants(rows)
    nonzero = [x for x in inv if x]
    if len(nonzero) < len(rows):
        return math.inf
    return math.prod(nonzero)


# -- rational linear algebra ------------------------------------------------

def rref(m) -> tuple[list[list[Fraction]], list[int]]:
    a = [[Fraction(x) for x in row] for row in m]
    if not a:
        return a, []
    nrows, ncols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for j in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][j] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][j]
        a[r] = [x / p for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][j] != 0:
                f = a[i][j]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(j)
        r += 1
        if r == nrows:
            break
    return a, pivots


def rank(m) -> int:
    if not m or not len(m[0]):
        return 0
    return len(rref(m)[1])


def det(m) -> Fraction:
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ToricError("not-square")
    result = Fraction(1)
    for j in range(n):
        piv = next((i for i in range(j, n) if a[i][j] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != j:
            a[j], a[piv] = a[piv], a[j]
            result = -result
        p = a[j][j]
        result *= p
        for i in range(j + 1, n):
            if a[i][j] != 0:
                f = a[i][j] / p
                a[i] = [x - f * y for x, y in zip(a[i], a[j])]
    return result


def solve(m, b) -> tuple[Fraction, ...] | None:
    """One rational solution of ``m @ x == b`` (free variables set to 0), or None."""
    aug = [list(row) + [bi] for row, bi in zip(m, b)]
    ncols = len(m[0])
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, j in zip(red, pivots):
        x[j] = row[-1]
    return tuple(x)


def inverse(m) -> tuple[tuple[Fraction, ...], ...]:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ToricError("singular-matrix")
    return tuple(tuple(row[n:]) for row in red)


def nullspace(m) -> list[tuple[Fraction, ...]]:
    """Rational basis of ``{x : m @ x == 0}``."""
    ncols = len(m[0])
    red, pivots = rref(m)
    basis = []
    for free in (j for j in range(ncols) if j not in pivots):
        x = [Fraction(0)] * ncols
        x[free] = Fraction(1)
        for row, j in zip(red, pivots):
            x[j] = -row[free]
        basis.append(tuple(x))
    return basis


def saturated_span_basis(vectors) -> list[Vector]:
    """Integer basis of ``span_Q(vectors) ∩ Z^n``."""
    vectors = [tuple(v) for v in vectors]
    if not vectors or rank(vectors) == 0:
        return []
    n = len(vectors[0])
    ortho = kernel_basis(vectors)
    if not ortho:
        return list(identity(n))
    return kernel_basis(ortho)


# -- linear programming on cones --------------------------------------------

def minimal_scaling(c, k, gens) -> Fraction:
    """Exact ``inf {a : a*c + k in cone(gens)}``.

    Solved as the LP ``min a`` over ``a*c + k = sum_j lam_j g_j``,
    ``lam >= 0``.
    """
    c = [Fraction(x) for x in c]
    k = [Fraction(x) for x in k]
    gens = [[Fraction(x) for x in g] for g in gens]
    dim, m = len(c), len(gens)
    if len(k) != dim or any(len(g) != dim for g in gens):
        raise ToricError("dimension-mismatch")
    # variables: a, lam_1..lam_m
    obj = [Fraction(1)] + [Fraction(0)] * m
    a_eq = [[-c[i]] + [g[i] for g in gens] for i in range(dim)]
    a_ub = [[Fraction(0)] * (m + 1) for _ in range(m)]
    for j in range(m):
        a_ub[j][j + 1] = Fraction(-1)
    res = linprog_exact(obj, a_ub, [0] * m, a_eq, k)
    if res.status == "unbounded":
        raise LPError("unbounded-below", "scaling has no finite infimum")
    if res.status == "infeasible":
        raise LPError("infeasible", "no scaling puts the point in the cone")
    return res.value

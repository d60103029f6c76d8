"""Rational polyhedral cones: duals, faces, membership and triangulation.

All cones are closed.  Generators are stored as primitive integer vectors in
lexicographic order, so two cones built from the same rays compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import lattice as la
from .errors import ConeError


@dataclass(frozen=True)
class Cone:
    ambient_rank: int
    generators: tuple[tuple[int, ...], ...]

    def __init__(self, ambient_rank: int, generators: Iterable[Sequence]):
        gens = set()
        for g in generators:
            if len(g) != ambient_rank:
                raise ConeError("dimension-mismatch", f"generator {tuple(g)} in rank {ambient_rank}")
            p = la.primitive(g)
            if any(p):
                gens.add(p)
        object.__setattr__(self, "ambient_rank", ambient_rank)
        object.__setattr__(self, "generators", tuple(sorted(gens)))

    @classmethod
    def orthant(cls, k: int) -> "Cone":
        return cls(k, la.identity(k))

    def __repr__(self):
        return f"Cone({self.ambient_rank}, {list(self.generators)})"

    @cached_property
    def dim(self) -> int:
        return la.rank(self.generators) if self.generators else 0

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.ambient_rank

    @property
    def is_simplicial(self) -> bool:
        return len(self.extremal_rays) == self.dim

    @cached_property
    def _span(self) -> "_SpanChart":
        return _SpanChart(self)

    @cached_property
    def facet_normals(self) -> tuple[tuple[int, ...], ...]:
        """Inner normals of the facets (ambient coordinates, full-dimensional cones only)."""
        if not self.is_full_dimensional:
            raise ConeError("not-full-dimensional")
        return _double_description(self.generators, self.ambient_rank)

    @cached_property
    def is_pointed(self) -> bool:
        if not self.generators:
            return True
        chart = self._span
        normals = chart.normals
        return la.rank(normals) == chart.dim if normals else chart.dim == 0

    @cached_property
    def extremal_rays(self) -> tuple[tuple[int, ...], ...]:
        if not self.is_pointed:
            raise ConeError("not-pointed")
        chart = self._span
        rays = []
        for g, y in zip(self.generators, chart.coords):
            tight = [n for n in chart.normals if la.dot(n, y) == 0]
            if chart.dim == 1 or (tight and la.rank(tight) == chart.dim - 1):
                rays.append(g)
        return tuple(rays)

    def contains(self, x: Sequence) -> bool:
        if len(x) != self.ambient_rank:
            raise ConeError("dimension-mismatch")
        y = self._span.chart(x)
        if y is None:
            return False
        return all(la.dot(n, y) >= 0 for n in self._span.normals)

    def contains_interior(self, x: Sequence) -> bool:
        """Strict membership in the relative interior."""
        y = self._span.chart(x)
        if y is None:
            return False
        return all(la.dot(n, y) > 0 for n in self._span.normals)


class _SpanChart:
    """Coordinates on the saturated lattice spanned by a cone's generators."""

    def __init__(self, cone: Cone):
        self.basis = la.saturated_span_basis(cone.generators) if cone.generators else []
        self.dim = len(self.basis)
        self._bt = la.transpose(self.basis) if self.basis else ()
        self.coords = [self.chart(g) for g in cone.generators]
        if self.dim == 0:
            self.normals: tuple = ()
        elif self.dim == 1:
            signs = {c[0] > 0 for c in self.coords}
            self.normals = () if len(signs) > 1 else (((1,),) if True in signs else ((-1,),))
        else:
            self.normals = _double_description([la.primitive(c) for c in self.coords], self.dim)

    def chart(self, x):
        if self.dim == 0:
            return () if not any(x) else None
        sol = la.solve(self._bt, [Fraction(v) for v in x])
        return sol


def _adjacent(zeros_a: set, zeros_b: set, rows, k: int) -> bool:
    common = zeros_a & zeros_b
    if len(common) < k - 2:
        return False
    if k == 2:
        return True
    return la.rank([rows[i] for i in common]) == k - 2


def _double_description(rows: Sequence[Sequence[int]], k: int) -> tuple[tuple[int, ...], ...]:
    """Extreme rays of ``{y : <r, y> >= 0 for r in rows}`` (rows of rank k)."""
    rows = [tuple(r) for r in rows]
    basis_idx: list[int] = []
    for i, r in enumerate(rows):
        if la.rank([rows[j] for j in basis_idx] + [r]) > len(basis_idx):
            basis_idx.append(i)
        if len(basis_idx) == k:
            break
    if len(basis_idx) < k:
        raise ConeError("not-full-dimensional")
    inv = la.inverse([rows[i] for i in basis_idx])
    rays = [la.primitive(col) for col in la.transpose(inv)]
    done = list(basis_idx)
    for i, r in enumerate(rows):
        if i in basis_idx:
            continue
        vals = [la.dot(r, y) for y in rays]
        pos = [y for y, v in zip(rays, vals) if v > 0]
        neg = [y for y, v in zip(rays, vals) if v < 0]
        zero = [y for y, v in zip(rays, vals) if v == 0]
        if not neg:
            done.append(i)
            continue
        zsets = {y: {j for j in done if la.dot(rows[j], y) == 0} for y in pos + neg}
        new = []
        for p in pos:
            for q in neg:
                if _adjacent(zsets[p], zsets[q], rows, k):
                    vp, vq = la.dot(r, p), la.dot(r, q)
                    new.append(la.primitive([vp * b - vq * a for a, b in zip(p, q)]))
        rays = sorted(set(pos + zero + new))
        done.append(i)
    return tuple(sorted(set(rays)))


def dual_cone(c: Cone) -> Cone:
    if not c.is_full_dimensional:
        raise ConeError("not-full-dimensional")
    if not c.is_pointed:
        raise ConeError("not-pointed")
    return Cone(c.ambient_rank, c.facet_normals)


def is_regular(c: Cone) -> bool:
    """True iff the generators are part of a lattice basis."""
    gens = c.generators
    if not gens:
        return True
    if la.rank(gens) < len(gens):
        return False
    return all(x == 1 for x in la.smith_invariants(gens))


@dataclass(frozen=True)
class Face:
    cone: Cone
    active_normals: tuple[int, ...]
    dim: int
    ambient_dim: int = field(default=0)

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim


def minimal_face(c: Cone, x: Sequence) -> Face:
    """Smallest face of a full-dimensional cone ``c`` containing ``x``."""
    if not c.contains(x):
        raise ConeError("point-not-in-cone", f"{tuple(x)}")
    normals = c.facet_normals
    active = tuple(i for i, n in enumerate(normals) if la.dot(n, x) == 0)
    gens = [g for g in c.generators if all(la.dot(normals[i], g) == 0 for i in active)]
    face = Cone(c.ambient_rank, gens)
    return Face(face, active, face.dim, c.dim)


def _facet_normal(vectors, opposite, k: int) -> tuple[int, ...]:
    n = la.primitive(la.kernel_basis(vectors)[0]) if k > 1 else (1,)
    if la.dot(n, opposite) < 0:
        n = tuple(-x for x in n)
    return n


def triangulate(c: Cone, order: Sequence[Sequence[int]] | None = None) -> list[Cone]:
    """Placing triangulation of a pointed full-dimensional cone.

    Only extremal rays are used.  They are placed in ``order`` (default:
    lexicographic); the first independent ones form the starting simplex.
    """
    if not c.is_full_dimensional:
        raise ConeError("not-full-dimensional")
    if not c.is_pointed:
        raise ConeError("not-pointed")
    k = c.ambient_rank
    rays = list(c.extremal_rays)
    if order is not None:
        pos = {la.primitive(v): i for i, v in enumerate(order)}
        rays.sort(key=lambda r: pos.get(r, len(pos)))
    start: list[int] = []
    for i, r in enumerate(rays):
        if la.rank([rays[j] for j in start] + [r]) > len(start):
            start.append(i)
        if len(start) == k:
            break
    simplices = [tuple(sorted(start))]
    for i, p in enumerate(rays):
        if i in start:
            continue
        counts: dict[tuple, list] = {}
        for s in simplices:
            for v in s:
                facet = tuple(x for x in s if x != v)
                counts.setdefault(facet, []).append(v)
        added = []
        for facet, opp in counts.items():
            if len(opp) != 1:
                continue
            n = _facet_normal([rays[j] for j in facet], rays[opp[0]], k)
            if la.dot(n, p) < 0:
                added.append(tuple(sorted(facet + (i,))))
        simplices.extend(added)
    return [Cone(k, [rays[j] for j in s]) for s in simplices]

"""Picard lattice, effective cone and the invariants a(L), b(L) of a toric variety.

For a split toric variety ``Pic = Z^rays / M``, where a character ``m`` maps
to ``(<m, e_i>)_i``.  We pick the projection ``P`` whose rows are the
Hermite-reduced integer relations among the rays; the class of the ray
divisor ``D_i`` is then column ``i`` of ``P``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import lattice as la
from .cones import Cone, minimal_face
from .errors import ToricError
from .fans import Fan, PLFunction, is_projective
from .lp import linprog_exact


@dataclass(frozen=True)
class DivisorClass:
    coords: tuple[Fraction, ...]

    def __init__(self, coords: Sequence):
        object.__setattr__(self, "coords", tuple(Fraction(x) for x in coords))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def scaled(self, t) -> "DivisorClass":
        return DivisorClass([t * x for x in self.coords])

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass([x + y for x, y in zip(self.coords, other.coords)])

    def __neg__(self) -> "DivisorClass":
        return self.scaled(-1)


@dataclass(frozen=True)
class PicardLattice:
    fan: Fan
    rank: int
    projection: tuple[tuple[int, ...], ...]
    section: tuple[tuple[int, ...], ...]

    @property
    def ray_classes(self) -> tuple[tuple[int, ...], ...]:
        return la.transpose(self.projection)

    def project(self, u: Sequence) -> DivisorClass:
        """Class of the divisor ``sum u_i D_i``."""
        return DivisorClass(la.matvec(self.projection, u))

    def lift(self, cls: Sequence) -> tuple[Fraction, ...]:
        """Some ray-coefficient vector whose class is ``cls``."""
        return tuple(Fraction(x) for x in la.matvec(self.section, list(cls)))

    @cached_property
    def effective_cone(self) -> Cone:
        return Cone(self.rank, self.ray_classes)


def picard_lattice(fan: Fan) -> PicardLattice:
    relations = la.kernel_basis(la.transpose(fan.rays))
    rho = len(relations)
    if rho != fan.n_rays - fan.rank:
        raise ToricError("bad-fan", "rays do not span the lattice")
    proj = tuple(tuple(r) for r in relations)
    d, u, v = la.smith_normal_form(proj)
    if any(d[i][i] != 1 for i in range(rho)):
        raise ToricError("bad-fan", "Picard group has torsion")
    section = la.matmul([row[:rho] for row in v], u)
    return PicardLattice(fan, rho, proj, section)


def effective_cone(fan: Fan) -> Cone:
    return picard_lattice(fan).effective_cone


def anticanonical_class(fan: Fan) -> DivisorClass:
    return picard_lattice(fan).project([1] * fan.n_rays)


@dataclass(frozen=True)
class LineBundleData:
    cls: DivisorClass
    a: Fraction
    b: int
    lam: dict[int, Fraction] = field(hash=False)
    I: tuple[int, ...]
    J: tuple[int, ...]
    phi: PLFunction

    def to_dict(self, pic: PicardLattice) -> dict:
        return {
            "rank": pic.rank,
            "effective_cone_generators": [list(g) for g in pic.effective_cone.extremal_rays],
            "anticanonical": [str(x) for x in pic.project([1] * pic.fan.n_rays)],
            "L": [str(x) for x in self.cls],
            "a": str(self.a),
            "b": self.b,
            "lambda": {str(j): str(v) for j, v in sorted(self.lam.items())},
            "I": list(self.I),
            "J": list(self.J),
            "phi_L": [str(x) for x in self.phi.values],
        }


def _positive_combination(classes: list[tuple[int, ...]], target: Sequence[Fraction]) -> list[Fraction]:
    """Coefficients ``lam > 0`` with ``sum lam_j classes_j == target``.

    Maximizes the smallest coefficient (capped at 1) and returns the LP's
    optimal point for that objective.
    """
    m = len(classes)
    # variables lam_1..lam_m, t ; maximize t with lam_j >= t, t <= 1
    obj = [0] * m + [-1]
    a_ub = []
    for j in range(m):
        row = [0] * (m + 1)
        row[j] = -1
        row[m] = 1
        a_ub.append(row)
    a_ub.append([0] * m + [1])
    b_ub = [0] * m + [1]
    a_eq = [[cls[i] for cls in classes] + [0] for i in range(len(target))]
    res = linprog_exact(obj, a_ub, b_ub, a_eq, list(target))
    if res.status != "optimal" or -res.value <= 0:
        raise ToricError("no-positive-representation")
    return list(res.x[:m])


def line_bundle_data(fan: Fan, L: Sequence, pic: PicardLattice | None = None) -> LineBundleData:
    """The invariants ``a(L)``, ``b(L)``, ``lambda``, ``I``, ``J`` and ``phi_L``."""
    pic = pic or picard_lattice(fan)
    L = DivisorClass(L)
    if len(L) != pic.rank:
        raise ToricError("dimension-mismatch", f"class has {len(L)} coordinates, Pic has rank {pic.rank}")
    if not is_projective(fan):
        raise ToricError("non-projective-fan")
    eff = pic.effective_cone
    if not eff.contains_interior(L.coords):
        raise ToricError("L-not-interior", f"{[str(x) for x in L]} is not interior to the effective cone")
    classes = pic.ray_classes
    minus_k = pic.project([1] * fan.n_rays)
    a = la.minimal_scaling(L.coords, [-x for x in minus_k], classes)
    point = [a * x - y for x, y in zip(L.coords, minus_k)]
    face = minimal_face(eff, point)
    b = pic.rank - face.dim
    J = tuple(j for j, c in enumerate(classes) if face.cone.contains(c)) if face.dim else ()
    I = tuple(i for i in range(fan.n_rays) if i not in J)
    lam: dict[int, Fraction] = {}
    if J:
        raw = _positive_combination([classes[j] for j in J], point)
        # rays with equal classes share their weight equally
        groups: dict[tuple[int, ...], list[int]] = {}
        for j in J:
            groups.setdefault(classes[j], []).append(j)
        by_ray = dict(zip(J, raw))
        for members in groups.values():
            avg = sum(by_ray[j] for j in members) / len(members)
            for j in members:
                lam[j] = avg
    values = [(1 + lam.get(i, 0)) / a for i in range(fan.n_rays)]
    return LineBundleData(L, a, b, lam, I, J, PLFunction(fan, values))

"""Complete regular fans and piecewise linear functions on them.

Only the split case is handled: rays are plain primitive lattice vectors and
every maximal cone is simplicial and unimodular.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from . import lattice as la
from .errors import FanValidationError, ToricError
from .lp import feasible_point, linprog_exact

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=True)
class Fan:
    rank: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    @cached_property
    def _inverses(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        # rows w_j with <w_j, e_{sigma_k}> = delta_jk, integral by unimodularity
        out = []
        for cone in self.max_cones:
            inv = la.inverse(la.transpose([self.rays[i] for i in cone]))
            out.append(tuple(tuple(int(x) for x in row) for row in inv))
        return tuple(out)

    def cone_coordinates(self, index: int, x: Sequence) -> tuple:
        """Coefficients of ``x`` on the rays of maximal cone ``index``."""
        return tuple(la.dot(w, x) for w in self._inverses[index])

    def locate(self, x: Sequence) -> int:
        """Index of the first maximal cone containing ``x``."""
        for i in range(len(self.max_cones)):
            if all(c >= 0 for c in self.cone_coordinates(i, x)):
                return i
        raise ToricError("point-not-covered", f"{tuple(x)}")

    @cached_property
    def adjacent_pairs(self) -> tuple[tuple[int, int, tuple[int, ...]], ...]:
        """Triples ``(i, j, facet)`` for maximal cones sharing a codimension-1 face."""
        owners: dict[tuple[int, ...], list[int]] = {}
        for ci, cone in enumerate(self.max_cones):
            for facet in itertools.combinations(cone, self.rank - 1):
                owners.setdefault(facet, []).append(ci)
        return tuple((o[0], o[1], f) for f, o in sorted(owners.items()) if len(o) == 2)

    @cached_property
    def cones(self) -> tuple[tuple[int, ...], ...]:
        """Every cone of the fan (as sorted ray-index tuples), the zero cone first."""
        seen = {()}
        for cone in self.max_cones:
            for r in range(1, len(cone) + 1):
                seen.update(itertools.combinations(cone, r))
        return tuple(sorted(seen, key=lambda c: (len(c), c)))

    def to_raw(self) -> dict:
        return {"rank": self.rank, "rays": [list(r) for r in self.rays],
                "max_cones": [list(c) for c in self.max_cones]}


@dataclass(frozen=True)
class PLFunction:
    fan: Fan
    values: tuple[Fraction, ...]

    def __init__(self, fan: Fan, values: Sequence):
        if len(values) != fan.n_rays:
            raise ToricError("bad-pl-length", f"{len(values)} values for {fan.n_rays} rays")
        object.__setattr__(self, "fan", fan)
        object.__setattr__(self, "values", tuple(Fraction(v) for v in values))

    def linear_form(self, index: int) -> tuple[Fraction, ...]:
        """The ``m_sigma`` agreeing with this function on maximal cone ``index``."""
        cone = self.fan.max_cones[index]
        ws = self.fan._inverses[index]
        d = self.fan.rank
        return tuple(sum(self.values[j] * w[t] for j, w in zip(cone, ws)) for t in range(d))

    @cached_property
    def linear_forms(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(self.linear_form(i) for i in range(len(self.fan.max_cones)))

    def __call__(self, x: Sequence) -> Fraction:
        return evaluate_pl(self, x)

    def __add__(self, other: "PLFunction") -> "PLFunction":
        return PLFunction(self.fan, [a + b for a, b in zip(self.values, other.values)])

    def shifted(self, m: Sequence) -> "PLFunction":
        """``phi + <., m>`` for a character ``m`` of the torus."""
        return PLFunction(self.fan, [u + la.dot(e, m) for u, e in zip(self.values, self.fan.rays)])


def evaluate_pl(phi: PLFunction, x: Sequence) -> Fraction:
    fan = phi.fan
    if len(x) != fan.rank:
        raise ToricError("dimension-mismatch")
    idx = fan.locate(x)
    return sum((c * phi.values[j] for c, j in zip(fan.cone_coordinates(idx, x), fan.max_cones[idx])),
               Fraction(0))


def anticanonical_function(fan: Fan) -> PLFunction:
    return PLFunction(fan, [1] * fan.n_rays)


# -- validation ---------------------------------------------------------------

def _separable(rays, a: Sequence[int], b: Sequence[int]) -> bool:
    """Whether two simplicial cones meet exactly in their common face."""
    common = set(a) & set(b)
    d = len(rays[0])
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for i in set(a) | set(b):
        e = rays[i]
        if i in common:
            a_eq.append(list(e))
            b_eq.append(0)
        elif i in a:
            a_ub.append([-x for x in e])
            b_ub.append(-1)
        else:
            a_ub.append(list(e))
            b_ub.append(-1)
    return feasible_point(a_ub, b_ub, a_eq, b_eq, nvars=d) is not None


def validate_fan(raw: Mapping) -> Fan:
    """Check the fan axioms and build a :class:`Fan`.

    Raises :class:`FanValidationError` listing every violation found.
    """
    try:
        d = int(raw["rank"])
        rays_in = [[int(x) for x in r] for r in raw["rays"]]
        cones_in = [[int(x) for x in c] for c in raw["max_cones"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FanValidationError([f"malformed({exc})"]) from None
    violations: list[str] = []
    if d < 1:
        raise FanValidationError(["malformed(rank)"])
    rays = []
    for i, r in enumerate(rays_in):
        if len(r) != d or not any(r):
            raise FanValidationError([f"malformed(ray {i})"])
        p = la.primitive(r)
        if p != tuple(r):
            log.warning("ray %d %s is not primitive; using %s", i, r, p)
        rays.append(p)
    if len(set(rays)) != len(rays):
        violations.append("duplicate-ray")
    cones = []
    for ci, c in enumerate(cones_in):
        if any(not 0 <= i < len(rays) for i in c) or len(set(c)) != len(c):
            raise FanValidationError([f"malformed(max_cones {ci})"])
        cones.append(tuple(sorted(c)))
    if len(set(cones)) != len(cones):
        violations.append("faces-not-closed(duplicate max cone)")
    if not cones:
        raise FanValidationError(["not-complete"])

    for ci, c in enumerate(cones):
        if len(c) != d or abs(la.det([rays[i] for i in c])) != 1:
            violations.append(f"not-regular({ci})")
    used = {i for c in cones for i in c}
    for i in range(len(rays)):
        if i not in used:
            violations.append(f"faces-not-closed(ray {i} in no cone)")
    if violations:
        raise FanValidationError(violations)

    for (i, a), (j, b) in itertools.combinations(enumerate(cones), 2):
        if not _separable(rays, a, b):
            violations.append(f"bad-intersection({i},{j})")

    owners: dict[tuple[int, ...], list[int]] = {}
    for ci, c in enumerate(cones):
        for facet in itertools.combinations(c, d - 1):
            owners.setdefault(facet, []).append(ci)
    complete = all(len(o) == 2 for o in owners.values())
    if complete:
        reach, frontier = {0}, [0]
        while frontier:
            ci = frontier.pop()
            for o in owners.values():
                if ci in o:
                    for cj in o:
                        if cj not in reach:
                            reach.add(cj)
                            frontier.append(cj)
        complete = len(reach) == len(cones)
    if not complete:
        violations.append("not-complete")
    if violations:
        raise FanValidationError(violations)
    return Fan(d, tuple(rays), tuple(cones))


def is_projective(fan: Fan) -> bool:
    """Whether the fan carries a strictly convex piecewise linear function.

    Maximizes a common slack ``t`` in ``u_i - <e_i, m_sigma(u)> >= t`` over
    all pairs of adjacent maximal cones; the variety is projective iff the
    optimum is positive.  ``u`` is gauge-fixed to vanish on the first cone.
    """
    n = fan.n_rays
    free = [i for i in range(n) if i not in fan.max_cones[0]]
    col = {r: k for k, r in enumerate(free)}
    nv = len(free) + 1  # last variable is the slack
    a_ub, b_ub = [], []
    for ci, cj, facet in fan.adjacent_pairs:
        for s, t in ((ci, cj), (cj, ci)):
            (i,) = set(fan.max_cones[t]) - set(facet)
            # <e_i, m_s(u)> - u_i + slack <= 0
            row = [Fraction(0)] * nv
            for j, w in zip(fan.max_cones[s], fan._inverses[s]):
                if j in col:
                    row[col[j]] += la.dot(w, fan.rays[i])
            if i in col:
                row[col[i]] -= 1
            row[-1] = Fraction(1)
            a_ub.append(row)
            b_ub.append(0)
    cap = [Fraction(0)] * nv
    cap[-1] = Fraction(1)
    a_ub.append(cap)
    b_ub.append(1)
    obj = [0] * (nv - 1) + [-1]
    res = linprog_exact(obj, a_ub, b_ub)
    return res.status == "optimal" and -res.value > 0

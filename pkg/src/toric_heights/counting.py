"""Local zeta factors, point counting by height, exponent fitting.

Counting works for tori of dimension 1 and 2.  If ``phi >= c * |n|_inf``
then every coordinate ``a/b`` of a point of height at most ``B`` has
classical height ``max(|a|, |b|)^2 <= B^(1/c)``; with
``phi >= alpha * |n|_1`` the product of the coordinate heights is at most
``B^(1/alpha)``.  Candidates inside these boxes get a float log-height,
and those within a thin band around a cutoff are re-decided exactly.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ToricError
from .fans import Fan, PLFunction
from .heights import TorusPoint, global_height
from .lp import linprog_exact

log = logging.getLogger(__name__)

BAND = 1e-9  # relative height band that is re-checked exactly
FLOAT_ERR = 1e-12  # bound on the absolute error of a float log-height


# -- local factors ---------------------------------------------------------------

def _check_u(fan: Fan, u: Sequence) -> list:
    if len(u) != fan.n_rays:
        raise ToricError("dimension-mismatch", f"{len(u)} exponents for {fan.n_rays} rays")
    u = [Fraction(x) if not isinstance(x, float) else x for x in u]
    if any(x <= 0 for x in u):
        raise ToricError("divergent", "every exponent must be positive")
    return u


def _p_power(p: int, e):
    """``p ** -e``: exact for integer ``e``, float otherwise."""
    if isinstance(e, Fraction) and e.denominator == 1:
        return Fraction(1, p ** int(e))
    return float(p) ** (-float(e))


def local_zeta_factor(fan: Fan, u: Sequence, p: int):
    """``sum over cones sigma of prod_{j in sigma} p^-u_j / (1 - p^-u_j)``.

    This is the sum of ``p ** -phi_u(n)`` over all lattice points, grouped by
    the cone whose relative interior contains ``n``.
    """
    u = _check_u(fan, u)
    x = [_p_power(p, e) for e in u]
    ratio = [xj / (1 - xj) for xj in x]
    total = 0
    for cone in fan.cones:
        term = 1
        for j in cone:
            term = term * ratio[j]
        total = total + term
    return total


def local_zeta_truncated(fan: Fan, u: Sequence, p: int, radius: int):
    """The lattice sum of ``p ** -phi_u(n)`` over ``|n|_inf <= radius``."""
    u = _check_u(fan, u)
    phi = PLFunction(fan, u) if all(isinstance(x, Fraction) for x in u) else None
    total = 0
    rng = range(-radius, radius + 1)
    for n in itertools.product(rng, repeat=fan.rank):
        if phi is not None:
            total = total + _p_power(p, phi(n))
        else:
            idx = fan.locate(n)
            val = sum(c * u[j] for c, j in zip(fan.cone_coordinates(idx, n), fan.max_cones[idx]))
            total = total + float(p) ** (-float(val))
    return total


# -- count tables -----------------------------------------------------------------

@dataclass(frozen=True)
class CountRow:
    B: Fraction
    N: int
    ties: int = 0


@dataclass(frozen=True)
class CountTable:
    rows: tuple[CountRow, ...]

    def is_monotone(self) -> bool:
        ordered = sorted(self.rows, key=lambda r: r.B)
        return all(x.N <= y.N for x, y in zip(ordered, ordered[1:]))

    def sorted(self) -> "CountTable":
        return CountTable(tuple(sorted(self.rows, key=lambda r: r.B)))

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


@dataclass(frozen=True)
class PoleData:
    a: Fraction
    b: int
    g_at_a: float | None = None
    theta: float | None = None

    def __post_init__(self):
        if self.b < 1:
            raise ToricError("bad-pole-order", f"b = {self.b}")
        if self.a <= 0:
            raise ToricError("bad-exponent", f"a = {self.a}")


# -- enumeration --------------------------------------------------------------------

def _pl_min(phi: PLFunction, extra_eq, extra_ub) -> Fraction | None:
    """Minimum of ``phi`` over ``{x : extra constraints}`` (None if empty)."""
    fan = phi.fan
    best = None
    for idx, ws in enumerate(fan._inverses):
        m = phi.linear_form(idx)
        a_ub = [[-x for x in w] for w in ws] + [r for r, _ in extra_ub]
        b_ub = [0] * len(ws) + [b for _, b in extra_ub]
        res = linprog_exact(m, a_ub, b_ub, [r for r, _ in extra_eq], [b for _, b in extra_eq])
        if res.status == "optimal" and (best is None or res.value < best):
            best = res.value
    return best


def enumeration_constants(phi: PLFunction) -> tuple[Fraction, Fraction]:
    """``(c, alpha)``: minima of ``phi`` on the unit sup-norm and l1-norm spheres."""
    d = phi.fan.rank
    unit = [[int(i == j) for j in range(d)] for i in range(d)]
    c_vals = []
    for i in range(d):
        for sign in (1, -1):
            eq = [([sign * x for x in unit[i]], 1)]
            ub = []
            for k in range(d):
                if k != i:
                    ub.append((unit[k], 1))
                    ub.append(([-x for x in unit[k]], 1))
            v = _pl_min(phi, eq, ub)
            if v is not None:
                c_vals.append(v)
    a_vals = []
    for signs in itertools.product((1, -1), repeat=d):
        eq = [(list(signs), 1)]
        ub = [([-s * x for x in unit[k]], 0) for k, s in enumerate(signs)]
        v = _pl_min(phi, eq, ub)
        if v is not None:
            a_vals.append(v)
    return min(c_vals), min(a_vals)


def _fractions_up_to(m: int) -> tuple[np.ndarray, np.ndarray]:
    """All reduced ``a/b`` with ``b >= 1``, ``a != 0``, ``max(|a|, b) <= m``."""
    if m < 1:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    a = np.arange(-m, m + 1, dtype=np.int64)
    a = a[a != 0]
    b = np.arange(1, m + 1, dtype=np.int64)
    aa, bb = np.meshgrid(a, b, indexing="ij")
    aa, bb = aa.ravel(), bb.ravel()
    keep = np.gcd(aa, bb) == 1
    aa, bb = aa[keep], bb[keep]
    h = np.maximum(np.abs(aa), bb)
    order = np.lexsort((bb, aa, h))
    return aa[order], bb[order]


def _primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return [int(x) for x in np.flatnonzero(sieve)]


def _ord_array(x: np.ndarray, p: int) -> np.ndarray:
    out = np.zeros(len(x), dtype=np.int64)
    x = np.abs(x)
    idx = np.flatnonzero(x % p == 0)
    while idx.size:
        out[idx] += 1
        x[idx] //= p
        idx = idx[x[idx] % p == 0]
    return out


class _PLVector:
    """Float evaluation of a PL function on many points at once."""

    def __init__(self, phi: PLFunction):
        fan = phi.fan
        self.ws = [np.array(w, dtype=float) for w in fan._inverses]
        self.ms = [np.array([float(x) for x in phi.linear_form(i)]) for i in range(len(fan.max_cones))]

    def __call__(self, y: np.ndarray) -> np.ndarray:
        out = np.empty(len(y))
        todo = np.ones(len(y), dtype=bool)
        for w, m in zip(self.ws, self.ms):
            inside = todo & np.all(y @ w.T >= -1e-12, axis=1)
            out[inside] = y[inside] @ m
            todo &= ~inside
        if todo.any():
            raise ToricError("point-not-covered")
        return out


@dataclass
class _Candidates:
    nums: list[np.ndarray]
    dens: list[np.ndarray]
    logh: np.ndarray
    bound: int = 1  # max(|a|, b) over all coordinates


def _log_gap(phi: PLFunction, bound: int, B: Fraction) -> tuple[int, float]:
    """``(D, log eta)`` such that ``H != B`` forces ``|H^D / B^D - 1| >= eta``.

    ``D`` clears the denominators of the values and linear forms of ``phi``.
    Finite parts of ``H^D`` are then integers, and the archimedean part has
    denominator at most ``prod_i bound^(D * max|m_i|)``.
    """
    forms = phi.linear_forms
    den = math.lcm(1, *(x.denominator for x in phi.values),
                   *(x.denominator for m in forms for x in m))
    mu = sum(max(abs(m[i]) for m in forms) for i in range(phi.fan.rank))
    bd = B ** den
    log_q = float(den * mu) * math.log(max(bound, 1))
    return den, -(log_q + math.log(bd.denominator) + den * math.log(B))


def _log_heights(phi: PLFunction, nums: list[np.ndarray], dens: list[np.ndarray],
                 primes: list[int], base=None) -> np.ndarray:
    """Float log-heights; ``base = (a, b, index)`` lets valuations be computed on the
    short list of fractions ``a/b`` that coordinate ``i`` draws from via ``index[i]``."""
    d = len(nums)
    ev = _PLVector(phi)
    unit = np.eye(d)
    plus = ev(unit)
    minus = ev(-unit)
    la = [np.log(np.abs(a).astype(float)) for a in nums]
    lb = [np.log(b.astype(float)) for b in dens]
    # finite places, treating each coordinate's primes as if no other coordinate had them
    total = sum(plus[i] * la[i] + minus[i] * lb[i] for i in range(d))
    if d > 1:
        for p in primes:
            if base is not None:
                o = _ord_array(base[0], p) - _ord_array(base[1], p)
                ords = [o[ix] for ix in base[2]]
            else:
                ords = [_ord_array(a, p) - _ord_array(b, p) for a, b in zip(nums, dens)]
            shared = np.all(np.stack([o != 0 for o in ords]), axis=0)
            if not shared.any():
                continue
            o = np.stack([x[shared] for x in ords], axis=1).astype(float)
            sep = sum(np.where(o[:, i] > 0, plus[i], minus[i]) * np.abs(o[:, i]) for i in range(d))
            total[shared] += (ev(o) - sep) * math.log(p)
    y = np.stack([lb[i] - la[i] for i in range(d)], axis=1)
    return total + ev(y)


def _enumerate(phi: PLFunction, b_max: float, part: tuple[int, int] = (0, 1)) -> _Candidates:
    d = phi.fan.rank
    if d > 2:
        raise ToricError("dimension-unsupported", f"counting needs dimension <= 2, got {d}")
    c, alpha = enumeration_constants(phi)
    if c <= 0:
        raise ToricError("count-infinite-risk", "phi is not positive away from 0")
    if b_max < 1:
        # every height of a positive phi is at least 1
        empty = np.zeros(0, np.int64)
        return _Candidates([empty] * d, [empty] * d, np.zeros(0))
    slack = 1 + 1e-9
    per_coord = (b_max * slack) ** (1 / float(c))  # bound on max(|a|,b)^2
    m = math.isqrt(int(per_coord)) + 1
    a, b = _fractions_up_to(m)
    h = np.maximum(np.abs(a), b).astype(float) ** 2
    keep = h <= per_coord
    a, b, h = a[keep], b[keep], h[keep]
    k, parts = part
    lo, hi = len(a) * k // parts, len(a) * (k + 1) // parts
    base = None
    if d == 1:
        nums, dens = [a[lo:hi]], [b[lo:hi]]
    else:
        joint = (b_max * slack) ** (1 / float(alpha))
        first = np.arange(lo, hi)
        counts = np.searchsorted(h, joint / h[first], side="right")
        idx1 = np.repeat(first, counts)
        starts = np.cumsum(counts) - counts
        idx2 = np.arange(int(counts.sum())) - np.repeat(starts, counts)
        nums, dens = [a[idx1], a[idx2]], [b[idx1], b[idx2]]
        base = (a, b, [idx1, idx2])
    primes = _primes_up_to(m) if d > 1 else []
    logh = _log_heights(phi, nums, dens, primes, base)
    keep = logh <= math.log(b_max) + BAND
    order = np.argsort(logh[keep], kind="stable")
    return _Candidates([x[keep][order] for x in nums], [x[keep][order] for x in dens],
                       logh[keep][order], m)


def _point(cands: _Candidates, i: int) -> TorusPoint:
    return TorusPoint([Fraction(int(a[i]), int(b[i])) for a, b in zip(cands.nums, cands.dens)])


def _counts_for(phi: PLFunction, grid: Sequence[Fraction], part: tuple[int, int],
                policy: str) -> list[tuple[int, int]]:
    grid = [Fraction(x) for x in grid]
    cands = _enumerate(phi, float(max(grid)), part)
    out = []
    for B in grid:
        if B <= 0:
            out.append((0, 0))
            continue
        lb = math.log(B)
        lo = int(np.searchsorted(cands.logh, lb - BAND, side="left"))
        hi = int(np.searchsorted(cands.logh, lb + BAND, side="right"))
        if policy == "tolerance":
            out.append((hi, hi - lo))
            continue
        out.append((lo + _resolve_band(phi, cands, lo, hi, B), 0))
    return out


def _resolve_band(phi: PLFunction, cands: _Candidates, lo: int, hi: int, B: Fraction) -> int:
    """How many of the points ``lo..hi-1`` (all near the cutoff) satisfy ``H <= B``.

    When the gap from :func:`_log_gap` dominates the float error, equal and
    unequal heights are told apart by the float log-height alone; the
    remaining points are decided exactly.
    """
    if hi <= lo:
        return 0
    diff = cands.logh[lo:hi] - math.log(B)
    den, log_eta = _log_gap(phi, cands.bound, B)
    margin = math.exp(log_eta) / (2 * den) - FLOAT_ERR
    if margin > FLOAT_ERR:
        return int(np.count_nonzero(diff < margin))
    return sum(1 for i in range(lo, hi) if global_height(_point(cands, i), phi).exact.compare(B) <= 0)


def _check_phi(fan: Fan, phi: PLFunction):
    if phi.fan != fan:
        raise ToricError("fan-mismatch", "PL function lives on a different fan")


def count_table(fan: Fan, phi: PLFunction, grid: Iterable, partitions: int = 1,
                workers: int = 1, policy: str = "exact") -> CountTable:
    """``N(B) = #{x : H(x, phi) <= B}`` for every ``B`` in ``grid``.

    The enumeration is split by ranges of the first coordinate into
    ``partitions`` independent jobs (run on ``workers`` processes) whose
    counts are summed.  With ``policy="exact"`` points near a cutoff are
    decided by exact arithmetic and ``ties`` stays 0; with
    ``policy="tolerance"`` they are included and counted in ``ties``.
    """
    _check_phi(fan, phi)
    if policy not in ("exact", "tolerance"):
        raise ToricError("bad-policy", policy)
    grid = sorted({Fraction(x) for x in grid})
    if not grid:
        return CountTable(())
    jobs = [(k, partitions) for k in range(partitions)]
    if workers > 1 and partitions > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_counts_for, [phi] * partitions, [grid] * partitions, jobs,
                                    [policy] * partitions))
    else:
        results = [_counts_for(phi, grid, job, policy) for job in jobs]
    rows = []
    for i, B in enumerate(grid):
        rows.append(CountRow(B, sum(r[i][0] for r in results), sum(r[i][1] for r in results)))
    return CountTable(tuple(rows))


def count_points(fan: Fan, phi: PLFunction, B, **kw) -> CountRow:
    return count_table(fan, phi, [B], **kw).rows[0]


def enumerate_points(fan: Fan, phi: PLFunction, B) -> list[tuple[TorusPoint, float]]:
    """Every point with ``H <= B`` together with its height, by increasing height."""
    _check_phi(fan, phi)
    B = Fraction(B)
    if B <= 0:
        return []
    cands = _enumerate(phi, float(B))
    out = []
    lb = math.log(B)
    for i in range(len(cands.logh)):
        x = _point(cands, i)
        if cands.logh[i] >= lb - BAND:
            h = global_height(x, phi)
            if h.exact.compare(B) > 0:
                continue
            out.append((x, float(h)))
        else:
            out.append((x, math.exp(cands.logh[i])))
    return out


def zeta_partial_sum(fan: Fan, phi: PLFunction, s: float, B) -> float:
    """``sum of H(x)^-s`` over the points with ``H(x) <= B``."""
    if s <= 0:
        raise ToricError("bad-exponent", "s must be positive")
    return math.fsum(h ** -s for _, h in enumerate_points(fan, phi, B))


# -- asymptotics ---------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    c: float
    residual: float


def fit_exponents(table: CountTable) -> FitResult:
    """Least squares fit of ``N = c * B^a * (log B)^(b-1)`` on the rows with ``B > 1, N > 0``."""
    rows = [r for r in table if r.B > 1 and r.N > 0]
    if len(rows) < 4:
        raise ToricError("insufficient-data", "need at least 4 rows with B > 1 and N > 0")
    bs = np.array([float(r.B) for r in rows])
    if bs.max() / bs.min() < 100:
        raise ToricError("insufficient-data", "B must span at least two decades")
    ns = np.array([float(r.N) for r in rows])
    design = np.column_stack([np.log(bs), np.log(np.log(bs)), np.ones(len(bs))])
    coef, *_ = np.linalg.lstsq(design, np.log(ns), rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - np.log(ns)) ** 2)))
    return FitResult(float(coef[0]), float(1 + coef[1]), float(math.exp(coef[2])), resid)


def ratio_profile(table: CountTable, a, b) -> list[tuple[float, float]]:
    """``N(B) / (B^a (log B)^(b-1))`` per row; stabilizes at the leading constant."""
    out = []
    for r in table:
        if r.B > 1:
            B = float(r.B)
            out.append((B, r.N / (B ** float(a) * math.log(B) ** (b - 1))))
    return out


def tauberian_constant(a, b: int, g_at_a):
    """Leading constant ``g(a) / (a * (b-1)!)`` of ``N(B) ~ const * B^a (log B)^(b-1)``."""
    if int(b) != b or b < 1:
        raise ToricError("bad-pole-order", f"b = {b}")
    if a <= 0:
        raise ToricError("bad-exponent", f"a = {a}")
    b = int(b)
    if all(isinstance(x, (int, Fraction)) for x in (a, g_at_a)):
        return Fraction(g_at_a) / (Fraction(a) * math.factorial(b - 1))
    return float(g_at_a) / (float(a) * math.factorial(b - 1))

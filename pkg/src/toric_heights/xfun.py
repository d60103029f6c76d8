"""X-functions of cones: ``X(s) = integral over the dual cone of exp(-<s, y>) dy``.

The measure on the dual space gives the dual lattice covolume 1.  For a
simplicial dual cone spanned by ``y_1..y_k`` the integral is
``|det Y| / prod <s, y_j>``; general cones are handled by triangulating the
dual cone and summing, which produces an exact :class:`RatFunc`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import lattice as la
from .cones import Cone, dual_cone, triangulate
from .errors import ConeError
from .lp import feasible_point
from .ratfun import MultiPoly, RatFunc, residue_descent


@dataclass(frozen=True)
class XFunction:
    cone: Cone
    value: RatFunc

    def __call__(self, s: Sequence):
        return self.value.evaluate(s)

    def render(self, names=None) -> str:
        return self.value.render(names)

    def __str__(self):
        return self.render()


def x_function(c: Cone, order: Sequence[Sequence[int]] | None = None) -> XFunction:
    """Exact X-function of a full-dimensional pointed cone.

    ``order`` fixes the placing order of the dual rays in the triangulation;
    the result does not depend on it.
    """
    if not c.is_full_dimensional:
        raise ConeError("not-full-dimensional")
    if not c.is_pointed:
        raise ConeError("not-pointed")
    k = c.ambient_rank
    total = RatFunc.zero(k)
    one = MultiPoly.const(k, 1)
    for piece in triangulate(dual_cone(c), order):
        ys = piece.generators
        vol = abs(la.det(ys))
        total = total + RatFunc.build(k, one, [(y, 1) for y in ys], vol)
    return XFunction(c, total)


def _kernel_meets_cone(c: Cone, psi) -> bool:
    # is there a nonzero x in c with psi x = 0?  Normalize by sum of weights = 1.
    gens = c.generators
    m = len(gens)
    a_eq = [[la.dot(row, g) for g in gens] for row in psi]
    b_eq = [0] * len(psi)
    a_eq.append([1] * m)
    b_eq.append(1)
    a_ub = [[-int(i == j) for j in range(m)] for i in range(m)]
    return feasible_point(a_ub, [0] * m, a_eq, b_eq, nvars=m) is not None


def x_function_image(c: Cone, psi: Sequence[Sequence[int]]) -> XFunction:
    """X-function of ``psi(c)`` computed by residue descent along ``ker psi``.

    ``psi`` is an integer ``r x k`` matrix of rank ``r``; it need not be onto
    ``Z^r``, the cokernel order is divided out.  The result is expressed in
    the coordinates of ``Z^r``.
    """
    psi = [tuple(int(x) for x in row) for row in psi]
    k = c.ambient_rank
    r = len(psi)
    if any(len(row) != k for row in psi) or la.rank(psi) != r:
        raise ConeError("bad-projection", "matrix must have full row rank")
    if _kernel_meets_cone(c, psi):
        raise ConeError("kernel-meets-cone")
    image = Cone(r, [la.matvec(psi, g) for g in c.generators])
    if not image.is_pointed:
        raise ConeError("image-not-pointed")
    f = x_function(c).value
    reference = tuple(map(sum, zip(*c.generators)))
    for gamma in la.kernel_basis(psi) if r < k else []:
        f = residue_descent(f, gamma, reference)
    # section S with psi S = id
    gram_inv = la.inverse(la.matmul(psi, la.transpose(psi)))
    section = la.matmul(la.transpose(psi), gram_inv)
    value = f.substitute_linear(section) * Fraction(1, la.cokernel_order(psi))
    return XFunction(image, value)


def x_function_projected(c: Cone, kernel: Sequence[Sequence[int]]) -> XFunction:
    """X-function of the image of ``c`` in ``Z^k / (saturation of kernel)``.

    Quotient coordinates are given by the Hermite-reduced basis of the
    lattice orthogonal to ``kernel``, which is an onto projection.
    """
    kernel = [tuple(v) for v in kernel]
    if la.rank(kernel) != len(kernel):
        raise ConeError("dependent-kernel")
    return x_function_image(c, la.kernel_basis(kernel))


def numeric_x(c: Cone, s: Sequence[float], samples: int = 200_000,
              seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of the X-function at a real point.

    Uses ``X(s) = k! * vol{y in dual cone : <s, y> <= 1}``; the body is
    sampled uniformly inside its bounding box.  Returns ``(value, stderr)``.
    Membership in the dual cone is tested against the cone generators
    directly, so no facet or triangulation code is involved.
    """
    k = c.ambient_rank
    s = np.asarray(s, dtype=float)
    gens = np.asarray(c.generators, dtype=float)
    # body: -g.y <= 0 for generators g, s.y <= 1
    a_ub = np.vstack([-gens, s[None, :]])
    b_ub = np.concatenate([np.zeros(len(gens)), [1.0]])
    lo, hi = np.empty(k), np.empty(k)
    for i in range(k):
        for sign, store in ((1.0, lo), (-1.0, hi)):
            obj = np.zeros(k)
            obj[i] = sign
            res = linprog(obj, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * k, method="highs")
            if res.status == 3:
                raise ConeError("not-interior", f"{tuple(s)} is not interior to the cone")
            if res.status != 0:
                raise ConeError("numeric-failure", res.message)
            store[i] = sign * res.fun
    rng = np.random.default_rng(seed)
    box = float(np.prod(hi - lo))
    if box <= 0:
        raise ConeError("not-interior", f"{tuple(s)} is not interior to the cone")
    hits = 0
    done = 0
    chunk = 50_000
    while done < samples:
        n = min(chunk, samples - done)
        y = lo + (hi - lo) * rng.random((n, k))
        inside = np.all(y @ gens.T >= 0, axis=1) & (y @ s <= 1)
        hits += int(inside.sum())
        done += n
    frac = hits / samples
    scale = math.factorial(k) * box
    err = scale * math.sqrt(max(frac * (1 - frac), 1.0 / samples) / samples)
    return scale * frac, err

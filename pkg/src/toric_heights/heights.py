"""Local and global heights of rational points of a split torus.

A point ``x`` in ``(Q^*)^d`` has local vectors ``x_p = (ord_p x_i)_i`` at
each prime and ``x_inf = (-log|x_i|)_i`` at infinity.  With these signs
``sum_v <m, x_v> log q_v = 0`` for every character ``m`` (product formula),
so the global height ``prod_v exp(phi(x_v) log q_v)`` only depends on the
class of ``phi`` modulo linear functions.

The archimedean factor equals ``prod |x_i|^(-m_i)`` where ``m`` is the
linear form of ``phi`` on the cone containing ``x_inf``.  Cone membership
reduces to comparing rational power products with 1, so the whole height is
an exact product of prime powers with rational exponents
(:class:`PowerProduct`).  Floats only appear when a value is requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .errors import ToricError
from .fans import PLFunction


@lru_cache(maxsize=65536)
def prime_factors(n: int) -> tuple[int, ...]:
    """Distinct prime factors of ``|n|`` by trial division."""
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return tuple(out)


def _ord(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[Fraction, ...]

    def __init__(self, coords: Sequence):
        fr = tuple(Fraction(x) for x in coords)
        if any(x == 0 for x in fr):
            raise ToricError("not-in-torus", "coordinates must be nonzero")
        object.__setattr__(self, "coords", fr)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def support(self) -> tuple[int, ...]:
        """Primes dividing some numerator or denominator."""
        ps: set[int] = set()
        for x in self.coords:
            ps.update(prime_factors(x.numerator))
            ps.update(prime_factors(x.denominator))
        return tuple(sorted(ps))

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.coords) + ")"


@dataclass(frozen=True)
class PowerProduct:
    """``prod p ** e_p`` over primes ``p`` with rational exponents."""

    exponents: tuple[tuple[int, Fraction], ...]

    @classmethod
    def from_map(cls, m: Mapping[int, Fraction]) -> "PowerProduct":
        return cls(tuple(sorted((p, Fraction(e)) for p, e in m.items() if e)))

    def __mul__(self, other: "PowerProduct") -> "PowerProduct":
        out = dict(self.exponents)
        for p, e in other.exponents:
            out[p] = out.get(p, 0) + e
        return PowerProduct.from_map(out)

    @property
    def log(self) -> float:
        return sum(float(e) * math.log(p) for p, e in self.exponents)

    def __float__(self) -> float:
        return math.exp(self.log)

    @property
    def is_rational(self) -> bool:
        return all(e.denominator == 1 for _, e in self.exponents)

    @property
    def value(self):
        """Exact :class:`Fraction` when all exponents are integers, else a float."""
        if self.is_rational:
            out = Fraction(1)
            for p, e in self.exponents:
                out *= Fraction(p) ** int(e)
            return out
        return float(self)

    def compare(self, bound) -> int:
        """Sign of ``self - bound`` for a positive rational ``bound``, decided exactly."""
        bound = Fraction(bound)
        if bound <= 0:
            return 1
        den = math.lcm(1, *(e.denominator for _, e in self.exponents))
        lhs = Fraction(1)
        for p, e in self.exponents:
            lhs *= Fraction(p) ** int(e * den)
        rhs = bound ** den
        return (lhs > rhs) - (lhs < rhs)


def valuation_vector(x: TorusPoint, p: int) -> tuple[int, ...]:
    return tuple(_ord(c.numerator, p) - _ord(c.denominator, p) for c in x.coords)


def _check(x: TorusPoint, phi: PLFunction):
    if x.dim != phi.fan.rank:
        raise ToricError("dimension-mismatch", f"point of dimension {x.dim} on a rank {phi.fan.rank} fan")


def local_height_nonarch(x: TorusPoint, phi: PLFunction, p: int) -> PowerProduct:
    """``p ** phi(x_p)`` as an exact power product."""
    _check(x, phi)
    return PowerProduct.from_map({p: phi(valuation_vector(x, p))})


def _arch_cone(x: TorusPoint, phi: PLFunction) -> int:
    # the cone of x_inf = -log|x|: <w_j, x_inf> >= 0  <=>  prod |x_i|^{w_ji} <= 1
    fan = phi.fan
    absx = [abs(c) for c in x.coords]
    for idx, ws in enumerate(fan._inverses):
        ok = True
        for w in ws:
            prod = Fraction(1)
            for xi, wi in zip(absx, w):
                prod *= xi ** wi
            if prod > 1:
                ok = False
                break
        if ok:
            return idx
    raise ToricError("point-not-covered")


def local_height_arch_exact(x: TorusPoint, phi: PLFunction) -> PowerProduct:
    """The archimedean factor ``exp(phi(-log|x|))`` as a power product."""
    _check(x, phi)
    m = phi.linear_form(_arch_cone(x, phi))
    out: dict[int, Fraction] = {}
    for xi, mi in zip(x.coords, m):
        if not mi:
            continue
        for p in prime_factors(xi.numerator):
            out[p] = out.get(p, 0) - mi * _ord(xi.numerator, p)
        for p in prime_factors(xi.denominator):
            out[p] = out.get(p, 0) + mi * _ord(xi.denominator, p)
    return PowerProduct.from_map(out)


def local_height_arch(x: TorusPoint, phi: PLFunction) -> float:
    """``exp(phi(-log|x_1|, ..., -log|x_d|))``."""
    _check(x, phi)
    y = [-math.log(abs(c.numerator)) + math.log(c.denominator) for c in x.coords]
    m = phi.linear_form(_arch_cone(x, phi))
    return math.exp(sum(float(mi) * yi for mi, yi in zip(m, y)))


@dataclass(frozen=True)
class HeightResult:
    exact: PowerProduct
    finite: dict[int, PowerProduct]
    archimedean: PowerProduct

    @property
    def value(self):
        return self.exact.value

    def __float__(self) -> float:
        return float(self.exact)

    def breakdown(self) -> dict[str, str]:
        out = {}
        for p, h in sorted(self.finite.items()):
            out[str(p)] = _fmt(h)
        out["inf"] = _fmt(self.archimedean)
        out["total"] = _fmt(self.exact)
        return out


def _fmt(h: PowerProduct) -> str:
    v = h.value
    return str(v) if isinstance(v, Fraction) else repr(v)


def global_height(x: TorusPoint, phi: PLFunction) -> HeightResult:
    """Product of the local heights over all places, exact."""
    _check(x, phi)
    finite = {p: local_height_nonarch(x, phi, p) for p in x.support()}
    arch = local_height_arch_exact(x, phi)
    total = arch
    for h in finite.values():
        total = total * h
    return HeightResult(total, finite, arch)


def height_value(x: Sequence, phi: PLFunction):
    """Convenience: the global height of ``x`` as a Fraction or float."""
    return global_height(TorusPoint(x), phi).value


__all__ = [
    "TorusPoint", "PowerProduct", "HeightResult", "valuation_vector", "prime_factors",
    "local_height_nonarch", "local_height_arch", "local_height_arch_exact",
    "global_height", "height_value",
]

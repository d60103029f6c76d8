"""Exact multivariate rational functions with linear-form denominators.

A :class:`RatFunc` is ``scalar * num / prod(l_j ** k_j)`` where each ``l_j``
is a homogeneous linear form with primitive integer coefficients whose
first nonzero coefficient is positive, ``num`` is a primitive integer
polynomial with positive leading coefficient, and no ``l_j`` divides
``num``.  This representation is unique, so ``==`` is equality of
functions.

Besides arithmetic the module provides multiplicity at the origin, leading
forms, principal parts and coefficients, and :func:`residue_descent`, which
integrates a function along a lattice direction by summing residues.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import lattice as la
from .errors import RatFuncError

Exp = tuple[int, ...]
Form = tuple[int, ...]


def _grlex(e: Exp):
    return (sum(e), e)


class MultiPoly:
    """Sparse polynomial over Q in a fixed number of variables."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exp, Fraction] | None = None):
        self.nvars = nvars
        self.terms = {e: Fraction(c) for e, c in (terms or {}).items() if c}
        self._hash = None

    @classmethod
    def const(cls, nvars: int, c) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def var(cls, nvars: int, i: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def linear(cls, coefs: Sequence, const=0) -> "MultiPoly":
        n = len(coefs)
        terms = {}
        for i, c in enumerate(coefs):
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = Fraction(c)
        if const:
            terms[(0,) * n] = Fraction(const)
        return cls(n, terms)

    # -- basic protocol
    def __eq__(self, other):
        return isinstance(other, MultiPoly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"MultiPoly({self.render()})"

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    @property
    def degree(self) -> int:
        if not self.terms:
            raise RatFuncError("zero-polynomial")
        return max(sum(e) for e in self.terms)

    @property
    def order(self) -> int:
        """Minimal total degree of a monomial (the multiplicity at 0)."""
        if not self.terms:
            raise RatFuncError("zero-polynomial")
        return min(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def leading_term(self) -> tuple[Exp, Fraction]:
        e = max(self.terms, key=_grlex)
        return e, self.terms[e]

    # -- arithmetic
    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(self.nvars, other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = Fraction(other)
            return MultiPoly(self.nvars, {e: c * v for e, v in self.terms.items()})
        out: dict[Exp, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = MultiPoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- structure
    def homogeneous_part(self, d: int) -> "MultiPoly":
        return MultiPoly(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def content(self) -> Fraction:
        """Positive rational ``c`` with ``self / c`` primitive integral."""
        if not self.terms:
            return Fraction(0)
        vals = list(self.terms.values())
        den = math.lcm(*(v.denominator for v in vals))
        g = math.gcd(*(int(v * den) for v in vals))
        return Fraction(g, den)

    def evaluate(self, point: Sequence):
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x ** k
            total = total + term
        return total

    def compose(self, subs: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute ``subs[i]`` for variable ``i``."""
        if len(subs) != self.nvars:
            raise RatFuncError("arity-mismatch")
        n = subs[0].nvars if subs else 0
        powers: list[dict[int, MultiPoly]] = [{0: MultiPoly.const(n, 1)} for _ in subs]

        def power(i: int, k: int) -> MultiPoly:
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * subs[i]
            return cache[k]

        out: dict[Exp, Fraction] = {}
        for e, c in self.terms.items():
            term = MultiPoly.const(n, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            for te, tc in term.terms.items():
                out[te] = out.get(te, 0) + tc
        return MultiPoly(n, out)

    def collect(self, var: int, drop: bool | None = None) -> dict[int, "MultiPoly"]:
        """Coefficients in powers of ``var``.

        By default the coefficients drop ``var`` when it is the last variable
        and keep the full arity otherwise; ``drop=False`` always keeps it.
        """
        last = var == self.nvars - 1 if drop is None else (drop and var == self.nvars - 1)
        groups: dict[int, dict[Exp, Fraction]] = {}
        for e, c in self.terms.items():
            k = e[var]
            rest = e[:var] + e[var + 1:] if last else e[:var] + (0,) + e[var + 1:]
            groups.setdefault(k, {})[rest] = c
        n = self.nvars - 1 if last else self.nvars
        return {k: MultiPoly(n, t) for k, t in groups.items()}

    def divide_linear(self, form: Sequence[int]) -> "MultiPoly | None":
        """Exact quotient by a linear form, or None if it does not divide."""
        v = next(i for i, a in enumerate(form) if a)
        a = Fraction(form[v])
        rest = MultiPoly.linear([0 if i == v else c for i, c in enumerate(form)])
        coeffs = self.collect(v, drop=False)
        top = max(coeffs) if coeffs else 0
        quot: dict[int, MultiPoly] = {}
        carry = MultiPoly(self.nvars)
        # p = sum_e x_v^e P_e ; l = a x_v + r ; q_{e-1} = (P_e - r q_e) / a
        for e in range(top, 0, -1):
            cur = coeffs.get(e, MultiPoly(self.nvars)) - rest * carry
            carry = cur * (1 / a)
            quot[e - 1] = carry
        remainder = coeffs.get(0, MultiPoly(self.nvars)) - rest * carry
        if not remainder.is_zero():
            return None
        out: dict[Exp, Fraction] = {}
        for e, q in quot.items():
            for te, tc in q.terms.items():
                t = list(te)
                t[v] = e
                out[tuple(t)] = tc
        return MultiPoly(self.nvars, out)

    def render(self, names: Sequence[str] | None = None) -> str:
        names = names or _default_names(self.nvars)
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=_grlex, reverse=True):
            c = self.terms[e]
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def _default_names(n: int) -> list[str]:
    return [f"s{i + 1}" for i in range(n)]


def normalize_form(form: Sequence) -> tuple[Form, Fraction]:
    """Write ``form = c * l`` with ``l`` primitive, first nonzero coefficient positive."""
    if not any(form):
        raise RatFuncError("zero-form")
    prim = la.primitive(form)
    lead = next(x for x in prim if x)
    if lead < 0:
        prim = tuple(-x for x in prim)
    i = next(i for i, x in enumerate(prim) if x)
    return prim, Fraction(form[i]) / prim[i]


def _render_form(form: Form, names) -> str:
    return MultiPoly.linear(form).render(names)


@dataclass(frozen=True)
class RatFunc:
    nvars: int
    num: MultiPoly
    den: tuple[tuple[Form, int], ...]
    scalar: Fraction

    @classmethod
    def build(cls, nvars: int, num: MultiPoly, den: Iterable[tuple[Sequence, int]] = (),
              scalar=1) -> "RatFunc":
        scalar = Fraction(scalar)
        if num.nvars != nvars:
            raise RatFuncError("arity-mismatch")
        if num.is_zero() or scalar == 0:
            return cls.zero(nvars)
        factors: dict[Form, int] = {}
        for form, k in den:
            if len(form) != nvars:
                raise RatFuncError("arity-mismatch")
            if k == 0:
                continue
            prim, c = normalize_form(form)
            scalar /= c ** k
            factors[prim] = factors.get(prim, 0) + k
        for form in list(factors):
            while factors[form] > 0:
                q = num.divide_linear(form)
                if q is None:
                    break
                num = q
                factors[form] -= 1
            if factors[form] < 0:
                # negative exponent: move the form to the numerator
                num = num * MultiPoly.linear(form) ** (-factors[form])
                factors[form] = 0
        content = num.content()
        num = num * (1 / content)
        scalar *= content
        if num.leading_term()[1] < 0:
            num = -num
            scalar = -scalar
        den_t = tuple(sorted((f, k) for f, k in factors.items() if k))
        return cls(nvars, num, den_t, scalar)

    @classmethod
    def zero(cls, nvars: int) -> "RatFunc":
        return cls(nvars, MultiPoly(nvars), (), Fraction(0))

    @classmethod
    def constant(cls, nvars: int, c) -> "RatFunc":
        return cls.build(nvars, MultiPoly.const(nvars, 1), (), c)

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "RatFunc":
        return cls.build(p.nvars, p)

    @classmethod
    def inverse_forms(cls, forms: Iterable[tuple[Sequence, int]], nvars: int, scalar=1) -> "RatFunc":
        return cls.build(nvars, MultiPoly.const(nvars, 1), forms, scalar)

    def is_zero(self) -> bool:
        return self.scalar == 0

    def is_constant(self) -> bool:
        return self.is_zero() or (not self.den and self.num.is_constant())

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise RatFuncError("not-constant")
        return self.scalar * self.num.constant_term() if not self.is_zero() else Fraction(0)

    @property
    def den_degree(self) -> int:
        return sum(k for _, k in self.den)

    @property
    def degree(self) -> int:
        """Homogeneity degree ``deg num - deg den`` (num assumed homogeneous)."""
        return self.num.degree - self.den_degree

    def is_homogeneous(self) -> bool:
        return self.num.is_homogeneous()

    # -- arithmetic
    def __neg__(self):
        return RatFunc(self.nvars, self.num, self.den, -self.scalar)

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            return RatFunc.build(self.nvars, self.num, self.den, self.scalar * Fraction(other))
        if self.is_zero() or other.is_zero():
            return RatFunc.zero(self.nvars)
        return RatFunc.build(self.nvars, self.num * other.num, self.den + other.den,
                             self.scalar * other.scalar)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RatFunc):
            if not other.num.is_constant():
                raise RatFuncError("non-linear-denominator", "divisor numerator is not constant")
            inv = RatFunc.build(self.nvars,
                                MultiPoly.const(self.nvars, 1) *
                                _prod_forms([(f, k) for f, k in other.den], self.nvars),
                                (), 1 / other.constant_scale())
            return self * inv
        return self * (1 / Fraction(other))

    def constant_scale(self) -> Fraction:
        return self.scalar * self.num.constant_term()

    def __add__(self, other):
        if not isinstance(other, RatFunc):
            other = RatFunc.constant(self.nvars, other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lcm: dict[Form, int] = dict(self.den)
        for f, k in other.den:
            lcm[f] = max(lcm.get(f, 0), k)

        def lifted(r: RatFunc) -> MultiPoly:
            have = dict(r.den)
            missing = [(f, k - have.get(f, 0)) for f, k in lcm.items() if k > have.get(f, 0)]
            return r.num * r.scalar * _prod_forms(missing, self.nvars)

        num = lifted(self) + lifted(other)
        return RatFunc.build(self.nvars, num, lcm.items())

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def evaluate(self, point: Sequence):
        val = self.scalar * self.num.evaluate(point)
        for f, k in self.den:
            lv = sum(a * x for a, x in zip(f, point))
            if lv == 0:
                raise ZeroDivisionError(f"pole at {tuple(point)}")
            val = val / lv ** k
        return val

    def substitute_linear(self, matrix: Sequence[Sequence]) -> "RatFunc":
        """``g(u) = f(matrix @ u)`` for a rational ``nvars x m`` matrix."""
        m = len(matrix[0])
        rows = [MultiPoly.linear(list(row)) for row in matrix]
        num = self.num.compose(rows)
        den = []
        for f, k in self.den:
            new = [sum(Fraction(a) * Fraction(matrix[i][t]) for i, a in enumerate(f)) for t in range(m)]
            if not any(new):
                raise RatFuncError("pole-everywhere", "a denominator form vanishes identically")
            den.append((new, k))
        return RatFunc.build(m, num, den, self.scalar)

    def render(self, names: Sequence[str] | None = None) -> str:
        names = names or _default_names(self.nvars)
        if self.is_zero():
            return "0"
        p, q = self.scalar.numerator, self.scalar.denominator
        if self.num.is_constant():
            top = str(p * self.num.constant_term())
        else:
            body = self.num.render(names)
            single = len(self.num.terms) == 1
            if p == 1:
                top = body if single else f"({body})" if self.den or q != 1 else body
            elif p == -1:
                top = f"-{body}" if single else f"-({body})"
            else:
                top = f"{p}*{body}" if single else f"{p}*({body})"
        pieces = [str(q)] if q != 1 else []
        for f, k in sorted(self.den, reverse=True):
            txt = _render_form(f, names)
            if sum(1 for a in f if a) > 1 or abs(next(a for a in f if a)) != 1:
                txt = f"({txt})"
            pieces.append(txt if k == 1 else f"{txt}^{k}")
        if not pieces:
            return top
        bottom = pieces[0] if len(pieces) == 1 else "(" + "*".join(pieces) + ")"
        return f"{top}/{bottom}"

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"RatFunc({self.render()})"


def _prod_forms(forms, nvars: int) -> MultiPoly:
    out = MultiPoly.const(nvars, 1)
    for f, k in forms:
        out = out * MultiPoly.linear(list(f)) ** k
    return out


# -- multiplicity and principal parts -----------------------------------------

def multiplicity_at_origin(f: RatFunc) -> int:
    if f.is_zero():
        raise RatFuncError("zero-function")
    return f.num.order - f.den_degree


def leading_form(p: MultiPoly) -> MultiPoly:
    if p.is_zero():
        raise RatFuncError("zero-polynomial")
    return p.homogeneous_part(p.order)


def principal_part(f: RatFunc) -> tuple[RatFunc, RatFunc]:
    """Split ``f = r0 + r1`` with ``r0`` homogeneous of degree ``mu(f)`` and ``mu(r1) > mu(f)``."""
    if f.is_zero():
        raise RatFuncError("zero-function")
    q0 = leading_form(f.num)
    r0 = RatFunc.build(f.nvars, q0, f.den, f.scalar)
    r1 = RatFunc.build(f.nvars, f.num - q0, f.den, f.scalar)
    return r0, r1


def principal_coefficient(f: RatFunc, x) -> Fraction:
    """The constant ``C`` with ``principal_part(f)[0] == C * x``."""
    ref = getattr(x, "value", x)
    r0, _ = principal_part(f)
    if ref.is_zero() or r0.num != ref.num or r0.den != ref.den:
        raise RatFuncError("not-proportional", "principal part is not a multiple of the reference")
    return r0.scalar / ref.scalar


# -- residue descent --------------------------------------------------------------

@dataclass(frozen=True)
class DescentDirection:
    gamma: tuple[int, ...]
    previous: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if not any(self.gamma):
            raise RatFuncError("degenerate-direction", "zero direction")
        if self.previous:
            r = la.rank(list(self.previous))
            if la.rank(list(self.previous) + [self.gamma]) == r:
                raise RatFuncError("degenerate-direction", "direction lies in the span of earlier ones")


def _neg_binom(k: int, n: int) -> int:
    # coefficient of x^n in (1 + x)^(-k)
    return (-1) ** n * math.comb(k + n - 1, n)


def residue_descent(f: RatFunc, direction, reference: Sequence | None = None) -> RatFunc:
    """Integrate ``f`` along a lattice direction by residues.

    Returns ``(1 / 2 pi i) * integral over Re z = 0 of f(s + z*gamma) dz`` as
    an exact rational function of ``s`` (in the same coordinates; the result
    is invariant under ``s -> s + t*gamma``).  The integral is evaluated as
    the sum of residues at the poles lying left of the contour when ``s`` is
    at ``reference`` (default: the all-ones point), i.e. the poles
    ``z_j = -l_j(s)/l_j(gamma)`` with ``l_j(reference) * l_j(gamma) > 0``.

    The integrand must decay at least like ``|z|^-2``; otherwise the contour
    integral diverges and ``degenerate-direction`` is raised.
    """
    gamma = tuple(direction.gamma if isinstance(direction, DescentDirection) else direction)
    n = f.nvars
    if len(gamma) != n:
        raise RatFuncError("arity-mismatch")
    if not any(gamma):
        raise RatFuncError("degenerate-direction", "zero direction")
    if f.is_zero():
        return f
    ref = tuple(reference) if reference is not None else (1,) * n
    # f(s + z*gamma) as a polynomial in (s, z)
    shift = [MultiPoly.var(n + 1, i) + MultiPoly.var(n + 1, n) * g for i, g in enumerate(gamma)]
    along = f.num.compose(shift)
    z_deg = max(e[n] for e in along.terms)
    pole_deg = sum(k for form, k in f.den if la.dot(form, gamma))
    if z_deg - pole_deg > -2:
        raise RatFuncError("degenerate-direction",
                           f"integrand decays like |z|^{z_deg - pole_deg} along {gamma}")
    factors = [(form, k, la.dot(form, gamma), la.dot(form, ref)) for form, k in f.den]
    if any(side == 0 for _, _, c, side in factors if c):
        raise RatFuncError("degenerate-direction", "reference point lies on a polar hyperplane")

    total = RatFunc.zero(n)
    for j, (lj, kj, cj, side) in enumerate(factors):
        if cj == 0 or (side > 0) != (cj > 0):
            continue
        total = total + _residue_at(f, j, factors, gamma)
    return total


def _residue_at(f: RatFunc, j: int, factors, gamma) -> RatFunc:
    n = f.nvars
    lj, kj, cj, _ = factors[j]
    # z_j(s) = -l_j(s)/c_j ; expand around it with z = z_j + w
    zj = [Fraction(-a, cj) for a in lj]
    w = MultiPoly.var(n + 1, n)
    subs = [MultiPoly.var(n + 1, i) + (MultiPoly.linear(list(zj) + [0]) + w) * g
            for i, g in enumerate(gamma)]
    expanded = f.num.compose(subs).collect(n)
    others = []
    for m, (lm, km, cm, _) in enumerate(factors):
        if m == j:
            continue
        hm = tuple(Fraction(a) - Fraction(cm, cj) * b for a, b in zip(lm, lj))
        if not any(hm):
            raise RatFuncError("coincident-poles", f"forms {lm} and {lj} give the same pole")
        others.append((hm, km, cm))
    moving = [o for o in others if o[2]]
    fixed = [(hm, km) for hm, km, cm in others if not cm]
    target = kj - 1
    result = RatFunc.zero(n)
    for n0, coeff in expanded.items():
        if n0 > target:
            continue
        rest = target - n0
        for split in _compositions(rest, len(moving)):
            scalar = f.scalar / Fraction(cj) ** kj
            den = list(fixed)
            for (hm, km, cm), nm in zip(moving, split):
                scalar *= _neg_binom(km, nm) * Fraction(cm) ** nm
                den.append((hm, km + nm))
            result = result + RatFunc.build(n, coeff, den, scalar)
    return result


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail

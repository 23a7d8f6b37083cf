"""Finite abelian groups, quadratic linking forms and their isomorphisms.

Values in Q/Z are :class:`Fraction` objects normalized to ``[0, 1)``.
A quadratic refinement is stored by its values on the generators; every
other value follows from::

    q(sum c_i g_i) = sum_i (c_i q(g_i) + C(c_i, 2) b(g_i, g_i)) + sum_{i<j} c_i c_j b(g_i, g_j)

which holds for any refinement, homogeneous or not.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

DEFAULT_MAX_ORDER = 4096
DEFAULT_NODE_BUDGET = int(os.environ.get("TREELIKE_ISO_BUDGET", 2_000_000))


class LinkingFormError(ValueError):
    pass


class Undecided(RuntimeError):
    """A bounded search ran out of budget; the question stays open."""


def mod1(x) -> Fraction:
    x = Fraction(x)
    return x - math.floor(x)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``Z_{a_1} ⊕ ... ⊕ Z_{a_r}``; elements are coefficient tuples."""

    divisors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "divisors", tuple(int(d) for d in self.divisors))
        if any(d < 2 for d in self.divisors):
            raise LinkingFormError(f"cyclic orders must be >= 2, got {self.divisors}")

    @property
    def rank(self) -> int:
        return len(self.divisors)

    @property
    def order(self) -> int:
        return math.prod(self.divisors)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.divisors) if self.divisors else 1

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def reduce(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(c) % d for c, d in zip(x, self.divisors))

    def add(self, x, y) -> tuple[int, ...]:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.divisors))

    def scale(self, c: int, x) -> tuple[int, ...]:
        return tuple((c * a) % d for a, d in zip(x, self.divisors))

    def neg(self, x) -> tuple[int, ...]:
        return self.scale(-1, x)

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.divisors))

    def element_order(self, x) -> int:
        return math.lcm(*(d // math.gcd(c, d) for c, d in zip(x, self.divisors))) if x else 1

    def generator(self, i: int) -> tuple[int, ...]:
        return tuple(int(k == i) for k in range(self.rank))

    def in_double(self, x) -> bool:
        """Whether ``x`` lies in ``2G``."""
        return all(c % math.gcd(2, d) == 0 for c, d in zip(x, self.divisors))

    def halve(self, x) -> tuple[int, ...]:
        """Some ``y`` with ``2y = x`` (lexicographically least coordinates)."""
        out = []
        for c, d in zip(x, self.divisors):
            if d % 2:
                out.append(c * (d + 1) // 2 % d)
            elif c % 2:
                raise LinkingFormError(f"{tuple(x)} is not in 2G")
            else:
                out.append(c // 2)
        return tuple(out)


@dataclass(frozen=True)
class KContext:
    """Dimension parameter ``k`` (the forms live in dimension ``4k``)."""

    k: int

    def __post_init__(self):
        if self.k < 2:
            raise LinkingFormError("k must be at least 2")

    @property
    def coefficients(self) -> str:
        """The stable coefficient group, by k mod 4."""
        return ("Z", "Z/2", "Z", "0")[self.k % 4]

    @property
    def characteristic(self) -> bool:
        return self.k in (2, 4)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticLinkingForm:
    """Extended quadratic linking form ``(G, b, q, beta)``.

    ``beta`` is a coefficient vector: an element of ``G`` when the
    coefficient group is ``Z``, of ``G ⊗ Z/2`` (entries mod ``gcd(a_i, 2)``)
    when it is ``Z/2``, and zero when it is trivial.
    """

    group: FiniteAbelianGroup
    b: tuple[tuple[Fraction, ...], ...]
    q: tuple[Fraction, ...]
    beta: tuple[int, ...] = ()
    context: KContext = field(default_factory=lambda: KContext(3))

    def __post_init__(self):
        r = self.group.rank
        b = tuple(tuple(mod1(x) for x in row) for row in self.b)
        q = tuple(mod1(x) for x in self.q)
        if len(b) != r or any(len(row) != r for row in b) or len(q) != r:
            raise LinkingFormError("b and q must match the number of generators")
        beta = tuple(self.beta) if self.beta else (0,) * r
        if len(beta) != r:
            raise LinkingFormError("beta has the wrong length")
        coeff = self.context.coefficients
        if coeff == "Z/2":
            beta = tuple(c % math.gcd(2, d) for c, d in zip(beta, self.group.divisors))
        else:
            beta = self.group.reduce(beta)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "beta", beta)
        self._validate()

    # -- integer kernel: values are numerators over ``denom`` -------------------

    @cached_property
    def denom(self) -> int:
        return 2 * self.group.exponent

    def _numerator(self, x: Fraction) -> int:
        y = x * self.denom
        if y.denominator != 1:
            raise LinkingFormError(f"value {x} is incompatible with the group exponent {self.group.exponent}")
        return int(y) % self.denom

    @cached_property
    def _bn(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self._numerator(x) for x in row) for row in self.b)

    @cached_property
    def _qn(self) -> tuple[int, ...]:
        return tuple(self._numerator(x) for x in self.q)

    def bn(self, x, y) -> int:
        bn = self._bn
        return sum(x[i] * y[j] * bn[i][j] for i in range(len(x)) if x[i] for j in range(len(y)) if y[j]) % self.denom

    def qn(self, x) -> int:
        bn, qn = self._bn, self._qn
        r = len(x)
        s = 0
        for i in range(r):
            c = x[i]
            if not c:
                continue
            s += c * qn[i] + (c * (c - 1) // 2) * bn[i][i]
            for j in range(i + 1, r):
                if x[j]:
                    s += c * x[j] * bn[i][j]
        return s % self.denom

    def b_value(self, x, y) -> Fraction:
        return Fraction(self.bn(x, y), self.denom)

    def q_value(self, x) -> Fraction:
        return Fraction(self.qn(x), self.denom)

    # -- validation -----------------------------------------------------------

    def _validate(self) -> None:
        G = self.group
        r = G.rank
        for C in self.b, self._bn:
            for i in range(r):
                for j in range(r):
                    if C[i][j] != C[j][i]:
                        raise LinkingFormError("b is not symmetric")
        m = self.denom
        for i, d in enumerate(G.divisors):
            if any((d * self._bn[i][j]) % m for j in range(r)):
                raise LinkingFormError(f"b is not well defined on generator {i}")
            if (d * self._qn[i] + (d * (d - 1) // 2) * self._bn[i][i]) % m:
                raise LinkingFormError(f"q is not well defined on generator {i} (q(a_i g_i) != 0)")
        if G.order <= DEFAULT_MAX_ORDER and not self._nonsingular():
            raise LinkingFormError("b is singular")
        delta = self.defect_functional()
        coeff = self.context.coefficients
        if self.context.characteristic:
            if not G.in_double(self.beta):
                raise LinkingFormError("homogeneity defect must lie in 2G")
            target = tuple(self.bn(G.generator(i), self.beta) for i in range(r))
            if delta != target:
                raise LinkingFormError("q does not have homogeneity defect beta")
        else:
            if any(delta):
                raise LinkingFormError("q must be homogeneous for this k")
            if coeff == "0" and any(self.beta):
                raise LinkingFormError("beta must vanish when the coefficient group is trivial")

    def _nonsingular(self) -> bool:
        G = self.group
        gens = [G.generator(i) for i in range(G.rank)]
        for x in G.elements():
            if any(x) and all(self.bn(x, g) == 0 for g in gens):
                return False
        return True

    def defect_functional(self) -> tuple[int, ...]:
        """Numerators of ``q(g_i) - q(-g_i) = 2 q(g_i) - b(g_i, g_i)``."""
        m = self.denom
        return tuple((2 * self._qn[i] - self._bn[i][i]) % m for i in range(self.group.rank))

    @property
    def is_homogeneous(self) -> bool:
        return not any(self.defect_functional())

    @property
    def order(self) -> int:
        return self.group.order

    def elements(self):
        return self.group.elements()

    def with_context(self, k: int | KContext) -> "QuadraticLinkingForm":
        ctx = k if isinstance(k, KContext) else KContext(k)
        return QuadraticLinkingForm(self.group, self.b, self.q, self.beta, ctx)

    def shifted(self, c) -> "QuadraticLinkingForm":
        """``q + b(-, c)``, whose homogeneity defect is ``beta + 2c``."""
        G = self.group
        c = G.reduce(c)
        q = tuple(self.q[i] + self.b_value(G.generator(i), c) for i in range(G.rank))
        beta = G.add(self.beta, G.scale(2, c))
        return QuadraticLinkingForm(G, self.b, q, beta, self.context)

    def restrict(self, gens: Sequence[Sequence[int]], orders: Sequence[int]) -> "QuadraticLinkingForm":
        """The form on the subgroup generated by ``gens``, assumed to be a direct sum of the ``<h_i>``.

        The homogeneity defect is not carried over.
        """
        b = tuple(tuple(self.b_value(x, y) for y in gens) for x in gens)
        q = tuple(self.q_value(x) for x in gens)
        return QuadraticLinkingForm(FiniteAbelianGroup(tuple(orders)), b, q, (), self.context)


def trivial_form(k: int | KContext = 3) -> QuadraticLinkingForm:
    ctx = k if isinstance(k, KContext) else KContext(k)
    return QuadraticLinkingForm(FiniteAbelianGroup(()), (), (), (), ctx)


# ---------------------------------------------------------------------------
# catalog of indecomposables


def _ctx(k) -> KContext:
    return k if isinstance(k, KContext) else KContext(k)


def catalog_cyclic(p: int, j: int, theta: int, k: int | KContext = 3) -> QuadraticLinkingForm:
    """``q^theta_{p^j}`` on ``Z_{p^j}`` with ``b(x, x) = theta / p^j``.

    For odd ``p`` the value ``q(x) = theta / 2p^j`` is read with the 2 inverted
    modulo ``p^j``; this agrees with ``theta/2p^j`` for even ``theta`` and is
    the only homogeneous refinement when ``theta`` is odd.
    """
    if not is_prime(p):
        raise LinkingFormError(f"{p} is not prime")
    if j < 1:
        raise LinkingFormError("j must be positive")
    pj = p**j
    if math.gcd(theta, p) != 1:
        raise LinkingFormError(f"theta={theta} is not prime to p={p}")
    if not -pj < theta < pj:
        raise LinkingFormError(f"theta={theta} out of range (-{pj}, {pj})")
    if p == 2:
        q = Fraction(theta, 2 * pj)
    else:
        q = Fraction(theta * (pj + 1) // 2 % pj, pj)
    return QuadraticLinkingForm(FiniteAbelianGroup((pj,)), ((Fraction(theta, pj),),), (q,), (), _ctx(k))


def catalog_hyperbolic(j: int, k: int | KContext = 3) -> QuadraticLinkingForm:
    if j < 1:
        raise LinkingFormError("j must be at least 1")
    n = 2**j
    h = Fraction(1, n)
    return QuadraticLinkingForm(FiniteAbelianGroup((n, n)), ((0, h), (h, 0)), (0, 0), (), _ctx(k))


def catalog_pseudo_hyperbolic(j: int, k: int | KContext = 3) -> QuadraticLinkingForm:
    if j < 1:
        raise LinkingFormError("j must be at least 1")
    n = 2**j
    d, h = Fraction(2, n), Fraction(1, n)
    return QuadraticLinkingForm(FiniteAbelianGroup((n, n)), ((d, h), (h, d)), (h, h), (), _ctx(k))


def direct_sum(*forms: QuadraticLinkingForm) -> QuadraticLinkingForm:
    if not forms:
        return trivial_form()
    ctx = forms[0].context
    if any(f.context != ctx for f in forms):
        raise LinkingFormError("direct sum of forms with different k contexts")
    divisors = sum((f.group.divisors for f in forms), ())
    r = len(divisors)
    b = [[Fraction(0)] * r for _ in range(r)]
    q, beta, off = [], [], 0
    for f in forms:
        for i in range(f.group.rank):
            for j in range(f.group.rank):
                b[off + i][off + j] = f.b[i][j]
        q.extend(f.q)
        beta.extend(f.beta)
        off += f.group.rank
    return QuadraticLinkingForm(FiniteAbelianGroup(divisors), tuple(map(tuple, b)), tuple(q), tuple(beta), ctx)


# ---------------------------------------------------------------------------
# isomorphisms


@dataclass(frozen=True)
class Isomorphism:
    """Group isomorphism ``source -> target`` given by generator images."""

    source: QuadraticLinkingForm
    target: QuadraticLinkingForm
    images: tuple[tuple[int, ...], ...]

    def __call__(self, x) -> tuple[int, ...]:
        G = self.target.group
        out = G.zero
        for c, h in zip(x, self.images):
            if c:
                out = G.add(out, G.scale(c, h))
        return out

    def map_beta(self, beta) -> tuple[int, ...]:
        out = self(beta)
        if self.target.context.coefficients == "Z/2":
            out = tuple(c % math.gcd(2, d) for c, d in zip(out, self.target.group.divisors))
        return out

    def inverse(self) -> "Isomorphism":
        G1, G2 = self.source.group, self.target.group
        table = {self(x): x for x in G1.elements()}
        return Isomorphism(self.target, self.source, tuple(table[G2.generator(i)] for i in range(G2.rank)))

    def compose(self, then: "Isomorphism") -> "Isomorphism":
        """``then ∘ self``."""
        return Isomorphism(self.source, then.target, tuple(then(h) for h in self.images))

    def verify(self) -> bool:
        """Exhaustive check that the map is a bijective isometry carrying beta to beta."""
        f1, f2 = self.source, self.target
        G1, G2 = f1.group, f2.group
        if G1.order != G2.order:
            return False
        for i, d in enumerate(G1.divisors):
            if G2.scale(d, self.images[i]) != G2.zero:
                return False
        if len({self(x) for x in G1.elements()}) != G2.order:
            return False
        m1, m2 = f1.denom, f2.denom
        for x in G1.elements():
            if Fraction(f1.qn(x), m1) != Fraction(f2.qn(self(x)), m2):
                return False
        gens = [G1.generator(i) for i in range(G1.rank)]
        for x in gens:
            for y in gens:
                if Fraction(f1.bn(x, y), m1) != Fraction(f2.bn(self(x), self(y)), m2):
                    return False
        return self.map_beta(f1.beta) == f2.beta


def identity_isomorphism(f: QuadraticLinkingForm) -> Isomorphism:
    return Isomorphism(f, f, tuple(f.group.generator(i) for i in range(f.group.rank)))


def q_histogram(f: QuadraticLinkingForm) -> dict[Fraction, int]:
    hist: dict[Fraction, int] = {}
    for x in f.elements():
        v = f.q_value(x)
        hist[v] = hist.get(v, 0) + 1
    return hist


def are_isomorphic(
    f1: QuadraticLinkingForm,
    f2: QuadraticLinkingForm,
    budget: int | None = None,
    max_order: int = DEFAULT_MAX_ORDER,
) -> Isomorphism | None:
    """Exhaustive search for an isomorphism ``f1 -> f2``.

    Generator images are chosen among elements of ``G_2`` killed by the
    generator's order, with matching ``q`` value and pairwise ``b`` values.
    A map preserving a nonsingular ``b`` is injective, so equal orders make
    it bijective. Returns ``None`` only when the search space is exhausted;
    raises :class:`Undecided` when ``budget`` (search nodes) runs out or the
    groups exceed ``max_order``.
    """
    budget = DEFAULT_NODE_BUDGET if budget is None else budget
    if f1.context != f2.context:
        raise LinkingFormError("cannot compare forms over different k contexts")
    G1, G2 = f1.group, f2.group
    if G1.order != G2.order:
        return None
    if G1.order > max_order:
        raise Undecided(f"group order {G1.order} exceeds the bound {max_order}")
    if G1.rank == 0:
        return Isomorphism(f1, f2, ())

    m = math.lcm(f1.denom, f2.denom)
    s1, s2 = m // f1.denom, m // f2.denom
    elems2 = list(G2.elements())
    q2 = {h: f2.qn(h) * s2 for h in elems2}
    if sorted(q2.values()) != sorted(f1.qn(x) * s1 for x in G1.elements()):
        return None

    gens1 = [G1.generator(i) for i in range(G1.rank)]
    b1 = [[f1.bn(x, y) * s1 for y in gens1] for x in gens1]
    cands = []
    for i, d in enumerate(G1.divisors):
        qi = f1.qn(gens1[i]) * s1
        cands.append(
            [h for h in elems2 if q2[h] == qi and G2.scale(d, h) == G2.zero and f2.bn(h, h) * s2 == b1[i][i]]
        )
        if not cands[-1]:
            return None

    nodes = 0
    chosen: list[tuple[int, ...]] = []

    def search(i: int):
        nonlocal nodes
        if i == G1.rank:
            iso = Isomorphism(f1, f2, tuple(chosen))
            return iso if iso.map_beta(f1.beta) == f2.beta else None
        for h in cands[i]:
            nodes += 1
            if nodes > budget:
                raise Undecided(f"isomorphism search exceeded {budget} nodes")
            if all(f2.bn(chosen[j], h) * s2 == b1[j][i] for j in range(i)):
                chosen.append(h)
                found = search(i + 1)
                if found is not None:
                    return found
                chosen.pop()
        return None

    return search(0)


# ---------------------------------------------------------------------------
# p-primary parts and cyclic decompositions


def primary_part(f: QuadraticLinkingForm, p: int) -> QuadraticLinkingForm:
    """Restriction of a homogeneous form to its ``p``-primary subgroup."""
    G = f.group
    gens, orders = [], []
    for i, d in enumerate(G.divisors):
        pv = 1
        while d % (pv * p) == 0:
            pv *= p
        if pv > 1:
            gens.append(G.scale(d // pv, G.generator(i)))
            orders.append(pv)
    return f.restrict(gens, orders)


def _b_numerators(b, denom):
    return tuple(tuple(int(mod1(x) * denom) % denom for x in row) for row in b)


@lru_cache(maxsize=None)
def _cyclic_split(divisors: tuple[int, ...], bn: tuple, denom: int, elements: frozenset):
    """Generators of an orthogonal cyclic splitting of the subgroup ``elements``, or None."""
    if len(elements) == 1:
        return ()
    G = FiniteAbelianGroup(divisors)
    r = len(divisors)

    def bval(x, y):
        return sum(x[i] * y[j] * bn[i][j] for i in range(r) if x[i] for j in range(r) if y[j]) % denom

    for g in sorted(elements):
        if not any(g):
            continue
        og = G.element_order(g)
        # <g> splits off orthogonally iff b(g, g) has order ord(g)
        if og != denom // math.gcd(bval(g, g), denom):
            continue
        comp = frozenset(x for x in elements if bval(x, g) == 0)
        rest = _cyclic_split(divisors, bn, denom, comp)
        if rest is not None:
            return (g,) + rest
    return None


def b_primary_part(divisors: Sequence[int], b, p: int) -> tuple[tuple[int, ...], tuple]:
    """``(orders, b)`` of the ``p``-primary part of a linking form given on generators."""
    gens, orders = [], []
    for i, d in enumerate(divisors):
        pv = 1
        while d % (pv * p) == 0:
            pv *= p
        if pv > 1:
            gens.append((i, d // pv))
            orders.append(pv)
    sub = tuple(tuple(mod1(b[i][j] * ci * cj) for j, cj in gens) for i, ci in gens)
    return tuple(orders), sub


def cyclic_sum_decomposition_b(divisors: Sequence[int], b, max_order: int = 1024):
    """An orthogonal cyclic splitting of the linking form ``b``, or None if none exists.

    Works one primary part at a time. Within a part the search is exhaustive:
    every element spanning an orthogonal cyclic summand is tried, and the
    orthogonal complement is searched recursively. The result lists, per prime,
    the part's orders and the generators found (in primary-part coordinates).
    """
    divisors = tuple(divisors)
    order = math.prod(divisors)
    out = {}
    for p in prime_factors(order) if order > 1 else []:
        orders, sub = b_primary_part(divisors, b, p)
        size = math.prod(orders)
        if size > max_order:
            raise Undecided(f"{p}-primary part of order {size} exceeds the bound {max_order}")
        denom = 2 * math.lcm(*orders)
        elems = frozenset(itertools.product(*(range(d) for d in orders)))
        gens = _cyclic_split(orders, _b_numerators(sub, denom), denom, elems)
        if gens is None:
            return None
        out[p] = (orders, sub, gens)
    return out


def is_cyclic_sum_b(divisors: Sequence[int], b, max_order: int = 1024) -> bool:
    """Whether the linking form ``b`` is an orthogonal sum of cyclic forms."""
    return cyclic_sum_decomposition_b(divisors, b, max_order) is not None


def check_cyclic_splitting(orders: Sequence[int], b, gens) -> bool:
    """Independent check that ``gens`` split ``(orders, b)`` into orthogonal cyclic summands."""
    G = FiniteAbelianGroup(tuple(orders))

    def bval(x, y):
        return mod1(sum(x[i] * y[j] * b[i][j] for i in range(G.rank) for j in range(G.rank)))

    if math.prod(G.element_order(g) for g in gens) != G.order:
        return False
    for i, g in enumerate(gens):
        if bval(g, g).denominator != G.element_order(g):
            return False
        if any(bval(g, h) for h in gens[i + 1 :]):
            return False
    return True


def is_cyclic_sum(f: QuadraticLinkingForm, max_order: int = 1024) -> bool:
    return is_cyclic_sum_b(f.group.divisors, f.b, max_order)

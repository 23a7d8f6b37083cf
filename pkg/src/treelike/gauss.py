"""Gauss sums in exact cyclotomic arithmetic and the Milgram invariant.

Elements of ``Z[ζ_N]`` are sparse dicts ``{exponent mod N: coefficient}``.
Zero-testing reduces modulo the cyclotomic polynomial using the identity
``Φ_N(x) = Φ_r(x^{N/r})`` with ``r`` the radical of ``N``: a polynomial
``Σ_s x^s F_s(x^{N/r})`` vanishes at ``ζ_N`` iff every ``F_s`` is divisible
by ``Φ_r``.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .linking import LinkingFormError, QuadraticLinkingForm, prime_factors


class IntegrityError(ArithmeticError):
    pass


Cyclo = dict  # exponent -> int


def c_mul(a: Cyclo, b: Cyclo, n: int) -> Cyclo:
    out: Cyclo = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = (e1 + e2) % n
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def c_sub(a: Cyclo, b: Cyclo) -> Cyclo:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) - c
    return {e: c for e, c in out.items() if c}


def c_monomial(e: int, n: int, c: int = 1) -> Cyclo:
    return {e % n: c}


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of ``Φ_n``, lowest degree first."""
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _exact_div(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _exact_div(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


def _reduce_mod(poly: list[int], mod: tuple[int, ...]) -> list[int]:
    poly = poly[:]
    dm = len(mod) - 1
    for i in range(len(poly) - 1, dm - 1, -1):
        c = poly[i]
        if c:
            for j in range(dm + 1):
                poly[i - dm + j] -= c * mod[j]
    return poly[:dm]


def c_is_zero(a: Cyclo, n: int) -> bool:
    if not a:
        return True
    r = math.prod(prime_factors(n)) if n > 1 else 1
    step = n // r
    phi_r = cyclotomic_polynomial(r)
    blocks: dict[int, list[int]] = {}
    for e, c in a.items():
        s, t = e % step, e // step
        blocks.setdefault(s, [0] * r)[t] += c
    return all(not any(_reduce_mod(poly, phi_r)) for poly in blocks.values())


def c_equal(a: Cyclo, b: Cyclo, n: int) -> bool:
    return c_is_zero(c_sub(a, b), n)


def sqrt_in_cyclotomic(m: int, n: int) -> Cyclo:
    """The positive real ``√m`` as an element of ``Z[ζ_n]``.

    Odd primes ``p`` use the quadratic Gauss sum ``Σ ζ_p^{x²}``, equal to
    ``√p`` (``p ≡ 1 mod 4``) or ``i√p`` (``p ≡ 3 mod 4``); ``√2 = ζ_8 + ζ_8^{-1}``.
    Needs ``8 | n`` and every odd prime of ``m`` dividing ``n``.
    """
    if n % 8:
        raise ValueError("need 8 | n")
    out: Cyclo = {0: 1}
    for p in prime_factors(m):
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        out = {k: v * p ** (e // 2) for k, v in out.items()}
        if e % 2 == 0:
            continue
        if p == 2:
            root = {n // 8: 1, (-n // 8) % n: 1}
        else:
            if n % p:
                raise ValueError(f"{p} does not divide {n}")
            g: Cyclo = {}
            for x in range(p):
                k = (x * x % p) * (n // p)
                g[k] = g.get(k, 0) + 1
            root = g if p % 4 == 1 else c_mul(g, c_monomial(-n // 4, n), n)  # times -i
        out = c_mul(out, root, n)
    return out


def gauss_sum(f: QuadraticLinkingForm) -> tuple[Cyclo, int]:
    """``Σ_x exp(2πi q(x))`` as an element of ``Z[ζ_N]``, ``N = 8 exp(G)``."""
    n = 8 * f.group.exponent
    scale = n // f.denom
    total: Cyclo = {}
    for x in f.elements():
        e = f.qn(x) * scale % n
        total[e] = total.get(e, 0) + 1
    return total, n


def gauss_milgram(f: QuadraticLinkingForm) -> int:
    """The ``σ mod 8`` with ``Σ_x e^{2πi q(x)} = √|G| e^{2πi σ/8}``."""
    if not f.is_homogeneous:
        raise LinkingFormError("the Gauss-sum invariant is only defined here for homogeneous q")
    s, n = gauss_sum(f)
    root = sqrt_in_cyclotomic(f.order, n)
    for sigma in range(8):
        if c_equal(s, c_mul(root, c_monomial(sigma * n // 8, n), n), n):
            return sigma
    raise IntegrityError("Gauss sum is not of the form √|G| · ζ_8^σ")

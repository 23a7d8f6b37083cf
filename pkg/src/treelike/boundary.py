"""The algebraic boundary of a nondegenerate extended quadratic form.

``G = coker(A)`` is presented through the Smith normal form ``P A Q = D``:
a dual vector ``x`` maps to ``(P x)_i mod d_i`` over the divisors ``d_i > 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact_linalg import (
    IntMatrix,
    RatMatrix,
    SingularMatrixError,
    SnfResult,
    as_int_matrix,
    block_diag,
    det,
    inverse_unimodular,
    invert_rational,
    smith_normal_form,
)
from .linking import (
    FiniteAbelianGroup,
    KContext,
    LinkingFormError,
    QuadraticLinkingForm,
    are_isomorphic,
    mod1,
)


class ContractError(ValueError):
    """The form violates the evenness/characteristic contract for its ``k``."""


@dataclass(frozen=True)
class ExtendedQuadraticForm:
    matrix: IntMatrix
    alpha: tuple[int, ...] = ()
    context: KContext = field(default_factory=lambda: KContext(3))

    def __post_init__(self):
        m = as_int_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if not m.is_symmetric():
            raise ContractError("form matrix must be symmetric")
        alpha = tuple(int(a) for a in self.alpha) if self.alpha else (0,) * m.rows
        if len(alpha) != m.rows:
            raise ContractError("alpha must have one entry per basis vector")
        ctx = self.context
        if ctx.coefficients == "Z/2":
            alpha = tuple(a % 2 for a in alpha)
        object.__setattr__(self, "alpha", alpha)
        diag = [m[i, i] for i in range(m.rows)]
        if ctx.characteristic:
            if any((a - d) % 2 for a, d in zip(alpha, diag)):
                raise ContractError("alpha is not characteristic for the form")
        else:
            if any(d % 2 for d in diag):
                raise ContractError(f"the form must be even for k={ctx.k}")
            if ctx.coefficients == "0" and any(alpha):
                raise ContractError(f"alpha must vanish for k={ctx.k}")

    @property
    def rank(self) -> int:
        return self.matrix.rows

    def __add__(self, other: "ExtendedQuadraticForm") -> "ExtendedQuadraticForm":
        if self.context != other.context:
            raise ContractError("orthogonal sum across different k")
        return ExtendedQuadraticForm(block_diag(self.matrix, other.matrix), self.alpha + other.alpha, self.context)

    def transported(self, u) -> "ExtendedQuadraticForm":
        """The same form written in the basis given by the columns of ``u``."""
        u = as_int_matrix(u)
        m = u.transpose() @ self.matrix @ u
        # alpha is a dual vector: it pulls back along u
        alpha = u.transpose().apply(self.alpha)
        return ExtendedQuadraticForm(m, alpha, self.context)


def extended(matrix, k: int | KContext = 3, alpha: Sequence[int] = ()) -> ExtendedQuadraticForm:
    ctx = k if isinstance(k, KContext) else KContext(k)
    return ExtendedQuadraticForm(as_int_matrix(matrix), tuple(alpha), ctx)


@dataclass(frozen=True)
class BoundaryPresentation:
    """``∂f`` together with the projection ``π: H* -> G`` that produced it."""

    source: ExtendedQuadraticForm
    form: QuadraticLinkingForm
    snf: SnfResult
    kept: tuple[int, ...]  # SNF positions with divisor > 1
    p_inv: IntMatrix
    inverse: RatMatrix

    def project(self, x: Sequence[int]) -> tuple[int, ...]:
        px = self.snf.P.apply(tuple(x))
        return self.form.group.reduce([px[t] for t in self.kept])

    def lift(self, g: Sequence[int]) -> tuple[int, ...]:
        """A dual vector ``x`` with ``π(x) = g``."""
        y = [0] * self.source.rank
        for t, c in zip(self.kept, g):
            y[t] = int(c)
        return self.p_inv.apply(y)

    def inverse_pairing(self, x, y) -> Fraction:
        """``λ^{-1}(x, y) = x^T A^{-1} y`` in Q."""
        ay = self.inverse.apply(tuple(y))
        return sum((Fraction(a) * b for a, b in zip(x, ay)), Fraction(0))

    def q_direct(self, x) -> Fraction:
        """``q(π(x))`` evaluated straight from the defining formula."""
        lam = self.inverse_pairing(x, x)
        if self.source.context.characteristic:
            lam += self.inverse_pairing(x, self.source.alpha)
        return mod1(lam / 2)


def boundary_presentation(f: ExtendedQuadraticForm) -> BoundaryPresentation:
    A = f.matrix
    d = det(A)
    if d == 0:
        raise SingularMatrixError("boundary of a degenerate form", det=0)
    snf = smith_normal_form(A)
    kept = tuple(i for i, a in enumerate(snf.divisors) if a > 1)
    divisors = tuple(snf.divisors[i] for i in kept)
    p_inv = inverse_unimodular(snf.P)
    ainv = invert_rational(A)
    cols = [p_inv.apply(tuple(int(i == t) for i in range(A.rows))) for t in kept]

    def pair(x, y):
        ay = ainv.apply(tuple(y))
        return sum((Fraction(a) * b for a, b in zip(x, ay)), Fraction(0))

    ctx = f.context
    b = tuple(tuple(mod1(pair(x, y)) for y in cols) for x in cols)
    if ctx.characteristic:
        q = tuple(mod1((pair(x, x) + pair(x, f.alpha)) / 2) for x in cols)
    else:
        q = tuple(mod1(pair(x, x) / 2) for x in cols)

    pa = snf.P.apply(f.alpha)
    if ctx.coefficients == "0":
        beta = (0,) * len(kept)
    elif ctx.coefficients == "Z/2":
        beta = tuple(pa[t] % math.gcd(2, snf.divisors[t]) for t in kept)
    else:
        beta = tuple(pa[t] % snf.divisors[t] for t in kept)
    G = FiniteAbelianGroup(divisors)
    if ctx.characteristic and not G.in_double(beta):
        raise ContractError("boundary defect beta is not in 2G; alpha is not characteristic")
    try:
        form = QuadraticLinkingForm(G, b, q, beta, ctx)
    except LinkingFormError as exc:  # pragma: no cover - would be an internal bug
        raise ContractError(f"boundary data failed validation: {exc}") from exc
    return BoundaryPresentation(f, form, snf, kept, p_inv, ainv)


def boundary(f: ExtendedQuadraticForm) -> QuadraticLinkingForm:
    return boundary_presentation(f).form


def boundary_of_matrix(matrix, k: int | KContext = 3, alpha: Sequence[int] = ()) -> QuadraticLinkingForm:
    return boundary(extended(matrix, k, alpha))


def boundary_b(matrix) -> tuple[tuple[int, ...], tuple[tuple[Fraction, ...], ...]]:
    """Divisors and linking matrix of ``coker(A)`` for any nondegenerate symmetric ``A``.

    Unlike :func:`boundary` this needs no evenness, since no refinement is built.
    """
    A = as_int_matrix(matrix)
    if det(A) == 0:
        raise SingularMatrixError("boundary of a degenerate form", det=0)
    snf = smith_normal_form(A)
    kept = [i for i, a in enumerate(snf.divisors) if a > 1]
    p_inv = inverse_unimodular(snf.P)
    ainv = invert_rational(A)
    cols = [p_inv.apply(tuple(int(i == t) for i in range(A.rows))) for t in kept]
    b = tuple(
        tuple(mod1(sum((Fraction(a) * c for a, c in zip(x, ainv.apply(y))), Fraction(0))) for y in cols)
        for x in cols
    )
    return tuple(snf.divisors[i] for i in kept), b


def is_nonsingular(f) -> bool:
    m = f.matrix if isinstance(f, ExtendedQuadraticForm) else as_int_matrix(f)
    return abs(det(m)) == 1


def boundary_is_trivial(f) -> bool:
    m = f.matrix if isinstance(f, ExtendedQuadraticForm) else as_int_matrix(f)
    snf = smith_normal_form(m)
    return snf.rank == m.rows and all(a == 1 for a in snf.divisors)


def stable_sum_invariance_check(f_nd: ExtendedQuadraticForm, f_ns: ExtendedQuadraticForm, budget=None) -> bool:
    """``∂(f_nd ⊕ f_ns) ≅ ∂(f_nd)`` for nonsingular ``f_ns``; raises ``Undecided`` on budget."""
    if not is_nonsingular(f_ns):
        raise ValueError("second summand must be nonsingular")
    return are_isomorphic(boundary(f_nd + f_ns), boundary(f_nd), budget=budget) is not None

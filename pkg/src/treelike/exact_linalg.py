"""Exact integer and rational matrix kernel.

Everything here works on arbitrary-precision Python ints and
:class:`fractions.Fraction`; nothing is ever converted to floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class ShapeError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    """Raised when an operation needs a nonsingular matrix."""

    def __init__(self, message: str, det: int = 0):
        super().__init__(message)
        self.det = det


@dataclass(frozen=True)
class _Matrix:
    rows: int
    cols: int
    entries: tuple  # row-major tuple of row tuples

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ShapeError(f"entries do not match shape {self.rows}x{self.cols}")

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __iter__(self):
        return iter(self.entries)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square and all(
            self.entries[i][j] == self.entries[j][i] for i in range(self.rows) for j in range(i)
        )

    def is_skew(self) -> bool:
        return self.is_square and all(
            self.entries[i][j] == -self.entries[j][i]
            for i in range(self.rows)
            for j in range(i + 1)
        )

    def tolist(self) -> list[list]:
        return [list(r) for r in self.entries]

    def transpose(self):
        return type(self)(
            self.cols,
            self.rows,
            tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)),
        )

    def __matmul__(self, other: "_Matrix"):
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ocols = list(zip(*other.entries)) if other.rows else [() for _ in range(other.cols)]
        out = tuple(
            tuple(sum((a * b for a, b in zip(row, col)), 0) for col in ocols) for row in self.entries
        )
        kind = RatMatrix if isinstance(self, RatMatrix) or isinstance(other, RatMatrix) else IntMatrix
        return kind(self.rows, other.cols, out)

    def apply(self, v: Sequence) -> tuple:
        """Matrix-vector product ``M v``."""
        if len(v) != self.cols:
            raise ShapeError("vector length mismatch")
        return tuple(sum((a * b for a, b in zip(row, v)), 0) for row in self.entries)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]):
        return type(self)(len(rows), len(cols), tuple(tuple(self.entries[i][j] for j in cols) for i in rows))


class IntMatrix(_Matrix):
    """Integer matrix. Construct with :meth:`from_rows` or :func:`as_int_matrix`."""

    def __post_init__(self):
        super().__post_init__()
        for r in self.entries:
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise TypeError(f"IntMatrix entries must be int, got {x!r}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int | None = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in r) for r in rows)
        ncols = len(data[0]) if data else (cols or 0)
        return cls(len(data), ncols, data)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, r: int, c: int) -> "IntMatrix":
        return cls(r, c, tuple((0,) * c for _ in range(r)))


class RatMatrix(_Matrix):
    """Rational matrix; entries are normalized :class:`Fraction` values."""

    def __post_init__(self):
        super().__post_init__()
        for r in self.entries:
            for x in r:
                if not isinstance(x, (Fraction, int)) or isinstance(x, bool):
                    raise TypeError(f"RatMatrix entries must be rational, got {x!r}")

    @classmethod
    def from_rows(cls, rows) -> "RatMatrix":
        data = tuple(tuple(Fraction(x) for x in r) for r in rows)
        return cls(len(data), len(data[0]) if data else 0, data)


def as_int_matrix(m) -> IntMatrix:
    if isinstance(m, IntMatrix):
        return m
    if isinstance(m, _Matrix):
        return IntMatrix.from_rows(m.entries, m.cols)
    return IntMatrix.from_rows(m)


def block_diag(*blocks) -> IntMatrix:
    blocks = [as_int_matrix(b) for b in blocks]
    n = sum(b.rows for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        if not b.is_square:
            raise ShapeError("block_diag needs square blocks")
        for i in range(b.rows):
            for j in range(b.cols):
                out[off + i][off + j] = b.entries[i][j]
        off += b.rows
    return IntMatrix(n, n, tuple(tuple(r) for r in out))


def congruent(u, a) -> IntMatrix:
    """Return ``u^T a u``."""
    u = as_int_matrix(u)
    return u.transpose() @ as_int_matrix(a) @ u


# ---------------------------------------------------------------------------
# determinant


def det(m) -> int:
    """Fraction-free (Bareiss) determinant."""
    m = as_int_matrix(m)
    if not m.is_square:
        raise ShapeError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return 1
    a = [list(r) for r in m.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfResult:
    """``P @ A @ Q == D`` with ``P, Q`` unimodular and ``D`` diagonal."""

    P: IntMatrix
    Q: IntMatrix
    D: IntMatrix
    divisors: tuple[int, ...]  # nonzero diagonal entries, each dividing the next

    @property
    def rank(self) -> int:
        return len(self.divisors)


def smith_normal_form(m) -> SnfResult:
    """Smith normal form with tracked unimodular transforms.

    Pivots on the nonzero entry of least absolute value, ties broken by
    row-major scan order.
    """
    m = as_int_matrix(m)
    nr, nc = m.rows, m.cols
    a = [list(r) for r in m.entries]
    P = [[int(i == j) for j in range(nr)] for i in range(nr)]
    Q = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row dst += c * row src
        if c:
            a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
            P[dst] = [x + c * y for x, y in zip(P[dst], P[src])]

    def add_col(src, dst, c):  # col dst += c * col src
        if c:
            for row in a:
                row[dst] += c * row[src]
            for row in Q:
                row[dst] += c * row[src]

    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(t, i, -(a[i][t] // p))
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(t, j, -(a[t][j] // p))
                    if a[t][j]:
                        dirty = True
            if not dirty:
                # pivot clears its row and column; enforce divisibility of the rest
                bad = next(
                    ((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                add_row(bad[0], t, 1)
                continue
            # move the smallest remaining entry of row/col t into the pivot slot
            cands = [(abs(a[i][t]), i, t) for i in range(t, nr) if a[i][t]]
            cands += [(abs(a[t][j]), t, j) for j in range(t, nc) if a[t][j]]
            _, i, j = min(cands)
            if i != t:
                swap_rows(t, i)
            elif j != t:
                swap_cols(t, j)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            P[t] = [-x for x in P[t]]
        t += 1

    divisors = tuple(a[i][i] for i in range(t))
    return SnfResult(
        IntMatrix.from_rows(P, nr),
        IntMatrix.from_rows(Q, nc),
        IntMatrix.from_rows(a, nc),
        divisors,
    )


# ---------------------------------------------------------------------------
# rational inverse and signature


def invert_rational(m) -> RatMatrix:
    """Exact inverse over Q by fraction-free Gauss-Jordan elimination.

    All intermediate entries stay integral; after step ``k`` every division by
    the previous pivot is exact. The pivots end equal to ``det`` and the right
    block to ``det * m^-1``.
    """
    m = as_int_matrix(m)
    if not m.is_square:
        raise ShapeError("inverse of a non-square matrix")
    n = m.rows
    a = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(m.entries)]
    prev = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular", det=0)
        a[c], a[piv] = a[piv], a[c]
        p, row = a[c][c], a[c]
        for i in range(n):
            if i != c:
                f, ri = a[i][c], a[i]
                a[i] = [(p * x - f * y) // prev for x, y in zip(ri, row)]
        prev = p
    d = a[0][0]
    return RatMatrix(n, n, tuple(tuple(Fraction(x, d) for x in r[n:]) for r in a))


def inverse_unimodular(m) -> IntMatrix:
    inv = invert_rational(m)
    if any(x.denominator != 1 for r in inv for x in r):
        raise ValueError("matrix is not unimodular")
    return IntMatrix.from_rows([[int(x) for x in r] for r in inv], m.cols)


def inertia(m) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric matrix.

    Symmetric Gaussian elimination over Q (congruence diagonalization).
    When no usable diagonal pivot exists, a basis vector ``e_i + e_j`` with
    ``2 a_ij != 0`` is brought in as pivot.
    """
    m = as_int_matrix(m)
    if not m.is_symmetric():
        raise ValueError("inertia needs a symmetric matrix")
    a = [[Fraction(x) for x in r] for r in m.entries]
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # x_i <- x_i + x_j  (row and column operation)
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for i in active:
            f = a[i][piv] / d
            if f:
                for k in range(n):
                    a[i][k] -= f * a[piv][k]
                for k in range(n):
                    a[k][i] -= f * a[k][piv]
    return pos, neg, n - pos - neg


def signature(m) -> int:
    """Signature of a nondegenerate symmetric integer matrix."""
    pos, neg, zero = inertia(m)
    if zero:
        raise SingularMatrixError("signature of a degenerate form", det=0)
    return pos - neg


def radical_split(m) -> tuple[IntMatrix, IntMatrix, int]:
    """Split a symmetric form as ``A0 ⊕ 0^t``.

    Returns ``(U, A0, t)`` where ``U`` is unimodular and
    ``U^T m U = block_diag(A0, zeros(t))`` with ``A0`` nondegenerate.
    """
    m = as_int_matrix(m)
    if not m.is_symmetric():
        raise ValueError("radical_split needs a symmetric matrix")
    snf = smith_normal_form(m)
    r = snf.rank
    n = m.rows
    # last n - r columns of Q span the kernel; the first r complete a basis
    U = snf.Q
    A0 = congruent(U, m).submatrix(range(r), range(r))
    return U, A0, n - r

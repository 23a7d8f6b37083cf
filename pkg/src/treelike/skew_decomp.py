"""Skew 0-labelled forests split into hyperbolic pairs and a zero form by leaf peeling."""

from __future__ import annotations

from dataclasses import dataclass

from .exact_linalg import IntMatrix, block_diag, det
from .tree_forms import SkewLabelledTree, skew_tree_to_form

H_MINUS = IntMatrix.from_rows([[0, 1], [-1, 0]])


@dataclass(frozen=True)
class SkewDecomposition:
    s: int
    t: int
    U: IntMatrix  # columns: e_1, f_1, ..., e_s, f_s, then the zero vectors

    def normal_form(self) -> IntMatrix:
        return block_diag(*([H_MINUS] * self.s), IntMatrix.zeros(self.t, self.t))

    def verify(self, a) -> bool:
        u = self.U
        return (u.transpose() @ a @ u) == self.normal_form() and abs(det(u)) == 1


def decompose_skew_tree(tree: SkewLabelledTree) -> SkewDecomposition:
    """Peel the highest-index leaf ``l`` with its neighbour ``k`` until only isolated vertices remain.

    Before removing ``{l, k}``, every other neighbour ``w`` of ``k`` is replaced
    by ``w + mu l`` with ``mu`` killing the pairing with ``k``. Since ``l``
    pairs only with ``k``, nothing else changes and the rest stays a forest.
    """
    A = skew_tree_to_form(tree)
    n = tree.n
    vec = [[int(i == j) for i in range(n)] for j in range(n)]
    av = [list(A.apply(v)) for v in vec]

    def pair(i, j):
        return sum(x * y for x, y in zip(vec[i], av[j]))

    active = set(range(n))
    cols: list[list[int]] = []
    while True:
        nbrs = {v: [w for w in active if w != v and pair(v, w)] for v in active}
        leaves = [v for v in active if len(nbrs[v]) == 1]
        if not leaves:
            break
        l = max(leaves)
        k = nbrs[l][0]
        lam_lk = pair(l, k)
        for w in nbrs[k]:
            if w == l:
                continue
            mu = -pair(w, k) * lam_lk  # lam_lk = ±1 is its own inverse
            vec[w] = [x + mu * y for x, y in zip(vec[w], vec[l])]
            av[w] = [x + mu * y for x, y in zip(av[w], av[l])]
        lo, hi = min(l, k), max(l, k)
        sign = pair(lo, hi)
        cols.append(vec[lo])
        cols.append([sign * x for x in vec[hi]])
        active -= {l, k}
    s = len(cols) // 2
    zeros = sorted(active)
    cols.extend(vec[v] for v in zeros)
    U = IntMatrix.from_rows(cols, n).transpose() if n else IntMatrix.zeros(0, 0)
    out = SkewDecomposition(s, len(zeros), U)
    if not out.verify(A):
        raise ArithmeticError("skew decomposition failed its own check")  # pragma: no cover
    return out

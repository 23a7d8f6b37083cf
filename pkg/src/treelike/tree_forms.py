"""Labelled trees, plumbing graphs and the forms they define.

Vertices are indexed ``0..n-1``. Forests are allowed everywhere; callers
that need a single tree check :meth:`LabelledTree.is_connected`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .exact_linalg import IntMatrix, as_int_matrix, block_diag


class TreeError(ValueError):
    pass


def _check_forest(n: int, pairs) -> None:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    seen = set()
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise TreeError(f"edge ({i}, {j}) out of range for {n} vertices")
        if i == j:
            raise TreeError(f"self-loop at vertex {i}")
        key = frozenset((i, j))
        if key in seen:
            raise TreeError(f"more than one edge between {i} and {j}")
        seen.add(key)
        ri, rj = find(i), find(j)
        if ri == rj:
            raise TreeError("edge set contains a cycle")
        parent[ri] = rj


def _components(n: int, pairs) -> list[list[int]]:
    adj = {v: [] for v in range(n)}
    for i, j in pairs:
        adj[i].append(j)
        adj[j].append(i)
    comps, seen = [], set()
    for v in range(n):
        if v in seen:
            continue
        stack, comp = [v], []
        seen.add(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class LabelledTree:
    """Integer-labelled forest with ordered vertices."""

    labels: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(int(a) for a in self.labels))
        norm = tuple(tuple(sorted((int(i), int(j)))) for i, j in self.edges)
        object.__setattr__(self, "edges", norm)
        _check_forest(len(self.labels), norm)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def is_even(self) -> bool:
        return all(a % 2 == 0 for a in self.labels)

    def is_connected(self) -> bool:
        return self.n > 0 and len(self.edges) == self.n - 1

    def components(self) -> list[list[int]]:
        return _components(self.n, self.edges)

    def neighbours(self, v: int) -> list[int]:
        return sorted([j for i, j in self.edges if i == v] + [i for i, j in self.edges if j == v])

    @classmethod
    def chain(cls, labels: Sequence[int]) -> "LabelledTree":
        """The linear tree ``a_1 - a_2 - ... - a_r``."""
        return cls(tuple(labels), tuple((i, i + 1) for i in range(len(labels) - 1)))

    @classmethod
    def disjoint_union(cls, trees: Sequence["LabelledTree"]) -> "LabelledTree":
        labels, edges, off = [], [], 0
        for t in trees:
            labels.extend(t.labels)
            edges.extend((i + off, j + off) for i, j in t.edges)
            off += t.n
        return cls(tuple(labels), tuple(edges))

    def attach_leaves(self, vertex: int, labels: Sequence[int]) -> "LabelledTree":
        """New leaves placed *before* the existing vertices, each joined to ``vertex``."""
        m = len(labels)
        edges = [(i + m, j + m) for i, j in self.edges] + [(k, vertex + m) for k in range(m)]
        return LabelledTree(tuple(labels) + self.labels, tuple(edges))

    def induced(self, keep: Sequence[int]) -> "LabelledTree":
        idx = {v: k for k, v in enumerate(keep)}
        return LabelledTree(
            tuple(self.labels[v] for v in keep),
            tuple((idx[i], idx[j]) for i, j in self.edges if i in idx and j in idx),
        )


def tree_to_form(t: LabelledTree) -> IntMatrix:
    n = t.n
    a = [[0] * n for _ in range(n)]
    for i, lab in enumerate(t.labels):
        a[i][i] = lab
    for i, j in t.edges:
        a[i][j] = a[j][i] = 1
    return IntMatrix.from_rows(a, n)


def form_to_tree(m: IntMatrix) -> LabelledTree:
    """Read a matrix with 0/1 off-diagonal entries and forest adjacency back as a tree."""
    m = as_int_matrix(m)
    if not m.is_symmetric():
        raise TreeError("matrix is not symmetric")
    edges = []
    for i in range(m.rows):
        for j in range(i + 1, m.cols):
            if m[i, j] == 1:
                edges.append((i, j))
            elif m[i, j] != 0:
                raise TreeError(f"off-diagonal entry {m[i, j]} at ({i}, {j}) is not 0 or 1")
    return LabelledTree(tuple(m[i, i] for i in range(m.rows)), tuple(edges))


# ---------------------------------------------------------------------------
# leaf-peeling determinant


def tree_det(t: LabelledTree) -> int:
    """Determinant of the tree form by leaf peeling.

    For a leaf ``l`` attached to ``v``: ``det(T) = a_l det(T - l) - det(T - l - v)``.
    The highest-index leaf is always peeled; forests multiply over components.
    """
    adj = {v: frozenset(t.neighbours(v)) for v in range(t.n)}
    labels = t.labels

    @lru_cache(maxsize=None)
    def det_of(vs: frozenset) -> int:
        if not vs:
            return 1
        out = 1
        for comp in _sub_components(vs):
            out *= det_conn(comp)
            if out == 0:
                return 0
        return out

    def _sub_components(vs: frozenset):
        remaining = set(vs)
        while remaining:
            start = min(remaining)
            stack, comp = [start], {start}
            remaining.discard(start)
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w in remaining:
                        remaining.discard(w)
                        comp.add(w)
                        stack.append(w)
            yield frozenset(comp)

    @lru_cache(maxsize=None)
    def det_conn(comp: frozenset) -> int:
        if len(comp) == 1:
            (v,) = comp
            return labels[v]
        leaf = max(v for v in comp if len(adj[v] & comp) == 1)
        (nb,) = adj[leaf] & comp
        return labels[leaf] * det_of(comp - {leaf}) - det_of(comp - {leaf, nb})

    return det_of(frozenset(range(t.n)))


# ---------------------------------------------------------------------------
# hyperbolic gluing


def hyperbolic_pair() -> LabelledTree:
    return LabelledTree.chain((0, 0))


def glue_summands(trees: Sequence[LabelledTree], anchors: Sequence[int]) -> tuple[LabelledTree, IntMatrix]:
    """Join trees through a fresh hyperbolic pair ``z1 - z2``.

    The trees are laid out in order, followed by ``z1`` and ``z2``; ``z1``
    is joined to each anchor. Returns the glued tree and a unimodular ``U``
    with ``U^T A_glued U = block_diag(A_1, ..., A_m, H_+)``.
    """
    if len(trees) != len(anchors):
        raise TreeError("need exactly one anchor per tree")
    offsets, off = [], 0
    for t, a in zip(trees, anchors):
        if not 0 <= a < t.n:
            raise TreeError(f"anchor {a} out of range for a tree with {t.n} vertices")
        offsets.append(off)
        off += t.n
    z1, z2 = off, off + 1
    base = LabelledTree.disjoint_union(list(trees) + [hyperbolic_pair()])
    glued = LabelledTree(base.labels, base.edges + tuple((o + a, z1) for o, a in zip(offsets, anchors)))
    n = glued.n
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    # block-sum anchor x = glued anchor - z2
    for o, a in zip(offsets, anchors):
        u[z2][o + a] = -1
    return glued, IntMatrix.from_rows(u, n)


def glued_block_form(trees: Sequence[LabelledTree]) -> IntMatrix:
    """``block_diag(A_1, ..., A_m, H_+)``: the target of the gluing witness."""
    return block_diag(*[tree_to_form(t) for t in trees], tree_to_form(hyperbolic_pair()))


# ---------------------------------------------------------------------------
# plumbing graphs


@dataclass(frozen=True)
class PlumbingGraph:
    """Plumbing graph whose vertices carry (Euler number, stable class)."""

    euler: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = ()
    stable_classes: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "euler", tuple(int(e) for e in self.euler))
        if not self.stable_classes:
            object.__setattr__(self, "stable_classes", (0,) * len(self.euler))
        if len(self.stable_classes) != len(self.euler):
            raise TreeError("one stable class per vertex is required")
        norm = tuple(tuple(sorted((int(i), int(j)))) for i, j in self.edges)
        object.__setattr__(self, "edges", norm)
        _check_forest(len(self.euler), norm)

    @property
    def n(self) -> int:
        return len(self.euler)

    def tree(self) -> LabelledTree:
        return LabelledTree(self.euler, self.edges)

    def form(self) -> IntMatrix:
        return tree_to_form(self.tree())

    def check_even(self) -> None:
        if any(e % 2 for e in self.euler):
            raise TreeError("Euler numbers must be even in this context")

    def component_count(self) -> int:
        return len(_components(self.n, self.edges))


def connect_sum_graphs(g1: PlumbingGraph, v1: int | None, g2: PlumbingGraph, v2: int | None) -> PlumbingGraph:
    """Plumb ``g1`` and ``g2`` into a trivial pair ``0 - 0``.

    Vertex order: ``g1``, ``g2``, then the two fresh vertices; the first
    fresh vertex is joined to ``v1`` and ``v2``. An empty graph may be
    passed with vertex ``None``.
    """
    for g, v, name in ((g1, v1, "v1"), (g2, v2, "v2")):
        if g.n == 0:
            if v is not None:
                raise TreeError(f"{name} given for an empty graph")
        elif v is None or not 0 <= v < g.n:
            raise TreeError(f"vertex {name}={v} not found")
    off = g1.n
    hub = g1.n + g2.n
    edges = list(g1.edges) + [(i + off, j + off) for i, j in g2.edges] + [(hub, hub + 1)]
    if g1.n:
        edges.append((v1, hub))
    if g2.n:
        edges.append((v2 + off, hub))
    return PlumbingGraph(
        g1.euler + g2.euler + (0, 0),
        tuple(edges),
        g1.stable_classes + g2.stable_classes + (0, 0),
    )


def connect_sum_witness(g1: PlumbingGraph, v1: int | None, g2: PlumbingGraph, v2: int | None) -> IntMatrix:
    """Unimodular ``U`` with ``U^T A U = A(g1) ⊕ A(g2) ⊕ H_+`` for the connected sum."""
    trees, anchors = [], []
    for g, v in ((g1, v1), (g2, v2)):
        if g.n:
            trees.append(g.tree())
            anchors.append(v)
    _, u = glue_summands(trees, anchors)
    return u


# ---------------------------------------------------------------------------
# skew trees


@dataclass(frozen=True)
class SkewLabelledTree:
    """0-labelled forest with directed, signed edges ``(tail, head, sign)``."""

    n: int
    edges: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        norm = []
        for e in self.edges:
            i, j, s = (int(x) for x in e)
            if s not in (1, -1):
                raise TreeError(f"edge sign must be +1 or -1, got {s}")
            norm.append((i, j, s))
        object.__setattr__(self, "edges", tuple(norm))
        _check_forest(self.n, [(i, j) for i, j, _ in norm])

    def neighbours(self, v: int) -> list[int]:
        return sorted([j for i, j, _ in self.edges if i == v] + [i for i, j, _ in self.edges if j == v])


def skew_tree_to_form(t: SkewLabelledTree) -> IntMatrix:
    a = [[0] * t.n for _ in range(t.n)]
    for i, j, s in t.edges:
        a[i][j] += s
        a[j][i] -= s
    return IntMatrix.from_rows(a, t.n)


# ---------------------------------------------------------------------------
# DOT export


def to_dot(t, name: str = "T") -> str:
    lines = []
    if isinstance(t, SkewLabelledTree):
        lines.append(f"digraph {name} {{")
        for v in range(t.n):
            lines.append(f'  v{v} [label="v{v}: 0"];')
        for i, j, s in t.edges:
            sign = "+" if s > 0 else "-"
            lines.append(f'  v{i} -> v{j} [sign="{s:+d}", label="{sign}"];')
    else:
        labels = t.euler if isinstance(t, PlumbingGraph) else t.labels
        lines.append(f"graph {name} {{")
        for v, a in enumerate(labels):
            lines.append(f'  v{v} [label="v{v}: {a}"];')
        for i, j in t.edges:
            lines.append(f"  v{i} -- v{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"

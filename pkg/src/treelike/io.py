"""JSON encodings of matrices, trees and linking forms."""

from __future__ import annotations

from fractions import Fraction

from .exact_linalg import IntMatrix
from .linking import FiniteAbelianGroup, KContext, QuadraticLinkingForm
from .tree_forms import LabelledTree, SkewLabelledTree


class InputError(ValueError):
    pass


def matrix_to_json(m) -> dict:
    return {"rows": m.rows, "cols": m.cols, "entries": [[str(x) for x in row] for row in m.entries]}


def matrix_from_json(data) -> IntMatrix:
    try:
        if isinstance(data, list):
            rows = [[int(x) for x in row] for row in data]
            return IntMatrix.from_rows(rows)
        rows = [[int(str(x)) for x in row] for row in data["entries"]]
        m = IntMatrix.from_rows(rows, int(data.get("cols", len(rows[0]) if rows else 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad matrix JSON: {exc}") from exc
    if "rows" in data and m.rows != int(data["rows"]):
        raise InputError("row count does not match entries")
    return m


def tree_to_json(t, alpha=None) -> dict:
    if isinstance(t, SkewLabelledTree):
        out = {
            "labels": [0] * t.n,
            "edges": [[i, j] for i, j, _ in t.edges],
            "signs": [s for _, _, s in t.edges],
        }
    else:
        out = {"labels": list(t.labels), "edges": [list(e) for e in t.edges]}
    if alpha is not None:
        out["alpha"] = list(alpha)
    return out


def tree_from_json(data) -> tuple[LabelledTree | SkewLabelledTree, tuple[int, ...]]:
    """The tree and its ``alpha`` (empty when absent). A ``signs`` key selects the skew kind."""
    try:
        labels = [int(x) for x in data["labels"]]
        edges = [(int(i), int(j)) for i, j in data.get("edges", [])]
        alpha = tuple(int(a) for a in data.get("alpha", ()))
        if "signs" in data:
            signs = [int(s) for s in data["signs"]]
            if len(signs) != len(edges):
                raise InputError("one sign per edge is required")
            if any(labels):
                raise InputError("skew trees are 0-labelled")
            return SkewLabelledTree(len(labels), tuple((i, j, s) for (i, j), s in zip(edges, signs))), alpha
        return LabelledTree(tuple(labels), tuple(edges)), alpha
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad tree JSON: {exc}") from exc


def _q(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def form_to_json(f: QuadraticLinkingForm) -> dict:
    return {
        "divisors": list(f.group.divisors),
        "b": [[_q(x) for x in row] for row in f.b],
        "q": [_q(x) for x in f.q],
        "beta": list(f.beta),
        "k": f.context.k,
    }


def form_from_json(data, k: int | None = None) -> QuadraticLinkingForm:
    try:
        divisors = tuple(int(d) for d in data["divisors"])
        b = tuple(tuple(Fraction(x) for x in row) for row in data["b"])
        q = tuple(Fraction(x) for x in data["q"])
        beta = tuple(int(x) for x in data.get("beta", ()))
        kk = int(data.get("k", 3)) if k is None else k
        return QuadraticLinkingForm(FiniteAbelianGroup(divisors), b, q, beta, KContext(kk))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad linking-form JSON: {exc}") from exc

"""Constructive realization of quadratic linking forms by even labelled trees.

Every catalog indecomposable gets an explicit presenting tree; sums are glued
with one hyperbolic pair, and the defect datum is hit by choosing ``alpha``
as an explicit preimage. Even forms are stabilized to treelike forms with
E8 / Ê8 blocks, and a one-directional non-treelike criterion is provided.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .boundary import BoundaryPresentation, boundary_b, boundary_presentation, extended
from .exact_linalg import (
    IntMatrix,
    as_int_matrix,
    block_diag,
    det,
    invert_rational,
    radical_split,
    signature,
)
from .gauss import IntegrityError, gauss_milgram
from .linking import (
    Isomorphism,
    KContext,
    LinkingFormError,
    QuadraticLinkingForm,
    Undecided,
    are_isomorphic,
    catalog_cyclic,
    catalog_hyperbolic,
    catalog_pseudo_hyperbolic,
    check_cyclic_splitting,
    cyclic_sum_decomposition_b,
    direct_sum,
    is_prime,
    prime_factors,
    primary_part,
    q_histogram,
    trivial_form,
)
from .tree_forms import LabelledTree, glue_summands, hyperbolic_pair, tree_det, tree_to_form

DEFAULT_DECOMPOSE_ORDER = 512


def _ctx(k) -> KContext:
    return k if isinstance(k, KContext) else KContext(k)


# ---------------------------------------------------------------------------
# even Euclidean algorithm


@dataclass(frozen=True)
class EvenEuclidTrace:
    d: tuple[int, ...]
    a: tuple[int, ...]

    @property
    def sign(self) -> int:
        return self.d[-2]

    @property
    def d_prime(self) -> tuple[int, ...]:
        return tuple(self.sign * x for x in self.d)

    def check(self) -> bool:
        d, a = self.d, self.a
        if d[-1] != 0 or abs(d[-2]) != 1 or len(d) != len(a) + 2:
            return False
        for i in range(len(a)):
            if d[i] != a[i] * d[i + 1] - d[i + 2] or a[i] % 2:
                return False
            if abs(d[i + 2]) >= abs(d[i + 1]) or (d[i] - d[i + 1]) % 2 == 0:
                return False
        return True


def even_euclid(d1: int, d2: int) -> EvenEuclidTrace:
    """``d_i = a_i d_{i+1} - d_{i+2}`` with ``a_i d_{i+1}`` the nearest even multiple of ``d_{i+1}``."""
    if math.gcd(d1, d2) != 1:
        raise ValueError(f"({d1}, {d2}) are not coprime")
    if not abs(d1) > abs(d2) >= 1:
        raise ValueError("need |d1| > |d2| >= 1")
    if (d1 - d2) % 2 == 0:
        raise ValueError("d1 and d2 must have opposite parity")
    d, a = [d1, d2], []
    while d[-1] != 0:
        x, y = d[-2], d[-1]
        lo = 2 * math.floor(Fraction(x, 2 * y))
        best = min((lo, lo + 2), key=lambda c: abs(x - c * y))
        a.append(best)
        d.append(best * y - x)
    return EvenEuclidTrace(tuple(d), tuple(a))


def theta_adjust(p: int, j: int, theta: int) -> int:
    """An even ``theta'`` in the square class of ``theta`` mod ``p^j`` (smallest ``|theta'|``, positive first)."""
    if p == 2 or p % 2 == 0:
        raise ValueError("theta_adjust is for odd primes")
    pj = p**j
    if math.gcd(theta, p) != 1 or not -pj < theta < pj:
        raise ValueError(f"theta={theta} is not admissible for {p}^{j}")
    if theta % 2 == 0:
        return theta
    squares = {s * s % pj for s in range(1, pj) if s % p}
    for m in range(2, pj, 2):
        for cand in (m, -m):
            if cand % p and any(cand % pj == theta * s % pj for s in squares):
                return cand
    raise AssertionError("no even representative found")  # pragma: no cover


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Presentation:
    """A tree together with a verified isomorphism from its boundary to ``target``."""

    target: QuadraticLinkingForm
    tree: LabelledTree
    alpha: tuple[int, ...]
    witness: Isomorphism
    boundary: BoundaryPresentation = field(repr=False, compare=False)

    def matrix(self) -> IntMatrix:
        return tree_to_form(self.tree)


def _verified(target, tree, alpha, presentation, images) -> Presentation:
    iso = Isomorphism(presentation.form, target, tuple(images))
    if not iso.verify():
        raise IntegrityError("constructed boundary map is not an isomorphism")
    return Presentation(target, tree, tuple(alpha), iso, presentation)


def _present_by_search(target, tree, k, budget=None) -> Presentation:
    bp = boundary_presentation(extended(tree_to_form(tree), _ctx(k)))
    iso = are_isomorphic(bp.form, target, budget=budget)
    if iso is None:
        raise IntegrityError("tree does not present the requested form")
    return _verified(target, tree, (0,) * tree.n, bp, iso.images)


def cyclic_chain(p: int, j: int, theta: int) -> tuple[LabelledTree, EvenEuclidTrace, int]:
    theta2 = theta if p == 2 else theta_adjust(p, j, theta)
    trace = even_euclid(p**j, theta2)
    return LabelledTree.chain(trace.a), trace, theta2


def cyclic_tree(p: int, j: int, theta: int, k: int | KContext = 3, budget=None) -> Presentation:
    target = catalog_cyclic(p, j, theta, k)
    tree, _, theta2 = cyclic_chain(p, j, theta)
    pres = _present_by_search(target, tree, k, budget)
    if pres.boundary.inverse[0, 0] != Fraction(theta2, p**j):
        raise IntegrityError("corner entry of the inverse chain matrix is wrong")
    return pres


def hyperbolic_tree_shape(j: int) -> LabelledTree:
    n = 2**j
    return LabelledTree((n, n, -n, 0), ((0, 3), (1, 3), (2, 3)))


def hyperbolic_leaf_block(j: int) -> tuple[tuple[Fraction, ...], ...]:
    """Rows and columns of ``A^{-1}`` at the two ``2^j`` leaves."""
    inv = invert_rational(tree_to_form(hyperbolic_tree_shape(j)))
    return tuple(tuple(inv[r, c] for c in (0, 1)) for r in (0, 1))


def hyperbolic_tree(j: int, k: int | KContext = 3, budget=None) -> Presentation:
    if j < 1:
        raise ValueError("j must be at least 1")
    tree = hyperbolic_tree_shape(j)
    if tree_det(tree) != 4**j:
        raise IntegrityError("hyperbolic tree has the wrong determinant")
    pres = _present_by_search(catalog_hyperbolic(j, k), tree, k, budget)
    if hyperbolic_leaf_block(j) != ((0, -Fraction(1, 2**j)), (-Fraction(1, 2**j), 0)):
        raise IntegrityError("hyperbolic tree inverse has the wrong leaf block")
    return pres


def pseudo_parameters(j: int) -> tuple[int, int]:
    """``(epsilon_j, r_j)``."""
    eps = 1 if j % 2 else -1
    r = 2 * (1 - eps * 2 ** (j - 1))
    assert r % 3 == 0
    return eps, r // 3


def pseudo_hyperbolic_pieces(j: int) -> tuple[LabelledTree, LabelledTree, LabelledTree]:
    """``(t_j, t̂_j, v_j)``; ``v_j`` lists its two leaves first, then ``t_j``."""
    eps, r = pseudo_parameters(j)
    t = LabelledTree.chain((0, r, 0, 0, 2, 2))
    t_hat = LabelledTree.chain((r, 0, 0, 2, 2))
    v = t.attach_leaves(0, (eps * 2**j, eps * 2**j))
    return t, t_hat, v


def pseudo_hyperbolic_tree(j: int, k: int | KContext = 3, budget=None) -> Presentation:
    if j < 1:
        raise ValueError("j must be at least 1")
    eps, _ = pseudo_parameters(j)
    t, t_hat, v = pseudo_hyperbolic_pieces(j)
    if (tree_det(t), tree_det(t_hat), tree_det(v)) != (3, eps * 2**j, 4**j):
        raise IntegrityError("pseudo-hyperbolic tree determinants are wrong")
    return _present_by_search(catalog_pseudo_hyperbolic(j, k), v, k, budget)


# ---------------------------------------------------------------------------
# factors


@dataclass(frozen=True)
class Factor:
    kind: str  # "cyclic" | "hyperbolic" | "pseudo"
    p: int = 2
    j: int = 1
    theta: int = 1

    def __post_init__(self):
        if self.kind not in ("cyclic", "hyperbolic", "pseudo"):
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if self.kind == "cyclic" and not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.j < 1:
            raise ValueError("j must be at least 1")

    def form(self, k: int | KContext = 3) -> QuadraticLinkingForm:
        if self.kind == "cyclic":
            return catalog_cyclic(self.p, self.j, self.theta, k)
        if self.kind == "hyperbolic":
            return catalog_hyperbolic(self.j, k)
        return catalog_pseudo_hyperbolic(self.j, k)

    def presentation(self, k: int | KContext = 3, budget=None) -> Presentation:
        if self.kind == "cyclic":
            return cyclic_tree(self.p, self.j, self.theta, k, budget)
        if self.kind == "hyperbolic":
            return hyperbolic_tree(self.j, k, budget)
        return pseudo_hyperbolic_tree(self.j, k, budget)

    def __str__(self) -> str:
        if self.kind == "cyclic":
            return f"cyclic:{self.p}^{self.j}:{self.theta}"
        return f"{self.kind}:{self.j}"


_FACTOR_RE = re.compile(r"^(?:cyclic:(\d+)\^(\d+):([+-]?\d+)|(hyperbolic|pseudo):(\d+))$")


def parse_factors(text: str) -> list[Factor]:
    """Parse ``cyclic:p^j:theta``, ``hyperbolic:j``, ``pseudo:j`` joined by ``+`` or ``,``."""
    text = text.strip()
    if text in ("", "0", "trivial"):
        return []
    out = []
    for part in re.split(r"[+,]", text):
        m = _FACTOR_RE.match(part.strip())
        if not m:
            raise ValueError(f"cannot parse factor {part!r}")
        if m.group(1):
            out.append(Factor("cyclic", int(m.group(1)), int(m.group(2)), int(m.group(3))))
        else:
            out.append(Factor(m.group(4), 2, int(m.group(5))))
    for f in out:
        f.form()  # admissibility
    return out


def format_factors(factors: Sequence[Factor]) -> str:
    return "+".join(str(f) for f in factors) or "trivial"


# ---------------------------------------------------------------------------
# sums of catalog forms


def _glued_map(glued_bp: BoundaryPresentation, u: IntMatrix, parts) -> list[tuple[int, ...]]:
    """Images of the glued boundary's generators under the blockwise witnesses.

    ``parts`` lists ``(boundary presentation, witness)`` of the summands in
    block order; the trailing hyperbolic block has trivial boundary.
    """
    ut = u.transpose()
    images = []
    for g in range(glued_bp.form.group.rank):
        gen = tuple(int(i == g) for i in range(glued_bp.form.group.rank))
        y = ut.apply(glued_bp.lift(gen))
        off, image = 0, []
        for bp, iso in parts:
            n = bp.source.rank
            image.extend(iso(bp.project(y[off : off + n])))
            off += n
        images.append(tuple(image))
    return images


def present(
    factors: Sequence[Factor],
    k: int | KContext = 3,
    beta: Sequence[int] | None = None,
    shift: Sequence[int] | None = None,
    budget=None,
) -> Presentation:
    """An even tree whose boundary is the sum of ``factors`` with the requested defect datum.

    For characteristic ``k`` the target is ``q_0 + b(-, c)`` with ``c = shift``
    (or ``c`` a half of ``beta``), reached with ``alpha = 2 m`` where ``pi(m)``
    corresponds to ``c``. Otherwise ``alpha`` is a preimage of ``beta``.
    """
    ctx = _ctx(k)
    base = direct_sum(*(f.form(ctx) for f in factors)) if factors else trivial_form(ctx)
    G = base.group
    if ctx.characteristic:
        if shift is None:
            shift = G.halve(beta) if beta is not None else G.zero
        target = base.shifted(shift)
    else:
        if shift is not None:
            raise ValueError(f"a refinement shift is only meaningful for k in (2, 4), not k={ctx.k}")
        b = tuple(beta) if beta is not None else G.zero
        target = QuadraticLinkingForm(G, base.b, base.q, b, ctx)

    if not factors:
        tree = hyperbolic_pair()
        bp = boundary_presentation(extended(tree_to_form(tree), ctx))
        return _verified(target, tree, (0, 0), bp, ())
    pieces = [f.presentation(ctx, budget) for f in factors]
    if len(pieces) == 1:
        tree, bp0, images = pieces[0].tree, pieces[0].boundary, pieces[0].witness.images
    else:
        tree, u = glue_summands([p.tree for p in pieces], [0] * len(pieces))
        bp0 = boundary_presentation(extended(tree_to_form(tree), ctx))
        images = _glued_map(bp0, u, [(p.boundary, p.witness) for p in pieces])
    phi = Isomorphism(bp0.form, base, tuple(images))
    if not phi.verify():
        raise IntegrityError("glued boundary map is not an isomorphism")

    phi_inv = phi.inverse()
    if ctx.characteristic:
        m = bp0.lift(phi_inv(G.reduce(shift)))
        alpha = tuple(2 * x for x in m)
    elif ctx.coefficients == "0":
        alpha = (0,) * tree.n
    else:
        alpha = bp0.lift(phi_inv(target.beta))
    bp = boundary_presentation(extended(tree_to_form(tree), ctx, alpha))
    return _verified(target, tree, alpha, bp, images)


# ---------------------------------------------------------------------------
# brute-force decomposition into catalog factors


def _cyclic_classes(p: int, j: int) -> list[int]:
    """One theta per isomorphism class of cyclic forms on ``Z_{p^j}``."""
    if p == 2:
        return [1, -1] if j == 1 else [1, -1, 3, -3]
    pj = p**j
    nonres = next(t for t in range(2, pj) if t % p and pow(t % p, (p - 1) // 2, p) == p - 1)
    return [theta_adjust(p, j, 1), theta_adjust(p, j, nonres)]


def _part_candidates(p: int, orders: Sequence[int]):
    """Multisets of catalog factors whose group is ``⊕ Z_{orders}``."""
    counts: dict[int, int] = {}
    for o in orders:
        j = round(math.log(o, p))
        counts[j] = counts.get(j, 0) + 1
    per_j = []
    for j, n in sorted(counts.items()):
        options = []
        classes = _cyclic_classes(p, j)
        pairs = range(n // 2 + 1) if p == 2 else [0]
        for npair in pairs:
            for nh in range(npair + 1):
                rest = n - 2 * npair
                for combo in itertools.combinations_with_replacement(classes, rest):
                    fs = [Factor("hyperbolic", 2, j)] * nh + [Factor("pseudo", 2, j)] * (npair - nh)
                    fs += [Factor("cyclic", p, j, t) for t in combo]
                    options.append(fs)
        per_j.append(options)
    for choice in itertools.product(*per_j):
        yield [f for fs in choice for f in fs]


def _homogeneous_part(f: QuadraticLinkingForm) -> QuadraticLinkingForm:
    return QuadraticLinkingForm(f.group, f.b, f.q, (), f.context)


def decompose_with_witness(
    f: QuadraticLinkingForm, budget=None, max_order: int = DEFAULT_DECOMPOSE_ORDER
) -> tuple[list[Factor], Isomorphism]:
    """Catalog factors whose sum is isomorphic to ``(G, b, q)``, with an isomorphism ``f -> sum``."""
    if not f.is_homogeneous:
        raise LinkingFormError("decomposition needs a homogeneous refinement")
    if f.order > max_order:
        raise Undecided(f"group order {f.order} exceeds the decomposition bound {max_order}")
    f0 = _homogeneous_part(f)
    factors: list[Factor] = []
    for p in prime_factors(f.order) if f.order > 1 else []:
        part = primary_part(f0, p)
        hist = q_histogram(part)
        for cand in _part_candidates(p, part.group.divisors):
            s = direct_sum(*(c.form(f.context) for c in cand))
            if sorted(s.group.divisors) != sorted(part.group.divisors) or q_histogram(s) != hist:
                continue
            if are_isomorphic(part, s, budget=budget) is not None:
                factors.extend(cand)
                break
        else:
            raise IntegrityError(f"no catalog decomposition of the {p}-primary part")
    s = direct_sum(*(c.form(f.context) for c in factors)) if factors else trivial_form(f.context)
    iso = are_isomorphic(f0, s, budget=budget)
    if iso is None:
        raise IntegrityError("primary decompositions do not assemble")  # pragma: no cover
    return factors, iso


def decompose_small(f: QuadraticLinkingForm, budget=None, max_order: int = DEFAULT_DECOMPOSE_ORDER) -> list[Factor]:
    return decompose_with_witness(f, budget, max_order)[0]


def present_form(target: QuadraticLinkingForm, budget=None, max_order: int = DEFAULT_DECOMPOSE_ORDER) -> Presentation:
    """Present an arbitrary small form: decompose, present the catalog sum, transport back."""
    ctx = target.context
    G = target.group
    if ctx.characteristic:
        c = G.halve(target.beta)
        homog = target.shifted(G.neg(c))
    else:
        c = None
        homog = target
    factors, psi = decompose_with_witness(homog, budget, max_order)
    if ctx.characteristic:
        pres = present(factors, ctx, shift=psi(c), budget=budget)
    else:
        pres = present(factors, ctx, beta=psi.map_beta(target.beta), budget=budget)
    back = psi.inverse()
    composed = tuple(back(h) for h in pres.witness.images)
    return _verified(target, pres.tree, pres.alpha, pres.boundary, composed)


# ---------------------------------------------------------------------------
# E8 and stabilization


def e8_tree(sign: int = 1) -> LabelledTree:
    """E8 (``sign=+1``) or Ê8 (``sign=-1``): a chain of seven with an eighth vertex on the fifth."""
    edges = tuple((i, i + 1) for i in range(6)) + ((4, 7),)
    return LabelledTree((2 * sign,) * 8, edges)


def e8_matrix(sign: int = 1) -> IntMatrix:
    return tree_to_form(e8_tree(sign))


@dataclass(frozen=True)
class Check:
    name: str
    outcome: str  # "pass" | "fail" | "undecided"
    detail: str = ""


@dataclass(frozen=True)
class StabilizationResult:
    tree: LabelledTree
    s: int  # hyperbolic pairs added to the input
    t: int  # signed number of E8 blocks
    pads: int  # hyperbolic pairs added to the candidate
    factors: tuple[Factor, ...]
    checks: tuple[Check, ...]
    isometry: IntMatrix | None

    @property
    def ok(self) -> bool:
        """Every required check passed; the optional isometry search may stay undecided."""
        return all(c.outcome == "pass" for c in self.checks if c.name != "isometry-search")


def _split_boundary(m: IntMatrix):
    u, a0, null = radical_split(m)
    if a0.rows == 0:
        return trivial_form(3), 0, null, a0
    return boundary_presentation(extended(a0, 3)).form, signature(a0), null, a0


def stabilize_treelike(
    matrix, budget=None, max_order: int = DEFAULT_DECOMPOSE_ORDER, isometry_rank: int = 8, isometry_budget=200_000
) -> StabilizationResult:
    """A treelike form stably equivalent to the even form ``matrix``, with a certificate.

    The candidate is ``T ⊕ 0^n ⊕ (±E8)^{|t|}`` glued into one tree, then padded
    with pendant hyperbolic pairs; the input is padded with ``H_+(Z)^s``.
    """
    A = as_int_matrix(matrix)
    if not A.is_symmetric() or any(A[i, i] % 2 for i in range(A.rows)):
        raise ValueError("stabilization needs an even symmetric form")
    f0, sigma0, null, a0 = _split_boundary(A)
    factors, _ = decompose_with_witness(f0, budget, max_order)
    comps: list[LabelledTree] = []
    sigma_t = 0
    if factors:
        pres = present(factors, 3, budget=budget)
        comps.append(pres.tree)
        sigma_t = signature(tree_to_form(pres.tree))
    gap = sigma0 - sigma_t
    if gap % 8:
        raise IntegrityError(f"signature gap {gap} is not divisible by 8")
    t = gap // 8
    comps += [LabelledTree((0,), ())] * null
    comps += [e8_tree(1 if t > 0 else -1)] * abs(t)
    if not comps:
        cand = hyperbolic_pair()
    elif len(comps) == 1:
        cand = comps[0]
    else:
        cand, _ = glue_summands(comps, [0] * len(comps))
    pads = 0
    while cand.n < A.rows:
        cand, _ = glue_summands([cand], [0])
        pads += 1
    s = (cand.n - A.rows) // 2
    padded = block_diag(A, *([IntMatrix.from_rows([[0, 1], [1, 0]])] * s))

    checks = []
    c_form = tree_to_form(cand)
    g1, sig1, null1, _ = _split_boundary(c_form)
    checks.append(Check("rank", "pass" if c_form.rows == padded.rows else "fail", f"{c_form.rows} vs {padded.rows}"))
    checks.append(Check("nullity", "pass" if null1 == null else "fail", f"{null1} vs {null}"))
    checks.append(Check("signature", "pass" if sig1 == sigma0 else "fail", f"{sig1} vs {sigma0}"))
    checks.append(Check("even", "pass" if cand.is_even and cand.is_connected else "fail"))
    gm_ok = gauss_milgram(f0) == sigma0 % 8 and gauss_milgram(g1) == sig1 % 8
    checks.append(Check("gauss-milgram", "pass" if gm_ok else "fail"))
    try:
        iso = are_isomorphic(g1, f0, budget=budget)
        checks.append(Check("boundary-isomorphism", "pass" if iso is not None and iso.verify() else "fail"))
    except Undecided as exc:
        checks.append(Check("boundary-isomorphism", "undecided", str(exc)))

    isometry = None
    if padded.rows <= isometry_rank:
        try:
            isometry = bounded_isometry(c_form, padded, budget=isometry_budget)
            if isometry is not None:
                checks.append(Check("isometry-search", "pass", "found"))
            else:
                checks.append(Check("isometry-search", "undecided", "none with entries in [-1, 1]"))
        except Undecided as exc:
            checks.append(Check("isometry-search", "undecided", str(exc)))
    return StabilizationResult(cand, s, t, pads, tuple(factors), tuple(checks), isometry)


def bounded_isometry(c, target, bound: int = 1, budget: int = 200_000) -> IntMatrix | None:
    """A unimodular ``V`` with entries in ``[-bound, bound]`` and ``V^T C V = target``.

    Columns are chosen one at a time among vectors of the right norm, pruned by
    the pairings with earlier columns. ``None`` means no such ``V`` exists in
    the box; running out of ``budget`` raises :class:`Undecided`.
    """
    C, B = as_int_matrix(c), as_int_matrix(target)
    n = C.rows
    if B.rows != n:
        return None
    vecs = [v for v in itertools.product(range(-bound, bound + 1), repeat=n) if any(v)]
    cv = {v: C.apply(v) for v in vecs}
    by_norm: dict[int, list] = {}
    for v in vecs:
        by_norm.setdefault(sum(a * b for a, b in zip(v, cv[v])), []).append(v)
    cols: list[tuple[int, ...]] = []
    nodes = 0

    def search(j):
        nonlocal nodes
        if j == n:
            return abs(det(IntMatrix.from_rows(cols).transpose())) == 1
        for v in by_norm.get(B[j, j], []):
            nodes += 1
            if nodes > budget:
                raise Undecided(f"isometry search exceeded {budget} nodes")
            if all(sum(a * b for a, b in zip(cols[i], cv[v])) == B[i, j] for i in range(j)):
                cols.append(v)
                if search(j + 1):
                    return True
                cols.pop()
        return False

    return IntMatrix.from_rows(cols).transpose() if search(0) else None


# ---------------------------------------------------------------------------
# non-treelike certificates


@dataclass(frozen=True)
class NonTreelikeCertificate:
    form: IntMatrix
    scale_factor: int
    divisors: tuple[int, ...]
    b: tuple

    def recheck(self) -> bool:
        if any(x % self.scale_factor for row in self.form.entries for x in row):
            return False
        divisors, b = boundary_b(self.form)
        return (divisors, b) == (self.divisors, self.b) and cyclic_sum_decomposition_b(divisors, b) is None


def non_treelike_certificate(matrix, max_order: int = 1024) -> NonTreelikeCertificate | None:
    """A certificate that ``matrix`` is not treelike, if the scaling criterion applies.

    A treelike form has boundary a sum of cyclic linking forms whenever all of
    its entries share a factor ``> 1``; an exhaustive search showing the
    boundary has no such splitting certifies the form is not treelike.
    ``None`` is not a treelike claim.
    """
    A = as_int_matrix(matrix)
    g = math.gcd(*(x for row in A.entries for x in row)) if A.rows else 0
    if g <= 1:
        return None
    divisors, b = boundary_b(A)
    if cyclic_sum_decomposition_b(divisors, b, max_order) is not None:
        return None
    return NonTreelikeCertificate(A, g, divisors, b)


# ---------------------------------------------------------------------------
# F_+(2^j) audit


def fplus_matrix(j: int) -> IntMatrix:
    """The 4x4 even form labelled ``A(F_+(2^j))``, entered exactly as printed."""
    a = (2**j - (-1) ** j) // 3
    b = (-1) ** (j - 1)
    t = 2**j
    c = 4 * a * b - 1
    return IntMatrix.from_rows(
        [
            [2 * t * (c - t * b), -t * c, 2 * t * b, -t],
            [-t * c, 2 * t * c, -4 * t * b, 2 * t],
            [2 * t * b, -4 * t * b, 6 * b, -12],
            [-t, 2 * t, -12, 12 * a - 2 * t],
        ]
    )


@dataclass(frozen=True)
class FplusAudit:
    j: int
    det: int
    expected_abs_det: int
    divisors: tuple[int, ...]
    scale_factor: int
    cyclic_splitting: dict | None
    matches: bool

    def report(self) -> str:
        lines = [
            f"j={self.j}: det={self.det} (expected ±{self.expected_abs_det}), coker divisors {self.divisors}",
            f"  common factor of entries: {self.scale_factor}",
        ]
        if self.matches:
            lines.append("  boundary matches b_F(Z_2^j)")
        else:
            lines.append("  DISCREPANCY: boundary group differs from Z_2^j ⊕ Z_2^j")
            if self.cyclic_splitting is not None:
                lines.append("  the boundary is an orthogonal sum of cyclic forms")
            else:
                lines.append("  the boundary has no orthogonal cyclic splitting")
        return "\n".join(lines)


def fplus_audit(j: int, max_order: int = 4096) -> FplusAudit:
    A = fplus_matrix(j)
    d = det(A)
    divisors, b = boundary_b(A)
    try:
        split = cyclic_sum_decomposition_b(divisors, b, max_order)
    except Undecided:
        split = None
    if split is not None:
        for orders, sub, gens in split.values():
            if not check_cyclic_splitting(orders, sub, gens):
                raise IntegrityError("cyclic splitting failed its independent check")  # pragma: no cover
    matches = False
    if abs(d) == 4**j and tuple(divisors) == (2**j, 2**j):
        matches = are_isomorphic(boundary_presentation(extended(A, 3)).form, catalog_pseudo_hyperbolic(j)) is not None
    g = math.gcd(*(x for row in A.entries for x in row))
    return FplusAudit(j, d, 4**j, tuple(divisors), g, split, matches)

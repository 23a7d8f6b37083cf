import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import random_unimodular
from treelike.boundary import boundary_of_matrix
from treelike.exact_linalg import IntMatrix, block_diag, congruent, det, invert_rational, signature
from treelike.gauss import gauss_milgram
from treelike.linking import (
    LinkingFormError,
    QuadraticLinkingForm,
    Undecided,
    are_isomorphic,
    catalog_cyclic,
    catalog_hyperbolic,
    catalog_pseudo_hyperbolic,
    direct_sum,
)
from treelike.realize import (
    Factor,
    bounded_isometry,
    cyclic_chain,
    cyclic_tree,
    decompose_small,
    decompose_with_witness,
    e8_matrix,
    e8_tree,
    even_euclid,
    format_factors,
    fplus_audit,
    fplus_matrix,
    hyperbolic_leaf_block,
    hyperbolic_tree,
    non_treelike_certificate,
    parse_factors,
    present,
    present_form,
    pseudo_hyperbolic_pieces,
    pseudo_hyperbolic_tree,
    pseudo_parameters,
    stabilize_treelike,
    theta_adjust,
)
from treelike.tree_forms import LabelledTree, form_to_tree, tree_det, tree_to_form

H_PLUS = [[0, 1], [1, 0]]


def chain_suffix_det(a, i):
    return tree_det(LabelledTree.chain(a[len(a) - i :]))


class TestEvenEuclid:
    @pytest.mark.parametrize(
        "d1, d2, a, d",
        [(5, 2, (2, -2), (5, 2, -1, 0)), (2, 1, (2,), (2, 1, 0)), (3, -2, (-2, -2), (3, -2, 1, 0))],
    )
    def test_examples(self, d1, d2, a, d):
        tr = even_euclid(d1, d2)
        assert tr.a == a and tr.d == d and tr.check()

    @pytest.mark.parametrize("d1, d2", [(4, 2), (5, 3), (2, 3), (3, 0), (6, 3)])
    def test_preconditions(self, d1, d2):
        with pytest.raises(ValueError):
            even_euclid(d1, d2)

    @settings(max_examples=300, deadline=None)
    @given(st.integers(2, 10**6), st.integers(1, 10**6), st.booleans(), st.booleans())
    def test_termination_and_law(self, d1, d2, neg1, neg2):
        d2 = d2 % d1 or 1
        if math.gcd(d1, d2) != 1 or (d1 - d2) % 2 == 0:
            return
        d1, d2 = (-d1 if neg1 else d1), (-d2 if neg2 else d2)
        tr = even_euclid(d1, d2)
        assert tr.check()
        assert all(abs(tr.d[i + 1]) < abs(tr.d[i]) for i in range(len(tr.d) - 1))

    @pytest.mark.parametrize("seed", range(60))
    def test_chain_minor_law(self, seed):
        rng = random.Random(seed)
        while True:
            d1 = rng.randint(2, 3000)
            d2 = rng.randint(1, d1 - 1)
            if math.gcd(d1, d2) == 1 and (d1 - d2) % 2:
                break
        tr = even_euclid(d1, d2)
        n = len(tr.a)
        dp = tr.d_prime
        # det of the last i rows and columns is d'_{n-i+1} (1-based), d' = d_{n+1} d
        for i in range(1, n + 1):
            assert chain_suffix_det(tr.a, i) == dp[n - i]
        if n <= 40:
            assert det(tree_to_form(LabelledTree.chain(tr.a))) == dp[0]


class TestThetaAdjust:
    @pytest.mark.parametrize("p, j, theta, out", [(3, 1, 1, -2), (3, 1, 2, 2), (5, 1, 3, 2), (5, 1, 1, 4), (7, 1, 3, -2)])
    def test_examples(self, p, j, theta, out):
        assert theta_adjust(p, j, theta) == out

    def test_same_class(self):
        for p, j in ((3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (11, 1)):
            pj = p**j
            for theta in range(-pj + 1, pj):
                if theta % p == 0:
                    continue
                t2 = theta_adjust(p, j, theta)
                assert t2 % 2 == 0 and -pj < t2 < pj and t2 % p
                assert are_isomorphic(catalog_cyclic(p, j, theta), catalog_cyclic(p, j, t2)) is not None

    def test_rejects_two(self):
        with pytest.raises(ValueError):
            theta_adjust(2, 2, 1)


class TestCatalogTrees:
    def test_q25(self):
        pres = cyclic_tree(5, 1, 2)
        assert pres.tree.labels == (2, -2)
        assert pres.witness.verify() and pres.witness.target == catalog_cyclic(5, 1, 2)

    def test_q12(self):
        pres = cyclic_tree(2, 1, 1)
        assert pres.tree.labels == (2,)

    def test_q13(self):
        tree, trace, theta2 = cyclic_chain(3, 1, 1)
        assert theta2 == -2 and trace.a == (-2, -2) and trace.sign == 1
        pres = cyclic_tree(3, 1, 1)
        assert pres.witness.verify()
        assert pres.boundary.inverse[0, 0] == F(-2, 3)

    def test_all_small_cyclic(self):
        for p, j in ((2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (11, 1), (13, 1)):
            pj = p**j
            for theta in range(-pj + 1, pj):
                if theta % p == 0:
                    continue
                pres = cyclic_tree(p, j, theta)
                assert pres.tree.is_even and pres.witness.verify()

    @pytest.mark.parametrize("j", [1, 2, 3, 4])
    def test_hyperbolic(self, j):
        pres = hyperbolic_tree(j)
        assert det(pres.matrix()) == 4**j
        assert pres.witness.verify() and pres.boundary.form.order == 4**j

    def test_hyperbolic_j1_matrix(self):
        assert hyperbolic_tree(1).matrix().tolist() == [[2, 0, 0, 1], [0, 2, 0, 1], [0, 0, -2, 1], [1, 1, 1, 0]]

    @pytest.mark.parametrize("j", [1, 2, 3, 4])
    def test_hyperbolic_leaf_block(self, j):
        h = F(1, 2**j)
        assert hyperbolic_leaf_block(j) == ((0, -h), (-h, 0))
        # the block is symmetric mod Z under x -> -x, so the linking matrix still sees b_H
        inv = invert_rational(hyperbolic_tree(j).matrix())
        assert (inv[0, 1] + h).denominator == 1

    @pytest.mark.parametrize("j, eps, r", [(1, 1, 0), (2, -1, 2), (3, 1, -2), (4, -1, 6)])
    def test_pseudo_parameters(self, j, eps, r):
        assert pseudo_parameters(j) == (eps, r)

    @pytest.mark.parametrize("j", [1, 2, 3, 4])
    def test_pseudo(self, j):
        eps, _ = pseudo_parameters(j)
        t, t_hat, v = pseudo_hyperbolic_pieces(j)
        assert (det(tree_to_form(t)), det(tree_to_form(t_hat)), det(tree_to_form(v))) == (3, eps * 2**j, 4**j)
        assert v.labels[:2] == (eps * 2**j,) * 2
        pres = pseudo_hyperbolic_tree(j)
        assert pres.witness.verify()
        assert are_isomorphic(pres.boundary.form, catalog_pseudo_hyperbolic(j)) is not None


class TestFactors:
    def test_parse_roundtrip(self):
        fs = parse_factors("cyclic:5^1:2, hyperbolic:2+pseudo:1")
        assert fs == [Factor("cyclic", 5, 1, 2), Factor("hyperbolic", 2, 2), Factor("pseudo", 2, 1)]
        assert parse_factors(format_factors(fs)) == fs
        assert parse_factors("trivial") == [] and format_factors([]) == "trivial"

    @pytest.mark.parametrize("text", ["cyclic:4^1:1", "cyclic:5^1:5", "hyper:1", "cyclic:5:2", "pseudo:0"])
    def test_parse_errors(self, text):
        with pytest.raises((ValueError, LinkingFormError)):
            parse_factors(text)


class TestPresent:
    def test_q25(self):
        pres = present([Factor("cyclic", 5, 1, 2)])
        assert pres.tree.labels == (2, -2) and pres.alpha == (0, 0)
        assert pres.target.beta == (0,)

    def test_h_plus_q12(self):
        pres = present(parse_factors("hyperbolic:1+cyclic:2^1:1"))
        assert pres.tree.n == 7 and pres.tree.is_connected and pres.tree.is_even
        target = direct_sum(catalog_hyperbolic(1), catalog_cyclic(2, 1, 1))
        assert pres.witness.verify() and pres.target == target

    def test_trivial(self):
        pres = present([])
        assert tree_to_form(pres.tree).tolist() == H_PLUS
        assert pres.boundary.form.order == 1

    def test_three_factors(self):
        pres = present(parse_factors("cyclic:3^1:1+pseudo:1+cyclic:5^1:2"))
        assert pres.witness.verify() and pres.tree.n == 2 + 8 + 2 + 2
        assert pres.boundary.form.order == 3 * 4 * 5

    @pytest.mark.parametrize("k", [5, 9])
    def test_beta_mod_two(self, k):
        fs = parse_factors("hyperbolic:1+cyclic:3^1:1")
        pres = present(fs, k, beta=(1, 0, 0))
        assert pres.target.beta == (1, 0, 0) and pres.witness.verify()

    def test_beta_in_Z(self):
        pres = present(parse_factors("cyclic:5^1:2"), 6, beta=(3,))
        assert pres.target.beta == (3,) and pres.witness.verify()

    def test_beta_rejected_for_k3(self):
        with pytest.raises(LinkingFormError):
            present(parse_factors("cyclic:5^1:2"), 3, beta=(3,))

    @pytest.mark.parametrize("k", [2, 4])
    def test_characteristic_all_shifts(self, k):
        fs = parse_factors("hyperbolic:1+cyclic:5^1:2")
        G = direct_sum(*(f.form(k) for f in fs)).group
        for c in G.elements():
            pres = present(fs, k, shift=c)
            assert pres.witness.verify()
            assert all((a - d) % 2 == 0 for a, d in zip(pres.alpha, pres.tree.labels))
            assert pres.target.beta == G.scale(2, c)

    def test_characteristic_beta(self):
        fs = parse_factors("cyclic:2^2:1")
        pres = present(fs, 4, beta=(2,))
        assert pres.target.beta == (2,) and not pres.target.is_homogeneous
        assert pres.witness.verify()

    def test_shift_rejected_outside_characteristic(self):
        with pytest.raises(ValueError):
            present(parse_factors("cyclic:5^1:2"), 3, shift=(1,))


class TestDecompose:
    def test_cyclic(self):
        assert decompose_small(boundary_of_matrix([[2]])) == [Factor("cyclic", 2, 1, 1)]

    def test_scrambled_h(self):
        h = catalog_hyperbolic(1)
        scrambled = h.restrict([(1, 1), (0, 1)], (2, 2))
        assert decompose_small(scrambled) == [Factor("hyperbolic", 2, 1)]

    def test_u2_boundary(self):
        f = boundary_of_matrix(hyperbolic_tree(2).matrix())
        assert decompose_small(f) == [Factor("hyperbolic", 2, 2)]

    def test_mixed(self):
        f = direct_sum(catalog_pseudo_hyperbolic(1), catalog_cyclic(3, 1, 1), catalog_cyclic(2, 2, 3))
        fs, iso = decompose_with_witness(f)
        assert iso.verify()
        assert sorted(map(str, fs)) == sorted(["pseudo:1", "cyclic:3^1:-2", "cyclic:2^2:3"])

    def test_order_bound(self):
        f = direct_sum(catalog_hyperbolic(3), catalog_hyperbolic(2))
        with pytest.raises(Undecided):
            decompose_small(f, max_order=512)

    def test_inhomogeneous(self):
        with pytest.raises(LinkingFormError):
            decompose_small(catalog_cyclic(2, 2, 1, 4).shifted((1,)))

    @pytest.mark.parametrize("seed", range(25))
    def test_random_transported(self, seed):
        rng = random.Random(seed)
        pool = ["cyclic:2^1:1", "cyclic:2^1:-1", "cyclic:3^1:2", "cyclic:5^1:2", "hyperbolic:1", "pseudo:1", "cyclic:2^2:3"]
        fs = parse_factors("+".join(rng.sample(pool, rng.randint(1, 3))))
        target = direct_sum(*(f.form() for f in fs))
        if target.order > 256:
            return
        m = present(fs).matrix()
        u = random_unimodular(rng, m.rows, steps=6)
        f = boundary_of_matrix(congruent(u, m))
        got = direct_sum(*(x.form() for x in decompose_small(f)))
        assert are_isomorphic(got, target) is not None

    @pytest.mark.parametrize("k", [3, 4, 5])
    def test_present_form(self, k):
        base = direct_sum(catalog_hyperbolic(1, k), catalog_cyclic(3, 1, 1, k))
        targets = [base]
        if k == 4:
            targets += [base.shifted(c) for c in base.group.elements()]
        if k == 5:
            targets.append(QuadraticLinkingForm(base.group, base.b, base.q, (1, 1, 0), base.context))
        for t in targets:
            pres = present_form(t)
            assert pres.witness.verify() and pres.target == t


class TestE8:
    def test_matrix(self):
        e = e8_matrix()
        assert det(e) == 1 and signature(e) == 8 and signature(e8_matrix(-1)) == -8
        back = form_to_tree(e)
        assert back.labels == e8_tree().labels and set(back.edges) == set(e8_tree().edges)
        assert e8_tree().is_even and e8_tree().is_connected


class TestStabilize:
    def test_e8(self):
        r = stabilize_treelike(e8_matrix())
        assert r.ok and r.s == 0 and r.t == 1 and r.tree == e8_tree()

    def test_h_plus_2(self):
        a = [[0, 2], [2, 0]]
        r = stabilize_treelike(a)
        assert r.ok and r.s >= 1
        assert non_treelike_certificate(a) is not None

    def test_diag2(self):
        r = stabilize_treelike([[2]])
        assert r.ok and r.s == 0 and r.t == 0 and r.tree.labels == (2,)
        assert r.isometry is not None and congruent(r.isometry, tree_to_form(r.tree)) == IntMatrix.from_rows([[2]])

    def test_degenerate(self):
        r = stabilize_treelike([[0]])
        assert r.ok and r.tree.n == 1 + 2 * r.s

    def test_negative_signature(self):
        r = stabilize_treelike(block_diag(e8_matrix(-1), [[2]]))
        assert r.ok and r.t == -1

    def test_odd_rejected(self):
        with pytest.raises(ValueError):
            stabilize_treelike([[1]])

    @pytest.mark.parametrize("seed", range(12))
    def test_random_even(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 4)
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = 2 * rng.randint(-3, 3)
            for j in range(i + 1, n):
                rows[i][j] = rows[j][i] = rng.randint(-2, 2)
        a = IntMatrix.from_rows(rows)
        d = det(a)
        if d and abs(d) > 128:
            return
        r = stabilize_treelike(a, isometry_rank=0)
        assert r.ok
        cand = tree_to_form(r.tree)
        padded = block_diag(a, *([IntMatrix.from_rows(H_PLUS)] * r.s))
        assert cand.rows == padded.rows
        if d:
            assert signature(cand) == signature(padded)
            assert gauss_milgram(boundary_of_matrix(cand)) == signature(cand) % 8

    def test_isometry_never_claims_unfound(self):
        r = stabilize_treelike([[0, 2], [2, 0]], isometry_budget=50)
        iso = [c for c in r.checks if c.name == "isometry-search"]
        assert iso and (iso[0].outcome == "undecided" or r.isometry is not None)

    def test_bounded_isometry(self):
        u = bounded_isometry(H_PLUS, H_PLUS)
        assert u is not None and congruent(u, H_PLUS) == IntMatrix.from_rows(H_PLUS)
        assert bounded_isometry([[2]], [[4]]) is None


class TestCertificates:
    @pytest.mark.parametrize("j", [1, 2, 3, 4])
    def test_h_plus(self, j):
        n = 2**j
        cert = non_treelike_certificate([[0, n], [n, 0]])
        assert cert is not None and cert.scale_factor == n and cert.recheck()

    def test_diag(self):
        assert non_treelike_certificate([[2, 0], [0, 4]]) is None

    def test_no_common_factor(self):
        assert non_treelike_certificate(hyperbolic_tree(1).matrix()) is None

    def test_sums(self):
        cert = non_treelike_certificate(block_diag([[0, 2], [2, 0]], [[0, 4], [4, 0]]))
        assert cert is not None and cert.recheck()

    def test_tampered(self):
        cert = non_treelike_certificate([[0, 2], [2, 0]])
        bad = type(cert)(IntMatrix.from_rows([[0, 3], [3, 0]]), 2, cert.divisors, cert.b)
        assert not bad.recheck()


class TestFplus:
    def test_matrix_even_and_divisible(self):
        for j in (1, 2, 3, 4):
            a = fplus_matrix(j)
            assert a.is_symmetric() and all(a[i, i] % 2 == 0 for i in range(4))
            assert all(x % 2 == 0 for row in a.entries for x in row)

    def test_audit_reports_discrepancy(self):
        # frozen from an independent CAS run on the matrix as printed
        dets = {1: -992, 2: 6016, 3: -55808, 4: 415744}
        divs = {1: (2, 2, 2, 124), 2: (2, 4, 4, 188), 3: (2, 4, 8, 872), 4: (2, 4, 16, 3248)}
        for j in (1, 2, 3, 4):
            au = fplus_audit(j)
            assert au.det == dets[j] and au.divisors == divs[j]
            assert not au.matches and "DISCREPANCY" in au.report()

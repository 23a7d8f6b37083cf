import random
from fractions import Fraction as F

import pytest

from _gen import random_even_form, random_tree, random_unimodular
from treelike.boundary import (
    ContractError,
    ExtendedQuadraticForm,
    boundary,
    boundary_b,
    boundary_is_trivial,
    boundary_of_matrix,
    boundary_presentation,
    extended,
    is_nonsingular,
    stable_sum_invariance_check,
)
from treelike.exact_linalg import IntMatrix, SingularMatrixError, det
from treelike.linking import (
    KContext,
    are_isomorphic,
    catalog_cyclic,
    catalog_hyperbolic,
)
from treelike.realize import e8_matrix
from treelike.tree_forms import LabelledTree, tree_to_form

H_PLUS = [[0, 1], [1, 0]]
D = tree_to_form(LabelledTree.chain((2, -2)))


def u_matrix(j):
    n = 2**j
    return tree_to_form(LabelledTree((n, n, -n, 0), ((0, 3), (1, 3), (2, 3))))


class TestExamples:
    def test_single_two(self):
        f = boundary_of_matrix([[2]])
        assert f.group.divisors == (2,)
        assert f.b == ((F(1, 2),),) and f.q == (F(1, 4),) and f.beta == (0,)
        assert are_isomorphic(f, catalog_cyclic(2, 1, 1)) is not None

    def test_chain_presents_q25(self):
        bp = boundary_presentation(extended(D))
        assert bp.form.group.divisors == (5,)
        assert bp.q_direct((1, 0)) == F(1, 5)
        assert are_isomorphic(bp.form, catalog_cyclic(5, 1, 2)) is not None

    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_u_presents_hyperbolic(self, j):
        f = boundary_of_matrix(u_matrix(j))
        assert f.order == 4**j
        assert are_isomorphic(f, catalog_hyperbolic(j)) is not None

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            boundary_of_matrix([[2, 2], [2, 2]])

    def test_odd_rejected_for_k3(self):
        with pytest.raises(ContractError):
            extended([[1]])

    def test_characteristic_alpha(self):
        f = boundary_of_matrix([[1]], k=4, alpha=[1])
        assert f.order == 1
        with pytest.raises(ContractError):
            extended([[1]], k=4, alpha=[0])

    def test_alpha_vanishes_for_k3(self):
        with pytest.raises(ContractError):
            extended([[2]], k=3, alpha=[1])

    def test_k5_beta_mod_two(self):
        f = boundary_of_matrix([[4]], k=5, alpha=[3])
        assert f.beta == (1,)

    def test_k4_beta(self):
        # alpha = (2) on the form (4): beta = 2 in Z_4 is a double
        f = boundary_of_matrix([[4]], k=4, alpha=[2])
        assert f.beta == (2,) and f.q == (F(3, 8),) and not f.is_homogeneous

    def test_boundary_b_needs_no_evenness(self):
        divisors, b = boundary_b([[3]])
        assert divisors == (3,) and b == ((F(1, 3),),)


class TestTriviality:
    def test_examples(self):
        assert is_nonsingular(e8_matrix()) and boundary_is_trivial(e8_matrix())
        assert is_nonsingular(H_PLUS) and boundary_is_trivial(H_PLUS)
        assert not is_nonsingular(u_matrix(1)) and not boundary_is_trivial(u_matrix(1))
        assert boundary_of_matrix(u_matrix(1)).order == 4

    @pytest.mark.parametrize("seed", range(40))
    def test_agree(self, seed):
        rng = random.Random(seed)
        a = random_even_form(rng, rng.randint(1, 5))
        if det(a) == 0:
            return
        assert is_nonsingular(a) == boundary_is_trivial(a)


class TestStableSum:
    def test_chain_plus_e8(self):
        assert stable_sum_invariance_check(extended(D), extended(e8_matrix()))
        assert are_isomorphic(boundary(extended(D) + extended(e8_matrix())), catalog_cyclic(5, 1, 2)) is not None

    def test_plus_hyperbolic(self):
        assert stable_sum_invariance_check(extended(u_matrix(1)), extended(H_PLUS))

    def test_e8_e8(self):
        f = extended(e8_matrix()) + extended(e8_matrix())
        assert boundary(f).order == 1

    def test_rejects_singular_second(self):
        with pytest.raises(ValueError):
            stable_sum_invariance_check(extended(D), extended([[2]]))

    @pytest.mark.parametrize("seed", range(15))
    def test_random(self, seed):
        rng = random.Random(seed)
        a = tree_to_form(random_tree(rng, rng.randint(1, 6), lo=-4, hi=4, even=True))
        if det(a) == 0 or abs(det(a)) > 256:
            return
        ns = extended(e8_matrix(rng.choice((1, -1)))) if rng.random() < 0.5 else extended(H_PLUS)
        assert stable_sum_invariance_check(extended(a), ns)


class TestProperties:
    @pytest.mark.parametrize("seed", range(200))
    def test_order_is_det(self, seed):
        rng = random.Random(seed)
        a = tree_to_form(random_tree(rng, rng.randint(1, 10), lo=-8, hi=8, even=True))
        d = det(a)
        if d == 0:
            return
        assert boundary_of_matrix(a).order == abs(d)

    @pytest.mark.parametrize("seed", range(30))
    def test_well_defined(self, seed):
        rng = random.Random(seed)
        a = tree_to_form(random_tree(rng, rng.randint(2, 7), lo=-6, hi=6, even=True))
        if det(a) == 0:
            return
        bp = boundary_presentation(extended(a))
        n = a.rows
        for _ in range(10):
            x = [rng.randint(-5, 5) for _ in range(n)]
            y = [rng.randint(-5, 5) for _ in range(n)]
            shift = a.apply([rng.randint(-3, 3) for _ in range(n)])
            x2 = [u + v for u, v in zip(x, shift)]
            assert bp.project(x) == bp.project(x2)
            b1 = bp.form.b_value(bp.project(x), bp.project(y))
            assert (b1 - bp.inverse_pairing(x2, y)).denominator == 1
            assert bp.form.q_value(bp.project(x)) == bp.q_direct(x) == bp.q_direct(x2)

    @pytest.mark.parametrize("seed", range(10))
    def test_lift(self, seed):
        rng = random.Random(seed)
        a = tree_to_form(random_tree(rng, rng.randint(2, 6), lo=-6, hi=6, even=True))
        if det(a) == 0:
            return
        bp = boundary_presentation(extended(a))
        for g in bp.form.group.elements():
            assert bp.project(bp.lift(g)) == g

    def test_refinement_exhaustive(self):
        for m in (u_matrix(2), D, [[2, 1, 0], [1, 4, 1], [0, 1, -6]], [[4, 2], [2, 6]]):
            f = boundary_of_matrix(m)
            assert f.order <= 256
            G = f.group
            for x in G.elements():
                for y in G.elements():
                    d = f.q_value(G.add(x, y)) - f.q_value(x) - f.q_value(y) - f.b_value(x, y)
                    assert d.denominator == 1

    @pytest.mark.parametrize("seed", range(25))
    def test_transport_invariance(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 5)
        a = random_even_form(rng, n)
        if det(a) == 0 or abs(det(a)) > 200:
            return
        u = random_unimodular(rng, n)
        f = extended(a)
        assert are_isomorphic(boundary(f.transported(u)), boundary(f)) is not None

    @pytest.mark.parametrize("seed", range(15))
    def test_transport_invariance_characteristic(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 4)
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                rows[i][j] = rows[j][i] = rng.randint(-3, 3)
        a = IntMatrix.from_rows(rows)
        if det(a) == 0 or abs(det(a)) > 100:
            return
        alpha = [a[i, i] % 2 + 2 * rng.randint(-1, 1) for i in range(n)]
        f = ExtendedQuadraticForm(a, tuple(alpha), KContext(4))
        u = random_unimodular(rng, n)
        assert are_isomorphic(boundary(f.transported(u)), boundary(f)) is not None

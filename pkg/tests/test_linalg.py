import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import random_even_form, random_unimodular
from treelike.exact_linalg import (
    IntMatrix,
    ShapeError,
    SingularMatrixError,
    congruent,
    det,
    inertia,
    invert_rational,
    radical_split,
    signature,
    smith_normal_form,
)
from treelike.realize import e8_matrix

# frozen from an independent computer-algebra run
U1 = [[2, 0, 0, 1], [0, 2, 0, 1], [0, 0, -2, 1], [1, 1, 1, 0]]
U2 = [[4, 0, 0, 1], [0, 4, 0, 1], [0, 0, -4, 1], [1, 1, 1, 0]]
M4 = [[2, 1, 0, 3], [1, -4, 2, 0], [0, 2, 6, 1], [3, 0, 1, -2]]
M4_INV_NUM = [[60, 7, -16, 82], [7, -80, 23, 22], [-16, 23, 54, 3], [82, 22, 3, -62]]
M3 = [[6, 3, 0], [3, 0, 9], [0, 9, 12]]


def small_matrices(max_n=8, lo=-9, hi=9, square=False):
    def build(dims):
        r, c = dims
        return st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r).map(
            lambda rows: IntMatrix.from_rows(rows, c)
        )

    if square:
        dims = st.integers(1, max_n).map(lambda n: (n, n))
    else:
        dims = st.tuples(st.integers(1, max_n), st.integers(1, max_n))
    return dims.flatmap(build)


class TestDet:
    def test_empty(self):
        assert det(IntMatrix.zeros(0, 0)) == 1

    def test_fixtures(self):
        assert det(U1) == 4
        assert det(U2) == 16
        assert det(M4) == 373
        assert det(M3) == -594
        assert det(e8_matrix()) == 1
        assert det(e8_matrix(-1)) == 1

    def test_non_square(self):
        with pytest.raises(ShapeError):
            det([[1, 2, 3], [4, 5, 6]])

    def test_big_entries(self):
        big = 10**40
        assert det([[big, 1], [1, big]]) == big * big - 1


class TestSmith:
    def test_identity(self):
        s = smith_normal_form(IntMatrix.identity(3))
        assert s.divisors == (1, 1, 1)
        assert s.D == IntMatrix.identity(3)

    @pytest.mark.parametrize(
        "m, divisors",
        [([[4, 0], [0, 6]], (2, 12)), (U1, (1, 1, 2, 2)), (U2, (1, 1, 4, 4)), (M4, (1, 1, 1, 373)), (M3, (3, 3, 66))],
    )
    def test_frozen_divisors(self, m, divisors):
        s = smith_normal_form(m)
        assert s.divisors == divisors
        assert s.P @ IntMatrix.from_rows(m) @ s.Q == s.D

    def test_zero_and_rank_deficient(self):
        s = smith_normal_form([[0, 0], [0, 0]])
        assert s.divisors == () and s.rank == 0
        s = smith_normal_form([[2, 4], [1, 2]])
        assert s.divisors == (1,)

    @settings(max_examples=150, deadline=None)
    @given(small_matrices())
    def test_invariants(self, m):
        s = smith_normal_form(m)
        assert s.P @ m @ s.Q == s.D
        assert abs(det(s.P)) == 1 and abs(det(s.Q)) == 1
        for i in range(s.D.rows):
            for j in range(s.D.cols):
                if i != j:
                    assert s.D[i, j] == 0
        for a, b in zip(s.divisors, s.divisors[1:]):
            assert b % a == 0
        assert all(a > 0 for a in s.divisors)

    @settings(max_examples=100, deadline=None)
    @given(small_matrices(square=True))
    def test_det_is_product(self, m):
        d = det(m)
        s = smith_normal_form(m)
        if d:
            prod = 1
            for a in s.divisors:
                prod *= a
            assert abs(d) == prod


class TestInverse:
    def test_one_by_one(self):
        assert invert_rational([[7]]).tolist() == [[F(1, 7)]]

    def test_chain(self):
        assert invert_rational([[2, 1], [1, -2]]).tolist() == [[F(2, 5), F(1, 5)], [F(1, 5), F(-2, 5)]]

    def test_frozen_m4(self):
        assert invert_rational(M4).tolist() == [[F(x, 373) for x in row] for row in M4_INV_NUM]

    def test_u1_leaf_block(self):
        inv = invert_rational(U1)
        assert [[inv[0, 0], inv[0, 1]], [inv[1, 0], inv[1, 1]]] == [[0, F(-1, 2)], [F(-1, 2), 0]]

    def test_singular(self):
        with pytest.raises(SingularMatrixError) as exc:
            invert_rational([[1, 2], [2, 4]])
        assert exc.value.det == 0

    @settings(max_examples=100, deadline=None)
    @given(small_matrices(square=True))
    def test_two_sided(self, m):
        if det(m) == 0:
            return
        inv = invert_rational(m)
        n = m.rows
        ident = [[F(int(i == j)) for j in range(n)] for i in range(n)]
        prod1 = [[sum(F(m[i, k]) * inv[k, j] for k in range(n)) for j in range(n)] for i in range(n)]
        prod2 = [[sum(inv[i, k] * m[k, j] for k in range(n)) for j in range(n)] for i in range(n)]
        assert prod1 == ident and prod2 == ident


class TestSignature:
    def test_fixtures(self):
        assert signature(e8_matrix()) == 8
        assert signature(e8_matrix(-1)) == -8
        assert signature([[0, 1], [1, 0]]) == 0
        assert signature(M4) == 0
        assert signature(M3) == 1
        assert signature([[4, 0], [0, 6]]) == 2

    def test_degenerate(self):
        with pytest.raises(SingularMatrixError):
            signature([[0, 0], [0, 2]])

    def test_inertia_degenerate(self):
        assert inertia([[0, 0], [0, 2]]) == (1, 0, 1)

    def test_zero_leading_minor(self):
        # every leading minor of this form vanishes or is forced through a pivot swap
        assert signature([[0, 1, 0], [1, 0, 0], [0, 0, -2]]) == -1

    @pytest.mark.parametrize("seed", range(40))
    def test_congruence_invariance(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 6)
        a = random_even_form(rng, n)
        if det(a) == 0:
            return
        u = random_unimodular(rng, n)
        assert signature(congruent(u, a)) == signature(a)


def test_radical_split():
    a = IntMatrix.from_rows([[2, 2, 0], [2, 2, 0], [0, 0, 0]])
    u, a0, null = radical_split(a)
    assert null == 2 and a0.rows == 1
    assert abs(det(u)) == 1
    full = congruent(u, a)
    assert full.submatrix([0], [0]) == a0
    assert all(full[i, j] == 0 for i in range(3) for j in range(3) if i >= 1 or j >= 1)

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orlovkit.scalars import (
    GF,
    QQ,
    ExactMatrix,
    UPoly,
    nullspace,
    rank,
    rref,
    smith_normal_form,
    solve_linear,
    upoly_det,
    upoly_matmul,
)

small = st.integers(min_value=-4, max_value=4)


def matrices(rows=3, cols=3):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def det2(m, p):
    return (m[0][0] * m[1][1] - m[0][1] * m[1][0]) % p


def test_rref_proportional_rows():
    r, piv, _ = rref([[1, 2], [2, 4]])
    assert (r, piv) == (1, [0])


def test_rref_identity():
    assert rref(ExactMatrix.identity(QQ, 3))[0] == 3


def test_rank_over_f2_matches_cofactor_oracle():
    m = [[1, 1], [1, 2]]
    assert det2(m, 2) != 0
    assert rank(m, GF(2)) == 2


@given(st.lists(st.lists(st.integers(0, 4), min_size=2, max_size=2), min_size=2, max_size=2))
def test_rank_2x2_over_f5_agrees_with_determinant(m):
    r = rank(m, GF(5))
    if det2(m, 5):
        assert r == 2
    else:
        assert r == (0 if all(v % 5 == 0 for row in m for v in row) else 1)


def test_solve_identity():
    assert solve_linear(ExactMatrix.identity(QQ, 3), [1, 2, 3]) == [1, 2, 3]


def test_solve_inconsistent():
    assert solve_linear([[1, 2], [2, 4]], [1, 3]) is None


def test_solve_triangular():
    assert solve_linear([[1, 1], [0, 1]], [3, 1]) == [2, 1]


def test_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        solve_linear([[1, 0]], [1, 2])


@given(matrices(3, 4))
def test_rref_idempotent(m):
    _, _, red = rref(m)
    _, _, red2 = rref(red)
    assert red.to_lists() == red2.to_lists()


@given(matrices(3, 4))
def test_rank_equals_rank_of_transpose(m):
    M = ExactMatrix.from_lists(QQ, m)
    assert rank(M) == rank(M.transpose())


@given(matrices(3, 3), st.lists(small, min_size=3, max_size=3))
def test_solve_recovers_consistent_rhs(m, x0):
    M = ExactMatrix.from_lists(QQ, m)
    b = M.matvec([Fraction(v) for v in x0])
    x = solve_linear(M, b)
    assert x is not None
    assert M.matvec(x) == b


@given(matrices(3, 4))
def test_nullspace_vectors_are_killed(m):
    M = ExactMatrix.from_lists(QQ, m)
    basis = nullspace(M)
    assert len(basis) + rank(M) == 4
    for v in basis:
        assert all(c == 0 for c in M.matvec(v))


def test_prime_field_canonical_form():
    F = GF(7)
    assert F(-1).value == 6
    assert F(3) * F(5) == F(1)
    assert F(Fraction(1, 3)) * F(3) == F(1)
    with pytest.raises(ValueError):
        GF(8)


def test_rationals_are_exact():
    big = Fraction(10) ** 40 + 1
    assert (big * big - big * big) == 0
    assert QQ(Fraction(2, 4)) == Fraction(1, 2)


x = UPoly.x(QQ)
one = UPoly.const(1, QQ)
zero = UPoly([], QQ)


def _check_snf(m):
    U, D, V = smith_normal_form(m, QQ)
    assert upoly_matmul(upoly_matmul(U, [[e if isinstance(e, UPoly) else UPoly.const(e, QQ) for e in row] for row in m], QQ), V, QQ) == D
    assert upoly_det(U, QQ).degree == 0
    assert upoly_det(V, QQ).degree == 0
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    for i in range(len(D)):
        for j in range(len(D[0])):
            if i != j:
                assert D[i][j].is_zero()
    nz = [d for d in diag if not d.is_zero()]
    for a, b in zip(nz, nz[1:]):
        assert divmod(b, a)[1].is_zero()
    return diag


def test_snf_already_diagonal():
    assert _check_snf([[x, zero], [zero, x * x]]) == [x, x * x]


def test_snf_upper_triangular_uses_determinantal_divisors():
    m = [[x, x * x], [zero, x]]
    # d1 = gcd of entries = x, d1*d2 = det = x^2
    d1 = x
    det = upoly_det(m, QQ).monic()
    assert det == x * x
    assert _check_snf(m) == [d1, divmod(det, d1)[0]]


def test_snf_zero_matrix():
    U, D, V = smith_normal_form([[zero, zero], [zero, zero]], QQ)
    ident = [[one, zero], [zero, one]]
    assert U == ident and V == ident
    assert all(e.is_zero() for row in D for e in row)


polys = st.lists(st.integers(-2, 2), min_size=0, max_size=3).map(lambda c: UPoly(c, QQ))


@given(st.lists(st.lists(polys, min_size=2, max_size=2), min_size=2, max_size=3))
def test_snf_properties(m):
    _check_snf(m)

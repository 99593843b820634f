from fractions import Fraction

from hypothesis import given, settings, strategies as st

from latticesums import intlinalg


def is_unimodular(M):
    return abs(intlinalg.det(M)) == 1


int_matrix = st.lists(
    st.lists(st.integers(-6, 6), min_size=3, max_size=3),
    min_size=2, max_size=3)


@settings(max_examples=80, deadline=None)
@given(int_matrix)
def test_smith_normal_form_properties(A):
    D, U, V = intlinalg.smith_normal_form(A)
    assert is_unimodular(U) and is_unimodular(V)
    UAV = intlinalg.mat_mul(intlinalg.mat_mul(U, A), V)
    assert UAV == D
    m, n = len(A), len(A[0])
    diag = [D[i][i] for i in range(min(m, n))]
    for i in range(m):
        for j in range(n):
            if i != j:
                assert D[i][j] == 0
    for a, b in zip(diag, diag[1:]):
        assert a >= 0
        if a != 0:
            assert b % a == 0


@settings(max_examples=60, deadline=None)
@given(int_matrix, st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_solve_integer(A, x_true):
    n = len(A[0])
    x_true = x_true[:n]
    b = [sum(A[i][j] * x_true[j] for j in range(n)) for i in range(len(A))]
    solved = intlinalg.solve_integer(A, b)
    assert solved is not None
    x0, kernel = solved
    assert [sum(A[i][j] * x0[j] for j in range(n))
            for i in range(len(A))] == b
    for kv in kernel:
        assert all(sum(A[i][j] * kv[j] for j in range(n)) == 0
                   for i in range(len(A)))


def test_solve_integer_infeasible():
    assert intlinalg.solve_integer([[2, 0], [0, 2]], [1, 0]) is None


def test_matrix_inverse_and_det():
    M = [[1, 2], [3, 5]]
    inv = intlinalg.mat_inverse(M)
    assert intlinalg.mat_mul(M, inv) == intlinalg.identity(2, Fraction(1))
    assert intlinalg.det(M) == -1


def test_integer_normal():
    n = intlinalg.integer_normal([(1, 1)])
    assert sum(a * b for a, b in zip(n, (1, 1))) == 0
    n2 = intlinalg.integer_normal([(2, 4)])
    assert sum(a * b for a, b in zip(n2, (2, 4))) == 0
    from math import gcd
    assert gcd(*[abs(x) for x in n2]) == 1


def test_row_lattice_membership():
    M = [[1, 1], [1, -1]]
    assert intlinalg.integer_row_lattice_contains(M, (2, 0))
    assert not intlinalg.integer_row_lattice_contains(M, (1, 0))


def test_vec_gcd_of_fractions():
    g = intlinalg.vec_gcd_of_fractions([Fraction(1, 2), Fraction(1, 3)])
    assert g == Fraction(1, 6)
    assert intlinalg.vec_gcd_of_fractions([Fraction(0)]) == 0
    assert intlinalg.vec_gcd_of_fractions(
        [Fraction(1), Fraction(2, 3)]) == Fraction(1, 3)

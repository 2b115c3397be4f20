from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from instanton_lab.algebra import (
    GF,
    QQ,
    ExactMatrix,
    FieldElem,
    GradedPoly,
    batch_rank,
    det_of,
    kernel_of,
    left_kernel_of,
    linear_solve,
    monomials,
    point_array,
    poly_det,
    projective_points,
    rank_of,
    solve_of,
)
from instanton_lab.errors import FieldMismatchError, InhomogeneousError, ValidationError

PRIMES = [3, 5, 7, 101]


def matrices(max_dim=5, bound=200):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(-bound, bound), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


@settings(max_examples=60, deadline=None)
@given(matrices(), st.sampled_from(PRIMES))
def test_rank_matches_sympy_mod_p(rows, p):
    fld = GF(p)
    expected = sympy.Matrix(rows).applyfunc(lambda v: v % p)
    # sympy's rank over GF(p) through its DomainMatrix
    dm = sympy.polys.matrices.DomainMatrix.from_Matrix(expected).convert_to(sympy.GF(p))
    assert rank_of(fld, fld.array(rows)) == dm.rank()


@settings(max_examples=60, deadline=None)
@given(matrices(bound=20))
def test_rank_and_det_over_q_match_sympy(rows):
    arr = QQ.array(rows)
    assert rank_of(QQ, arr) == sympy.Matrix(rows).rank()
    if len(rows) == len(rows[0]):
        assert det_of(QQ, arr) == Fraction(int(sympy.Matrix(rows).det()))


@settings(max_examples=60, deadline=None)
@given(matrices(), st.sampled_from(PRIMES))
def test_kernel_is_kernel_of_full_dimension(rows, p):
    fld = GF(p)
    arr = fld.array(rows)
    ker = kernel_of(fld, arr)
    assert ker.shape[1] == arr.shape[1] - rank_of(fld, arr)
    assert not np.any(fld.reduce(arr @ ker))
    left = left_kernel_of(fld, arr)
    assert not np.any(fld.reduce(left @ arr))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.sampled_from(PRIMES), st.integers(0, 2**32 - 1))
def test_batch_rank_agrees_with_single(r, c, p, seed):
    fld = GF(p)
    rng = np.random.default_rng(seed)
    stack = rng.integers(0, p, size=(30, r, c))
    stack[::3, 0] = 0
    stack[1::4, :, 0] = stack[1::4, :, -1]
    assert batch_rank(fld, stack).tolist() == [rank_of(fld, m) for m in stack]


def test_solve_and_inconsistent_system():
    fld = GF(5)
    a = fld.array([[1, 2], [2, 4]])
    assert solve_of(fld, a, fld.array([1, 2])) is not None
    assert solve_of(fld, a, fld.array([1, 3])) is None


def test_linear_solve_reports_dimension():
    m = ExactMatrix(GF(7), [[1, 2, 3], [2, 4, 6]])
    sol, bad = linear_solve(m, [[1, 2], [1, 1]])
    assert sol.consistent and sol.dimension == 2
    assert not bad.consistent


def test_small_examples():
    fld = GF(5)
    arr = fld.array([[1, 2], [2, 4]])
    assert rank_of(fld, arr) == 1
    assert kernel_of(fld, arr)[:, 0].tolist() == [3, 1]
    assert det_of(fld, arr) == 0
    assert det_of(QQ, QQ.array([[1, 2], [3, 4]])) == -2


def test_field_elements_refuse_mixing():
    a = FieldElem(GF(5), 3)
    b = FieldElem(GF(7), 3)
    with pytest.raises(FieldMismatchError):
        a + b
    assert (a * a).value == 4
    assert (a / a).value == 1


def test_prime_validation():
    for bad in (2, 9, 15, 2**31 + 11):
        with pytest.raises(ValidationError):
            GF(bad)


def test_large_prime_uses_exact_python_ints():
    fld = GF(2147483647)
    arr = fld.array([[2147483646, 2147483645], [3, 2147483640]])
    assert det_of(fld, arr) == (2147483646 * 2147483640 - 2147483645 * 3) % 2147483647


def test_rational_reduction_into_prime_field():
    fld = GF(7)
    assert fld(Fraction(1, 2)) == 4
    assert fld("-3/2") == fld(-3) * 4 % 7
    with pytest.raises(ZeroDivisionError):
        fld(Fraction(1, 7))


def test_graded_poly_homogeneity_and_eval():
    fld = GF(11)
    with pytest.raises(InhomogeneousError):
        GradedPoly.from_terms(fld, 2, {(1, 0): 1, (2, 0): 1})
    x = GradedPoly.var(fld, 2, 0)
    y = GradedPoly.var(fld, 2, 1)
    f = x * x - y * y
    assert f.degree == 2
    assert f.eval((3, 3)) == 0
    with pytest.raises(ValidationError):
        f.eval((0, 0))
    assert GradedPoly.from_vector(fld, 2, 2, f.coefficient_vector().tolist()) == f


def test_poly_det_of_linear_matrix():
    fld = GF(13)
    x = [GradedPoly.var(fld, 3, i) for i in range(3)]
    det = poly_det([[x[0], x[1]], [x[1], x[2]]])
    assert det == x[0] * x[2] - x[1] * x[1]


def test_monomials_and_points():
    assert len(monomials(4, 2)) == 10
    assert monomials(3, 1) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    fld = GF(5)
    pts = list(projective_points(fld, 3))
    assert len(pts) == 156 == len(set(pts))
    assert [tuple(r) for r in point_array(fld, 3)] == pts

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from instanton_lab.algebra import GF, QQ, det_of, rank_of
from instanton_lab.errors import ValidationError
from instanton_lab.geometry import ProjPoint, enumerate_lines, join, secancy_profile
from instanton_lab.monad import (
    UNDECIDED,
    InstantonMonad,
    connecting_matrix,
    find_symplectic,
    global_h0,
    jumping_order,
    multijump_scan,
    multijump_through,
    plane_h0,
    restricted_h0,
    special_thooft_monad,
    thooft_configuration,
    validate_monad,
)

F5, F7 = GF(5), GF(7)


def null_correlation(fld):
    # A = (-x1, x0, -x3, x2)^t, B = (x0, x1, x2, x3)
    A = [np.zeros((4, 1), dtype=int) for _ in range(4)]
    A[1][0, 0], A[0][1, 0], A[3][2, 0], A[2][3, 0] = -1, 1, -1, 1
    B = [np.eye(4, dtype=int)[k : k + 1] for k in range(4)]
    return A, B


def opposite(fld, s):
    return join(ProjPoint(fld, [s, 0, 1, 0]), ProjPoint(fld, [0, s, 0, 1]))


def test_null_correlation_is_valid():
    A, B = null_correlation(F5)
    m = validate_monad(A, B, F5)
    assert m.n == 1
    assert multijump_scan(m) == []


def test_sign_flip_is_reported_at_its_coefficient():
    A, B = null_correlation(F5)
    B[1] = -B[1]
    with pytest.raises(ValidationError, match=r"BA != 0 at coefficient \(1,1\) of x0x1"):
        validate_monad(A, B, F5)


def test_equal_columns_drop_rank_everywhere():
    m = special_thooft_monad(2, F5)
    A = [a.copy() for a in m.A]
    for a in A:
        a[:, 1] = a[:, 0]
    with pytest.raises(ValidationError, match="A drops rank at every point"):
        validate_monad(A, m.B, F5)


def test_shape_and_field_checks():
    A, B = null_correlation(F5)
    with pytest.raises(ValidationError):
        validate_monad(A[:3], B, F5)
    with pytest.raises(ValidationError):
        validate_monad(A, B, F5, scan_p=7)
    with pytest.raises(ValidationError):
        validate_monad(A, B, QQ)
    assert validate_monad(A, B, QQ, scan_p=7).field == QQ


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("p", [5, 7])
def test_special_thooft_is_a_monad(n, p):
    m = special_thooft_monad(n, GF(p))
    for k in range(4):
        for l in range(4):
            assert not np.any(m.field.reduce(m.B[k] @ m.A[l] + m.B[l] @ m.A[k]))


def test_special_thooft_n1_is_null_correlation_up_to_signs():
    m = special_thooft_monad(1, F5)
    for k in range(4):
        assert np.count_nonzero(m.A[k]) == 1 and np.count_nonzero(m.B[k]) == 1


def test_json_round_trip():
    m = special_thooft_monad(3, F7)
    back = InstantonMonad.from_json(m.to_json())
    assert all(np.array_equal(a, b) for a, b in zip(m.A + m.B, back.A + back.B))
    q = special_thooft_monad(2, QQ, validate=False)
    assert InstantonMonad.from_json(q.to_json(), scan_p=5).field == QQ


def test_symplectic_for_null_correlation():
    A, B = null_correlation(F5)
    m = validate_monad(A, B, F5)
    sym = find_symplectic(m)
    J = sym.J
    assert not np.any(F5.reduce(J + J.T)) and det_of(F5, J) != 0
    assert sym.solution_dim == 1
    # the textbook form also satisfies A^t J A = 0 (a 1x1 alternating form)
    std = F5.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    x = F5.array([2, 3, 1, 4])
    a = m.A_at(x)
    assert F5((a.T @ std @ a)[0, 0]) == 0


@pytest.mark.parametrize("n", [2, 5])
def test_symplectic_for_special_thooft(n, request):
    fld = GF(101)
    m = request.getfixturevalue("thooft101") if n == 5 else special_thooft_monad(n, fld)
    sym = find_symplectic(m)
    assert sym is not None
    J = sym.J
    assert not np.any(fld.reduce(J + J.T)) and det_of(fld, J) != 0
    for k in range(4):
        for l in range(4):
            assert not np.any(fld.reduce(m.A[k].T @ J @ m.A[l] + m.A[l].T @ J @ m.A[k]))


def test_restriction_to_generic_and_opposite_lines(thooft7):
    generic = join(ProjPoint(F7, [1, 2, 3, 4]), ProjPoint(F7, [0, 1, 5, 2]))
    assert restricted_h0(thooft7, generic, 0) == 2
    for s in range(7):
        assert restricted_h0(thooft7, opposite(F7, s), 0) == 6
        assert jumping_order(thooft7, opposite(F7, s)) == 5


LINES7 = enumerate_lines(F7)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2849))
def test_restriction_invariants(thooft7, index):
    line = LINES7[index]
    h = [restricted_h0(thooft7, line, j) for j in range(3)]
    assert h[0] >= 2
    for j in range(3):
        assert h[j] - (2 * j + 2) >= 0
    assert h[1] >= 4 and (h[1] == 4) == (h[0] <= 3)
    order = h[0] - 1 if h[0] >= 3 else None
    for k in range(3):
        if order is not None:
            assert (order >= k + 2) == (h[k] >= 2 * k + 3)
        else:
            assert h[k] < 2 * k + 3


def test_scan_is_the_opposite_regulus(thooft7):
    found = multijump_scan(thooft7)
    assert {ln for ln, _ in found} == {opposite(F7, s) for s in range(7)} | {
        join(ProjPoint(F7, [1, 0, 0, 0]), ProjPoint(F7, [0, 1, 0, 0]))
    }
    assert {order for _, order in found} == {5}
    assert [ln for ln, _ in found] == sorted(ln for ln, _ in found)


def test_scan_matches_secancy_to_the_zero_lines(thooft7):
    _, config = thooft_configuration(thooft7)
    assert len(config) == 6 and config.pairwise_skew
    secant = {ln for ln in enumerate_lines(F7) if ln not in config.lines and secancy_profile(ln, config) >= 3}
    assert secant == {ln for ln, _ in multijump_scan(thooft7)}


def test_scan_is_projectively_equivariant(f7):
    m = special_thooft_monad(4, f7)
    g = f7.array([[1, 2, 0, 0], [0, 1, 0, 3], [0, 0, 1, 1], [4, 0, 0, 1]])
    moved = m.transformed(g)
    before = {ln for ln, _ in multijump_scan(m)}
    after = multijump_scan(moved)
    # a line L of the new bundle corresponds to g(L) for the old one
    for ln, _ in after:
        a, b = ln.points()
        image = join(ProjPoint(f7, f7.reduce(g @ a.vector()).tolist()), ProjPoint(f7, f7.reduce(g @ b.vector()).tolist()))
        assert image in before
    assert len(after) == len(before)


def test_parallel_scan_is_identical(thooft7):
    assert multijump_scan(thooft7, jobs=1) == multijump_scan(thooft7, jobs=3)


def test_jumping_order_undecided_without_symplectic(thooft7):
    line = join(ProjPoint(F7, [1, 2, 3, 4]), ProjPoint(F7, [0, 1, 5, 2]))
    assert jumping_order(thooft7, line) == UNDECIDED


def test_jumping_order_with_symplectic_agrees_on_multijumping_lines(thooft101, symplectic101, f101):
    for s in (0, 3, 50):
        line = opposite(f101, s)
        assert jumping_order(thooft101, line, symplectic101) == jumping_order(thooft101, line) == 5


def test_null_correlation_orders_at_most_one():
    A, B = null_correlation(GF(101))
    m = validate_monad(A, B, GF(101))
    sym = find_symplectic(m)
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b = (ProjPoint(m.field, rng.integers(1, 101, 4).tolist()) for _ in range(2))
        if a != b:
            assert jumping_order(m, join(a, b), sym) in (0, 1)


def test_global_sections(thooft7):
    assert global_h0(thooft7, 0) == 0
    assert global_h0(thooft7, 1) == 2
    assert global_h0(thooft7, 2) == 8
    generic = global_h0(thooft7, 2, through=ProjPoint(F7, [1, 2, 3, 5]))
    on_quadric = global_h0(thooft7, 2, through=ProjPoint(F7, [2, 6, 1, 3]))
    assert generic == 6 and on_quadric == 7


def test_connecting_corank_matches_restriction(thooft7):
    # J-free oracle: corank of B(w)A(N) equals the order when the order is >= 2
    n_pt = ProjPoint(F7, [3, 0, 1, 0])
    for ln, order in multijump_through(thooft7, n_pt):
        w = next(p for p in ln.points() if p != n_pt)
        assert 5 - rank_of(F7, connecting_matrix(thooft7, n_pt.coords, w.coords)) == order


def test_restriction_to_planes(thooft7):
    # x3 = 0 contains the order-5 line x2 = x3 = 0, so E restricted to it is unstable
    assert plane_h0(thooft7, F7.array([0, 0, 0, 1])) > 0
    assert plane_h0(thooft7, F7.array([1, 2, 3, 4])) == 0

import numpy as np
import pytest
import sympy

from instanton_lab.algebra import GF, det_of, rank_of
from instanton_lab.errors import DegenerateError, ValidationError
from instanton_lab.geometry import ProjPoint, join, ngon_vertices, y_point_of_line
from instanton_lab.monad import (
    connecting_matrix,
    find_symplectic,
    jumping_order,
    section_value,
    special_thooft_monad,
    thooft_configuration,
)
from instanton_lab.net import (
    NetOfQuadrics,
    beta_system,
    block_semistable_net,
    corank_table,
    discriminant,
    discriminant_corank,
    distinguished_pair,
    h1_oc1_dim,
    hypernet_from_monad,
    net_at_point,
    net_stability,
    ngon_section_check,
    random_kernel_pair,
    singularity_diagnostics,
    splitting_obstruction,
    theta_section_spaces,
)

F5, F7, F101 = GF(5), GF(7), GF(101)


def random_point(fld, rng):
    while True:
        v = rng.integers(0, fld.p, 4)
        if np.any(v):
            return ProjPoint(fld, v.tolist())


def random_net(fld, n, rng):
    mats = []
    for _ in range(3):
        m = fld.random_array(rng, (n, n))
        mats.append(fld.reduce(m + m.T))
    return NetOfQuadrics(n, fld, tuple(mats))


def random_invertible(fld, n, rng):
    while True:
        P = fld.random_array(rng, (n, n))
        if det_of(fld, P) != 0:
            return P


# -- hypernet ---------------------------------------------------------------


def test_hypernet_is_alternating(hypernet101, rng):
    for _ in range(10):
        x = F101.random_array(rng, 4)
        y = F101.random_array(rng, 4)
        assert not np.any(hypernet101.at(x, x))
        assert not np.any(F101.reduce(hypernet101.at(x, y) + hypernet101.at(y, x)))
        q = hypernet101.at(x, y)
        assert np.array_equal(q, q.T)


def test_hypernet_rejects_bad_symplectic(thooft101, symplectic101):
    bad = type(symplectic101)(F101.eye(12), symplectic101.G, 1)
    with pytest.raises(ValidationError, match="J does not annihilate A symmetrically"):
        hypernet_from_monad(thooft101, bad)


def test_null_correlation_net_is_a_line():
    m = special_thooft_monad(1, F101)
    hyper = hypernet_from_monad(m, find_symplectic(m))
    net = net_at_point(hyper, ProjPoint(F101, [1, 2, 3, 4]))
    assert any(np.any(mk) for mk in net.M)
    disc = discriminant(net)
    assert disc.degree == 1
    assert disc.coefficient_vector().tolist() == [int(mk[0, 0]) for mk in net.M]
    assert theta_section_spaces(net).dims["theta2"] == 2
    assert net_stability(NetOfQuadrics(1, F5, tuple(F5.array([[c]]) for c in (1, 2, 0)))).verdict == "stable"


def test_net_json_round_trip(net101):
    back = NetOfQuadrics.from_json(net101.to_json())
    assert all(np.array_equal(a, b) for a, b in zip(net101.M, back.M))
    with pytest.raises(ValidationError):
        NetOfQuadrics(2, F5, (F5.array([[0, 1], [2, 0]]),) * 3)


# -- corank law ---------------------------------------------------------------


def test_corank_law_on_random_lines(thooft101, hypernet101, rng):
    for _ in range(3):
        n_pt = random_point(F101, rng)
        net = net_at_point(hypernet101, n_pt)
        for _ in range(15):
            w = random_point(F101, rng)
            if w == n_pt:
                continue
            line = join(n_pt, w)
            corank = net.corank(y_point_of_line(n_pt, line).coords)
            assert corank == 5 - rank_of(F101, connecting_matrix(thooft101, n_pt.coords, w.coords))


def test_corank_law_on_the_discriminant_curve(thooft101, net101):
    table = corank_table(net101)
    jumping = [y for y, c in table.items() if c > 0]
    assert jumping, "the jumping curve has F_101-points"
    disc = discriminant(net101)
    for y in jumping:
        w = F101.reduce(F101.array(list(y)) @ net101.basis)
        assert table[y] == 5 - rank_of(F101, connecting_matrix(thooft101, net101.point.coords, w))
        assert disc.eval(y) == 0
    off = [y for y, c in table.items() if c == 0][:50]
    assert all(disc.eval(y) != 0 for y in off)


def test_point_on_quadric_sees_the_order_five_line(thooft101, hypernet101, symplectic101):
    n_pt = ProjPoint(F101, [2, 6, 1, 3])  # on x0 = 2 x2, x1 = 2 x3
    net = net_at_point(hypernet101, n_pt)
    line = join(n_pt, ProjPoint(F101, [10, 14, 5, 7]))
    y = y_point_of_line(n_pt, line).coords
    assert net.corank(y) == 5 == jumping_order(thooft101, line)
    assert jumping_order(thooft101, line, symplectic101) == 5
    assert discriminant(net).eval(y) == 0
    assert discriminant_corank(net, y) == 5


def test_complement_change_substitutes_the_discriminant(net101, rng):
    g = random_invertible(F101, 3, rng)
    moved = net101.substituted(g)
    y = F101.random_array(rng, 3)
    if not np.any(y):
        y[0] = 1
    gy = F101.reduce(g @ y)
    assert discriminant(moved).eval(y) == discriminant(net101).eval(gy)


# -- stability ------------------------------------------------------------------


def test_block_fixture_is_not_stable(rng):
    for n in (4, 5):
        net = block_semistable_net(n, F5, rng)
        res = net_stability(net, 5)
        assert res.verdict in {"strictly_semistable", "unstable"}
        assert res.witness.shape[0] == 2
        assert res.witness.tolist() == [[1] + [0] * (n - 1), [0, 1] + [0] * (n - 2)]


def test_random_nets_are_classified(rng):
    verdicts = {net_stability(random_net(F5, 4, rng), 5).verdict for _ in range(5)}
    assert verdicts <= {"stable", "strictly_semistable", "unstable"}


def test_stability_is_gl_equivariant(rng):
    net = block_semistable_net(4, F5, rng)
    base = net_stability(net, 5)
    for _ in range(3):
        P = random_invertible(F5, 4, rng)
        moved = net.transformed(P)
        res = net_stability(moved, 5)
        assert res.verdict == base.verdict and res.excess == base.excess
        Pinv = F5.array(sympy.Matrix(P.tolist()).inv_mod(5).tolist())
        mapped = F5.reduce(base.witness @ Pinv.T)  # rows P^-1 v
        for k in range(3):
            assert not np.any(F5.reduce(mapped @ moved.M[k] @ mapped.T))


def test_stability_rejects_large_search():
    net = NetOfQuadrics(8, GF(101), tuple(GF(101).eye(8) for _ in range(3)))
    with pytest.raises(ValidationError, match="smaller prime"):
        net_stability(net)


# -- theta spaces and beta ---------------------------------------------------------


def test_theta_dimensions(spaces101, net101):
    assert spaces101.dims == {"theta2": 10, "theta3": 15, "sigma": 28}
    assert h1_oc1_dim(net101) == 3


def test_theta_dimensions_charge_four():
    m = special_thooft_monad(4, F101)
    net = net_at_point(hypernet_from_monad(m, find_symplectic(m)), ProjPoint(F101, [1, 7, 3, 9]))
    assert theta_section_spaces(net).dims == {"theta2": 8, "theta3": 12, "sigma": 19}
    beta = beta_system(net)
    assert beta.r == 1 and beta.stacked_rank() == 1


def test_degenerate_net_is_rejected():
    zero = NetOfQuadrics(3, F7, tuple(F7.zeros((3, 3)) for _ in range(3)))
    with pytest.raises(DegenerateError):
        theta_section_spaces(zero)


@pytest.fixture(scope="module")
def beta101(spaces101):
    return beta_system(spaces101)


def test_beta_is_surjective_and_alternating(beta101, rng):
    assert beta101.r == 3 and beta101.stacked_rank() == 3
    for a in beta101.forms:
        assert not np.any(F101.reduce(a + a.T))
        assert not np.any(np.diag(a))
    s, t = F101.random_array(rng, 10), F101.random_array(rng, 10)
    assert not np.any(F101.reduce(beta101.evaluate(s, t) + beta101.evaluate(t, s)))


def test_obstruction_descriptions_agree(beta101, rng):
    nonzero = 0
    for _ in range(20):
        s, t = F101.random_array(rng, 10), F101.random_array(rng, 10)
        obs = splitting_obstruction(beta101, s, t)
        nonzero += not obs.vanishes
    assert nonzero >= 18
    s = F101.random_array(rng, 10)
    assert splitting_obstruction(beta101, s, s).vanishes


def test_distinguished_pair(thooft101, symplectic101, generic_point101, spaces101, beta101):
    K = distinguished_pair(thooft101, symplectic101, generic_point101, spaces101)
    assert K.shape == (2, 10) and rank_of(F101, K) == 2
    assert splitting_obstruction(beta101, K[0], K[1]).vanishes


def test_distinguished_pair_needs_no_multijumping_line(thooft101, symplectic101):
    with pytest.raises(ValidationError, match="multi-jumping"):
        distinguished_pair(thooft101, symplectic101, ProjPoint(F101, [2, 6, 1, 3]))


def test_diagnostics(beta101, thooft101, symplectic101, generic_point101, spaces101, rng):
    generic = singularity_diagnostics(beta101, random_kernel_pair(beta101, rng))
    assert generic["tangent_dim"] == 13
    assert generic["theta_moduli_dim"] + generic["projective_fibre_dim"] + generic["tangent_dim"] == 37
    K = distinguished_pair(thooft101, symplectic101, generic_point101, spaces101)
    special = singularity_diagnostics(beta101, K)
    assert special["tangent_dim"] == 16
    assert special["common_kernel_dim"] >= 0
    pair = F101.eye(10)[:2]
    if np.any(beta101.evaluate(pair[0], pair[1])):
        with pytest.raises(ValidationError, match="does not vanish"):
            singularity_diagnostics(beta101, pair)


def test_ngon_vertices_on_discriminant_and_section_in_image():
    m = special_thooft_monad(5, F7)
    sym = find_symplectic(m)
    section, config = thooft_configuration(m)
    n_pt = ProjPoint(F7, [1, 0, 0, 1])
    net = net_at_point(hypernet_from_monad(m, sym), n_pt)
    vertices = ngon_vertices(config, n_pt)
    disc = discriminant(net)
    assert disc.degree == 5
    assert all(disc.eval(v.coords) == 0 for v in vertices.values())
    check = ngon_section_check(m, sym, net, section_value(m, section, 1, n_pt.coords), vertices)
    assert len(check) == 15 and all(c["in_image"] and c["corank"] >= 1 for c in check.values())

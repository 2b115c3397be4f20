"""Tjurin hypernet, the net of quadrics at a point and its theta-characteristic data.

Conventions used throughout:

* ``H = k^n`` carries the net; ``M_k : H -> H^v`` are symmetric matrices.
* ``V`` has basis ``y0, y1, y2``, the coordinates of the plane ``Y`` of lines
  through ``N`` for the complement basis ``w0, w1, w2`` of ``<N>``.
* ``H^v (x) V`` is indexed by ``3*a + k``; ``H^v (x) S2V`` by ``6*a + m`` with
  ``m`` running over ``monomials(3, 2)``; ``L2(H^v) (x) S2V`` by
  ``6*pair + m`` with pairs ``a < b`` in lexicographic order.
* Quotients are carried as :class:`CosetSpace`: a relation span plus a
  complement of standard basis vectors, with coordinates read off through
  the inverse of ``[relations | complement]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    Field,
    GradedPoly,
    binom,
    PrimeField,
    batch_rank,
    field_from_json,
    field_to_json,
    kernel_of,
    left_kernel_of,
    monomials,
    point_array,
    poly_det,
    rank_of,
    rref,
)
from .errors import ConsistencyError, DegenerateError, ValidationError
from .geometry import ProjPoint, complement_basis

__all__ = [
    "Hypernet",
    "NetOfQuadrics",
    "CosetSpace",
    "ThetaSpaces",
    "BetaSystem",
    "StabilityResult",
    "Obstruction",
    "hypernet_from_monad",
    "net_at_point",
    "discriminant",
    "discriminant_corank",
    "corank_table",
    "net_stability",
    "block_semistable_net",
    "theta_section_spaces",
    "beta_system",
    "splitting_obstruction",
    "distinguished_pair",
    "random_kernel_pair",
    "singularity_diagnostics",
    "fibre_section",
    "ngon_section_check",
    "h1_oc1_dim",
]

_S2 = monomials(3, 2)
_S2_INDEX = {m: i for i, m in enumerate(_S2)}


def _s2(k: int, l: int) -> int:
    e = [0, 0, 0]
    e[k] += 1
    e[l] += 1
    return _S2_INDEX[tuple(e)]


# --------------------------------------------------------------------------
# hypernet and nets


@dataclass(frozen=True, eq=False)
class Hypernet:
    """``Q(x ^ y) = sum_{i<j} (x_i y_j - x_j y_i) Q_ij`` with symmetric ``Q_ij``."""

    n: int
    field: Field
    Q: dict  # (i, j), i < j  ->  symmetric n x n

    def at(self, x: Sequence, y: Sequence) -> np.ndarray:
        fld = self.field
        acc = fld.zeros((self.n, self.n))
        for (i, j), q in self.Q.items():
            c = fld(fld(x[i]) * fld(y[j]) - fld(x[j]) * fld(y[i]))
            if c:
                acc = fld.reduce(acc + q * c)
        return acc


def hypernet_from_monad(monad, symplectic) -> Hypernet:
    """``Q(x ^ y)(h, h') = omega_J(A(x) h, A(y) h')``."""
    fld, J = monad.field, symplectic.J
    A = monad.A
    for i in range(4):
        if np.any(fld.reduce(A[i].T @ J @ A[i])):
            raise ValidationError("J does not annihilate A symmetrically")
    Q = {}
    for i, j in itertools.combinations(range(4), 2):
        q = fld.reduce(A[i].T @ J @ A[j])
        if np.any(fld.reduce(q - q.T)) or np.any(fld.reduce(q + A[j].T @ J @ A[i])):
            raise ValidationError("J does not annihilate A symmetrically")
        Q[(i, j)] = q
    return Hypernet(monad.n, fld, Q)


@dataclass(frozen=True, eq=False)
class NetOfQuadrics:
    n: int
    field: Field
    M: tuple  # three symmetric n x n matrices
    point: ProjPoint | None = None
    basis: np.ndarray | None = None  # rows w0, w1, w2

    def __post_init__(self):
        if len(self.M) != 3:
            raise ValidationError("a net has three matrices")
        for m in self.M:
            if m.shape != (self.n, self.n):
                raise ValidationError(f"net matrix of shape {m.shape}, expected {self.n}x{self.n}")
            if np.any(self.field.reduce(m - m.T)):
                raise ValidationError("net matrices must be symmetric")

    def at(self, y: Sequence) -> np.ndarray:
        fld = self.field
        return fld.reduce(sum(self.M[k] * fld(y[k]) for k in range(3)))

    def corank(self, y: Sequence) -> int:
        return self.n - rank_of(self.field, self.at(y))

    def transformed(self, P: np.ndarray) -> "NetOfQuadrics":
        """The net ``M_k -> P^t M_k P`` (action of ``h -> P h``)."""
        fld = self.field
        P = fld.array(P)
        return NetOfQuadrics(self.n, fld, tuple(fld.reduce(P.T @ m @ P) for m in self.M))

    def substituted(self, g: np.ndarray) -> "NetOfQuadrics":
        """The net in new coordinates ``y = g y'``: ``M'_l = sum_k g[k, l] M_k``."""
        fld = self.field
        g = fld.array(g)
        return NetOfQuadrics(self.n, fld, tuple(fld.reduce(sum(self.M[k] * g[k, l] for k in range(3))) for l in range(3)))

    def to_json(self) -> dict:
        enc = self.field.encode
        return {
            "n": self.n,
            "field": field_to_json(self.field),
            "M": [[[enc(v) for v in row] for row in m.tolist()] for m in self.M],
        }

    @classmethod
    def from_json(cls, obj: dict, fld: Field | None = None) -> "NetOfQuadrics":
        if fld is None:
            fld = field_from_json(obj.get("field", "Q"))
        mats = tuple(fld.array(m) for m in obj["M"])
        return cls(int(obj["n"]), fld, mats)


def net_at_point(hypernet: Hypernet, n_pt: ProjPoint) -> NetOfQuadrics:
    """``M_k = Q(N ^ w_k)`` for the standard complement basis of ``<N>``."""
    basis = complement_basis(n_pt)
    mats = tuple(hypernet.at(n_pt.coords, w) for w in basis)
    if not any(np.any(m) for m in mats):
        raise DegenerateError(f"the hypernet restricts to zero at {n_pt}")
    return NetOfQuadrics(hypernet.n, hypernet.field, mats, n_pt, basis)


def discriminant(net: NetOfQuadrics) -> GradedPoly:
    fld = net.field
    entries = [
        [GradedPoly.linear(fld, [net.M[k][i, j] for k in range(3)]) for j in range(net.n)]
        for i in range(net.n)
    ]
    return poly_det(entries)


def discriminant_corank(net: NetOfQuadrics, y="full-curve"):
    """Corank of the net at ``y``, or the degree-n discriminant form for ``"full-curve"``."""
    if isinstance(y, str):
        if y != "full-curve":
            raise ValidationError(f"unknown discriminant request {y!r}")
        return discriminant(net)
    return net.corank(y)


def corank_table(net: NetOfQuadrics) -> dict[tuple, int]:
    """Corank at every F_p-point of ``Y`` (batched)."""
    fld = net.field
    pts = point_array(fld, 2)
    stack = np.stack([np.asarray(m, dtype=np.int64) for m in net.M])
    vals = np.einsum("nk,kij->nij", pts, stack) % fld.p
    ranks = batch_rank(fld, vals)
    return {tuple(int(v) for v in pt): net.n - int(r) for pt, r in zip(pts, ranks)}


# --------------------------------------------------------------------------
# stability


@dataclass(frozen=True, eq=False)
class StabilityResult:
    verdict: str  # "stable" | "strictly_semistable" | "unstable"
    witness: np.ndarray | None  # rows spanning the isotropic subspace
    perp_dim: int | None
    excess: int | None  # dim L + dim L^perp - n
    searched: int

    def to_json(self, fld: Field) -> dict:
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else [[fld.encode(v) for v in row] for row in self.witness.tolist()],
            "perp_dim": self.perp_dim,
            "excess": self.excess,
            "searched": self.searched,
        }


def subspace_count(p: int, n: int, k: int) -> int:
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def subspace_bases(fld: PrimeField, n: int, k: int) -> np.ndarray:
    """Reduced row echelon bases of every k-dim subspace of F_p^n, shape ``(count, k, n)``."""
    p = fld.p
    blocks = []
    for piv in itertools.combinations(range(n), k):
        free = [(r, c) for r in range(k) for c in range(piv[r] + 1, n) if c not in piv]
        count = p ** len(free)
        block = np.zeros((count, k, n), dtype=np.int64)
        for r, c in enumerate(piv):
            block[:, r, c] = 1
        if free:
            vals = np.indices((p,) * len(free)).reshape(len(free), -1).T
            for f, (r, c) in enumerate(free):
                block[:, r, c] = vals[:, f]
        blocks.append(block)
    return np.concatenate(blocks)


def net_stability(net: NetOfQuadrics, exhaustive_p: int | None = None, max_subspaces: int = 2_000_000) -> StabilityResult:
    """Exhaustive search for isotropic ``L`` of dimension 1 and 2 with ``dim L + dim L^perp >= n``."""
    fld, n = net.field, net.n
    if not isinstance(fld, PrimeField) or fld.dtype is object:
        raise ValidationError("stability search needs a net over a small prime field")
    if exhaustive_p is not None and exhaustive_p != fld.p:
        raise ValidationError(f"net is over {fld}, search requested over F_{exhaustive_p}")
    dims = [k for k in (1, 2) if k <= n]
    total = sum(subspace_count(fld.p, n, k) for k in dims)
    if total > max_subspaces:
        raise ValidationError(f"{total} subspaces to search over F_{fld.p}; use a smaller prime")
    mats = np.stack([np.asarray(m, dtype=np.int64) for m in net.M])
    best = None  # (excess, k, basis, perp)
    for k in dims:
        bases = subspace_bases(fld, n, k)
        for start in range(0, len(bases), 50000):
            X = bases[start : start + 50000]
            XM = np.einsum("ski,mij->smkj", X, mats) % fld.p  # (S, 3, k, n)
            gram = np.einsum("smkj,slj->smkl", XM, X) % fld.p
            iso = ~gram.reshape(len(X), -1).any(axis=1)
            if not iso.any():
                continue
            idx = np.nonzero(iso)[0]
            rows = XM[idx].reshape(len(idx), 3 * k, n)
            perp = n - batch_rank(fld, rows)
            excess = k + perp - n
            for e, i, pd in zip(excess, idx, perp):
                key = (int(e), k)
                if e >= 0 and (best is None or key > best[0]):
                    best = (key, X[i].copy(), int(pd))
    if best is None:
        return StabilityResult("stable", None, None, None, total)
    (excess, _), witness, perp = best
    verdict = "unstable" if excess > 0 else "strictly_semistable"
    return StabilityResult(verdict, witness, perp, excess, total)


def block_semistable_net(n: int, fld: Field, rng: np.random.Generator) -> NetOfQuadrics:
    """Random net whose matrices vanish on the block ``[:2, :n-2]`` and its transpose.

    ``span(e1, e2)`` is then isotropic with perp ``span(e1, .., e_{n-2})``.
    """
    if n < 4:
        raise ValidationError("block fixture needs n >= 4")
    mats = []
    for _ in range(3):
        m = fld.random_array(rng, (n, n))
        m = fld.reduce(m + m.T)
        m[:2, : n - 2] = fld.zero
        m[: n - 2, :2] = fld.zero
        mats.append(m)
    return NetOfQuadrics(n, fld, tuple(mats))


# --------------------------------------------------------------------------
# quotients


@dataclass(frozen=True, eq=False)
class CosetSpace:
    field: Field
    relations: np.ndarray  # ambient x rank, independent columns
    complement: np.ndarray  # ambient x dim, standard basis vectors
    _inverse: np.ndarray

    @classmethod
    def of(cls, fld: Field, relations: np.ndarray) -> "CosetSpace":
        amb = relations.shape[0]
        aug = np.concatenate([relations, fld.eye(amb)], axis=1)
        _, pivots, _ = rref(fld, aug)
        rel_cols = [c for c in pivots if c < relations.shape[1]]
        comp_cols = [c - relations.shape[1] for c in pivots if c >= relations.shape[1]]
        rel = relations[:, rel_cols]
        comp = fld.eye(amb)[:, comp_cols]
        square = np.concatenate([rel, comp], axis=1)
        inv = rref(fld, np.concatenate([square, fld.eye(amb)], axis=1))[0][:, amb:]
        return cls(fld, rel, comp, inv)

    @property
    def ambient(self) -> int:
        return self.relations.shape[0]

    @property
    def rank(self) -> int:
        return self.relations.shape[1]

    @property
    def dim(self) -> int:
        return self.complement.shape[1]

    def coords(self, v: np.ndarray) -> np.ndarray:
        return self.field.reduce(self._inverse[self.rank :] @ v)

    def lift(self, c: np.ndarray) -> np.ndarray:
        return self.field.reduce(self.complement @ c)

    def is_zero(self, v: np.ndarray) -> bool:
        return not np.any(self.coords(v))


def _times_net(net: NetOfQuadrics, h: np.ndarray) -> np.ndarray:
    """``(M h)_a`` as an ``n x 3`` array: the linear form ``sum_k (M_k h)_a y_k``."""
    fld = net.field
    return fld.reduce(np.stack([m @ h for m in net.M], axis=1))


def _s2_product(fld: Field, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Product of two linear forms in ``V`` as a vector on ``S2V``."""
    out = fld.zeros(6)
    for k in range(3):
        for l in range(3):
            if u[k] and v[l]:
                i = _s2(k, l)
                out[i] = fld(out[i] + u[k] * v[l])
    return out


@dataclass(frozen=True, eq=False)
class ThetaSpaces:
    net: NetOfQuadrics
    theta2: CosetSpace  # in H^v (x) V
    theta3: CosetSpace  # in H^v (x) S2V
    sigma: CosetSpace  # in H^v (x) H^0(theta(3))

    @property
    def dims(self) -> dict:
        return {"theta2": self.theta2.dim, "theta3": self.theta3.dim, "sigma": self.sigma.dim}

    def section(self, coords: np.ndarray) -> np.ndarray:
        """Representative in ``H^v (x) V`` as an ``n x 3`` array."""
        return self.theta2.lift(coords).reshape(self.net.n, 3)

    def theta3_block(self, z: np.ndarray) -> np.ndarray:
        """Coordinates in ``H^0(theta(3))`` of an ``n x 6`` array on ``H^v (x) S2V``."""
        return self.theta3.coords(z.reshape(-1))

    def sigma_vector(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        """Element of ``H^v (x) H^0(theta(3))`` from ``n`` blocks in ``H^v (x) S2V``."""
        return np.concatenate([self.theta3_block(b) for b in blocks])


def theta_section_spaces(net: NetOfQuadrics) -> ThetaSpaces:
    fld, n = net.field, net.n
    r2 = fld.zeros((3 * n, n))
    r3 = fld.zeros((6 * n, 3 * n))
    for c in range(n):
        mh = _times_net(net, fld.eye(n)[:, c])
        r2[:, c] = mh.reshape(-1)
        for l in range(3):
            for a in range(n):
                for k in range(3):
                    i = 6 * a + _s2(k, l)
                    r3[i, 3 * c + l] = fld(r3[i, 3 * c + l] + mh[a, k])
    theta2 = CosetSpace.of(fld, r2)
    theta3 = CosetSpace.of(fld, r3)
    if theta2.dim != 2 * n or theta3.dim != 3 * n:
        raise DegenerateError(
            f"theta spaces of dimension {theta2.dim}, {theta3.dim}; expected {2 * n}, {3 * n} (degenerate net)"
        )
    partial = _Partial(net, theta2, theta3)
    cols = []
    for c in range(n):
        mh = _times_net(net, fld.eye(n)[:, c])
        for t in range(theta2.dim):
            t_hat = theta2.complement[:, t].reshape(n, 3)
            cols.append(partial.multiply(mh, t_hat))
    sigma = CosetSpace.of(fld, np.stack(cols, axis=1))
    return ThetaSpaces(net, theta2, theta3, sigma)


@dataclass(frozen=True)
class _Partial:
    net: NetOfQuadrics
    theta2: CosetSpace
    theta3: CosetSpace

    def multiply(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """``sum_a e_a^v (x) [sum_b e_b^v (x) right_b * left_a]`` in ``H^v (x) H^0(theta(3))``."""
        fld, n = self.net.field, self.net.n
        out = []
        for a in range(n):
            block = np.stack([_s2_product(fld, right[b], left[a]) for b in range(n)])
            out.append(self.theta3.coords(block.reshape(-1)))
        return np.concatenate(out)


# --------------------------------------------------------------------------
# the beta system


@dataclass(frozen=True, eq=False)
class BetaSystem:
    spaces: ThetaSpaces
    functionals: np.ndarray  # r x (C(n,2)*6), annihilating the image of b'
    forms: tuple  # r skew 2n x 2n matrices on H^0(theta(2)) coordinates

    @property
    def r(self) -> int:
        return len(self.forms)

    @property
    def field(self) -> Field:
        return self.spaces.net.field

    def evaluate(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        fld = self.field
        return fld.array([fld(s @ a @ t) for a in self.forms])

    def stacked_rank(self) -> int:
        fld, d = self.field, self.spaces.theta2.dim
        rows = [[a[i, j] for i, j in itertools.combinations(range(d), 2)] for a in self.forms]
        return rank_of(fld, fld.array(rows))


def _pairs(n: int) -> dict:
    return {pr: i for i, pr in enumerate(itertools.combinations(range(n), 2))}


def _wedge_lift(fld: Field, n: int, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``a'(s ^ t)`` in ``L2(H^v) (x) S2V`` for ``s, t`` in ``H^v (x) V`` (``n x 3`` arrays)."""
    pairs = _pairs(n)
    out = fld.zeros(6 * len(pairs))
    for (a, b), pi in pairs.items():
        for k in range(3):
            for l in range(3):
                c = fld(s[a, k] * t[b, l] - s[b, k] * t[a, l])
                if c:
                    i = 6 * pi + _s2(k, l)
                    out[i] = fld(out[i] + c)
    return out


def _b_prime(net: NetOfQuadrics) -> np.ndarray:
    """``h (x) e_c (x) y_l  ->  sum_k (M_k h ^ e_c) (x) y_k y_l``."""
    fld, n = net.field, net.n
    pairs = _pairs(n)
    cols = []
    for h in range(n):
        mh = _times_net(net, fld.eye(n)[:, h])
        for c in range(n):
            for l in range(3):
                col = fld.zeros(6 * len(pairs))
                for a in range(n):
                    if a == c:
                        continue
                    sign, pr = (1, (a, c)) if a < c else (-1, (c, a))
                    for k in range(3):
                        if mh[a, k]:
                            i = 6 * pairs[pr] + _s2(k, l)
                            col[i] = fld(col[i] + sign * mh[a, k])
                cols.append(col)
    return np.stack(cols, axis=1)


def beta_system(spaces: ThetaSpaces | NetOfQuadrics) -> BetaSystem:
    if isinstance(spaces, NetOfQuadrics):
        spaces = theta_section_spaces(spaces)
    net = spaces.net
    fld, n = net.field, net.n
    lam = left_kernel_of(fld, _b_prime(net))
    expected = binom(n - 2, 2)
    if lam.shape[0] != expected:
        raise DegenerateError(f"H^1(O_C(1)) has dimension {lam.shape[0]}, expected {expected}")
    amb = spaces.theta2.ambient
    # full bilinear forms on H^v (x) V, then restricted to the complement basis
    lifts = {}
    for i in range(amb):
        for j in range(amb):
            s = fld.eye(amb)[i].reshape(n, 3)
            t = fld.eye(amb)[j].reshape(n, 3)
            lifts[i, j] = fld.reduce(lam @ _wedge_lift(fld, n, s, t))
    full = [fld.zeros((amb, amb)) for _ in range(expected)]
    for (i, j), vals in lifts.items():
        for r in range(expected):
            full[r][i, j] = vals[r]
    rel, comp = spaces.theta2.relations, spaces.theta2.complement
    for f in full:
        if np.any(fld.reduce(rel.T @ f)):
            raise ConsistencyError("beta forms do not descend to H^0(theta(2))")
    forms = tuple(fld.reduce(comp.T @ f @ comp) for f in full)
    beta = BetaSystem(spaces, lam, forms)
    rank = beta.stacked_rank()
    if rank != expected:
        raise ValidationError(f"beta is not surjective: rank {rank} < {expected}")
    return beta


@dataclass(frozen=True, eq=False)
class Obstruction:
    value: np.ndarray  # beta(s ^ s') in the coordinates of H^1(O_C(1))
    in_image: bool  # the a(W) inside Im b test

    @property
    def vanishes(self) -> bool:
        return not np.any(self.value)


def _image_test(beta: BetaSystem, s_hat: np.ndarray, t_hat: np.ndarray) -> bool:
    spaces = beta.spaces
    fld, n = beta.field, spaces.net.n
    blocks = []
    for a in range(n):
        block = np.stack(
            [fld.reduce(_s2_product(fld, s_hat[a], t_hat[b]) - _s2_product(fld, t_hat[a], s_hat[b])) for b in range(n)]
        )
        blocks.append(block)
    return spaces.sigma.is_zero(spaces.sigma_vector(blocks))


def splitting_obstruction(beta: BetaSystem, s: np.ndarray, t: np.ndarray) -> Obstruction:
    """``beta(s ^ t)`` for coordinates ``s, t`` on ``H^0(theta(2))``, cross-checked by the image test."""
    fld = beta.field
    s, t = fld.array(s), fld.array(t)
    value = beta.evaluate(s, t)
    in_image = _image_test(beta, beta.spaces.section(s), beta.spaces.section(t))
    if in_image == bool(np.any(value)):
        raise ConsistencyError("the two descriptions of the splitting condition disagree")
    return Obstruction(value, in_image)


def distinguished_pair(monad, symplectic, n_pt: ProjPoint, spaces: ThetaSpaces | None = None) -> np.ndarray:
    """Image of the fibre ``E_N`` in ``H^0(theta(2))``: 2 rows of coordinates.

    ``v`` in ``ker B(N)`` goes to ``y -> A(w(y))^t J v``; ``im A(N)`` lands in
    the relations, so the image is 2-dimensional.
    """
    from .monad import multijump_through

    multi = multijump_through(monad, n_pt)
    if multi:
        raise ValidationError(f"multi-jumping line {multi[0][0]} passes through {n_pt}")
    fld = monad.field
    if spaces is None:
        hyper = hypernet_from_monad(monad, symplectic)
        spaces = theta_section_spaces(net_at_point(hyper, n_pt))
    basis = spaces.net.basis if spaces.net.basis is not None else complement_basis(n_pt)
    fibre = kernel_of(fld, monad.B_at(n_pt.coords))
    images = []
    for v in fibre.T:
        s_hat = np.stack([fld.reduce(monad.A_at(w).T @ symplectic.J @ v) for w in basis], axis=1)
        images.append(spaces.theta2.coords(s_hat.reshape(-1)))
    images = np.stack(images)
    red, pivots, _ = rref(fld, images)
    if len(pivots) != 2:
        raise ConsistencyError(f"fibre maps onto a {len(pivots)}-dimensional space of sections")
    K = red[:2]
    if np.any(beta_system(spaces).evaluate(K[0], K[1])):
        raise ConsistencyError("beta does not vanish on the distinguished pair")
    return K


def random_kernel_pair(beta: BetaSystem, rng: np.random.Generator) -> np.ndarray:
    """A random 2-plane ``K`` with ``beta(K) = 0``: random ``s``, then ``t`` solving ``A_i(s, t) = 0``."""
    fld = beta.field
    d = beta.spaces.theta2.dim
    for _ in range(100):
        s = fld.random_array(rng, d)
        if not np.any(s):
            continue
        ker = kernel_of(fld, np.stack([fld.reduce(s @ a) for a in beta.forms]))
        t = fld.reduce(ker @ fld.random_array(rng, ker.shape[1]))
        K = np.stack([s, t])
        if rank_of(fld, K) == 2:
            return K
    raise DegenerateError("no 2-plane found in the kernel of beta")


def singularity_diagnostics(beta: BetaSystem, K: np.ndarray) -> dict:
    """Zariski tangent dimension of ``G(2, H^0(theta(2))) cap ker beta`` at ``K`` and the common kernel."""
    fld = beta.field
    K = fld.array(K)
    if np.any(beta.evaluate(K[0], K[1])):
        raise ValidationError("beta does not vanish on K")
    d, n = beta.spaces.theta2.dim, beta.spaces.net.n
    aug = np.concatenate([K, fld.eye(d)], axis=0)
    _, pivots, _ = rref(fld, aug.T)
    comp = fld.eye(d)[[p - 2 for p in pivots if p >= 2]]
    u1, u2 = K
    rows = []
    for a in beta.forms:
        rows.append(np.concatenate([fld.reduce(comp @ a @ u2), fld.reduce(u1 @ a @ comp.T)]))
    conditions = np.stack(rows)
    tangent = 2 * (d - 2) - rank_of(fld, conditions)
    common = kernel_of(fld, np.concatenate(list(beta.forms), axis=0)).shape[1]
    theta_dim = n * (n + 3) // 2
    return {
        "tangent_dim": tangent,
        "common_kernel_dim": common,
        "grassmannian_dim": 2 * (d - 2),
        "conditions": beta.r,
        "theta_moduli_dim": theta_dim,
        "projective_fibre_dim": 4,
        "total_dim": theta_dim + 4 + tangent,
    }


def fibre_section(monad, symplectic, basis: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``y -> A(w(y))^t J v`` as an ``n x 3`` array in ``H^v (x) V``."""
    fld = monad.field
    return np.stack([fld.reduce(monad.A_at(w).T @ symplectic.J @ v) for w in basis], axis=1)


def ngon_section_check(monad, symplectic, net: NetOfQuadrics, value: np.ndarray, vertices: dict) -> dict:
    """For ``value = sigma(N)`` of a section of ``E(1)``: whether the induced section of
    ``theta(2)`` lies in ``im m(y)`` at each vertex ``y``, plus the corank there."""
    from .algebra import span_contains

    fld = net.field
    s_hat = fibre_section(monad, symplectic, net.basis, value)
    out = {}
    for key, y in sorted(vertices.items()):
        yv = y.vector()
        out[key] = {
            "in_image": span_contains(fld, net.at(y.coords), fld.reduce(s_hat @ yv)),
            "corank": net.corank(y.coords),
        }
    return out


def h1_oc1_dim(net: NetOfQuadrics) -> int:
    """Dimension of ``H^1(O_C(1))``: the cokernel of ``b'``."""
    return left_kernel_of(net.field, _b_prime(net)).shape[0]

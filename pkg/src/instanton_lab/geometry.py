"""Points and lines of P^3, Pluecker coordinates, incidence and transversals."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .algebra import (
    Field,
    GradedPoly,
    PrimeField,
    kernel_of,
    left_kernel_of,
    monomials,
    rank_of,
)
from .errors import DegenerateError, FieldMismatchError, ValidationError

# order of Pluecker coordinates: p01, p02, p03, p12, p13, p23
PLUCKER_PAIRS: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _normalise(fld: Field, coords: Sequence) -> tuple:
    vals = [fld(c) for c in coords]
    for v in vals:
        if v != 0:
            inv = fld.inv(v)
            return tuple(fld(x * inv) for x in vals)
    raise ValidationError("all coordinates are zero")


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """Point of projective space, normalised so that its first nonzero coordinate is 1."""

    field: Field
    coords: tuple

    def __init__(self, fld: Field, coords: Sequence):
        object.__setattr__(self, "field", fld)
        object.__setattr__(self, "coords", _normalise(fld, coords))

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and other.field == self.field and other.coords == self.coords

    def __hash__(self):
        return hash((self.field, self.coords))

    def __lt__(self, other):
        return self.coords < other.coords

    def __len__(self):
        return len(self.coords)

    @property
    def pivot(self) -> int:
        return next(i for i, c in enumerate(self.coords) if c != 0)

    def vector(self) -> np.ndarray:
        return self.field.array(list(self.coords))

    def __repr__(self):
        return f"ProjPoint({[self.field.encode(c) for c in self.coords]})"


@dataclass(frozen=True, eq=False)
class PluckerLine:
    """Line of P^3 by normalised Pluecker coordinates (p01, p02, p03, p12, p13, p23)."""

    field: Field
    p: tuple

    def __init__(self, fld: Field, coords: Sequence):
        if len(coords) != 6:
            raise ValidationError("a Pluecker vector has 6 coordinates")
        p = _normalise(fld, coords)
        if fld(p[0] * p[5] - p[1] * p[4] + p[2] * p[3]) != 0:
            raise ValidationError(f"{p} violates the Pluecker relation")
        object.__setattr__(self, "field", fld)
        object.__setattr__(self, "p", p)

    def __eq__(self, other):
        return isinstance(other, PluckerLine) and other.field == self.field and other.p == self.p

    def __hash__(self):
        return hash((self.field, self.p))

    def __lt__(self, other):
        return self.p < other.p

    def __repr__(self):
        return f"PluckerLine({[self.field.encode(c) for c in self.p]})"

    def skew_matrix(self) -> np.ndarray:
        """The 4x4 matrix P with P[i, j] = p_ij; its nonzero columns span the line."""
        fld = self.field
        m = fld.zeros((4, 4))
        for (i, j), v in zip(PLUCKER_PAIRS, self.p):
            m[i, j] = v
            m[j, i] = fld(-v)
        return m

    def points(self) -> tuple[ProjPoint, ProjPoint]:
        """Two distinct points spanning the line."""
        fld = self.field
        cols = self.skew_matrix().T
        chosen: list[np.ndarray] = []
        for c in cols:
            if not np.any(c):
                continue
            if not chosen or rank_of(fld, np.stack(chosen + [c])) == len(chosen) + 1:
                chosen.append(c)
            if len(chosen) == 2:
                break
        return ProjPoint(fld, chosen[0].tolist()), ProjPoint(fld, chosen[1].tolist())

    def basis(self) -> np.ndarray:
        a, b = self.points()
        return np.stack([a.vector(), b.vector()])

    def contains(self, pt: ProjPoint) -> bool:
        _check_field(self.field, pt.field)
        return rank_of(self.field, np.vstack([self.basis(), pt.vector()])) == 2

    def plane_through(self, pt: ProjPoint) -> np.ndarray:
        """Linear form of the plane spanned by the line and a point off it."""
        if self.contains(pt):
            raise ValidationError(f"{pt} lies on {self}")
        ker = kernel_of(self.field, np.vstack([self.basis(), pt.vector()]))
        return ker[:, 0]


@dataclass(frozen=True)
class LineConfig:
    lines: tuple[PluckerLine, ...]
    pairwise_skew: bool

    @classmethod
    def of(cls, lines: Iterable[PluckerLine]) -> "LineConfig":
        lines = tuple(lines)
        skew = all(not meets(a, b) for a, b in itertools.combinations(lines, 2))
        return cls(lines, skew)

    def __len__(self):
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)


def _check_field(a: Field, b: Field):
    if a != b:
        raise FieldMismatchError(f"{a} vs {b}")


def plucker_of(fld: Field, a: Sequence, b: Sequence) -> tuple:
    return tuple(fld(fld(a[i]) * fld(b[j]) - fld(a[j]) * fld(b[i])) for i, j in PLUCKER_PAIRS)


def join(a: ProjPoint, b: ProjPoint) -> PluckerLine:
    _check_field(a.field, b.field)
    p = plucker_of(a.field, a.coords, b.coords)
    if all(v == 0 for v in p):
        raise ValidationError("join of equal points")
    return PluckerLine(a.field, p)


def pairing(p: Sequence, q: Sequence):
    """Polarised Pluecker form; vanishes exactly when the two lines meet."""
    return p[0] * q[5] - p[1] * q[4] + p[2] * q[3] + p[3] * q[2] - p[4] * q[1] + p[5] * q[0]


def meets(a: PluckerLine, b: PluckerLine) -> bool:
    _check_field(a.field, b.field)
    return a.field(pairing(a.p, b.p)) == 0


def line_join_meet(a, b):
    """Join of two points, or incidence test of two lines."""
    if isinstance(a, ProjPoint) and isinstance(b, ProjPoint):
        return join(a, b)
    if isinstance(a, PluckerLine) and isinstance(b, PluckerLine):
        return meets(a, b)
    raise ValidationError("line_join_meet takes two points or two lines")


def line_from_planes(fld: Field, h1: np.ndarray, h2: np.ndarray) -> PluckerLine | None:
    """Intersection line of two planes, ``None`` if the planes coincide."""
    forms = np.stack([fld.array(list(h1)), fld.array(list(h2))])
    if rank_of(fld, forms) < 2:
        return None
    ker = kernel_of(fld, forms)
    return join(ProjPoint(fld, ker[:, 0].tolist()), ProjPoint(fld, ker[:, 1].tolist()))


def transversal_through_point(n_pt: ProjPoint, l1: PluckerLine, l2: PluckerLine) -> PluckerLine | None:
    """The line through ``n_pt`` meeting ``l1`` and ``l2``, via the meet of two planes."""
    _check_field(n_pt.field, l1.field)
    _check_field(n_pt.field, l2.field)
    for ln in (l1, l2):
        if ln.contains(n_pt):
            raise ValidationError(f"{n_pt} is incident to {ln}")
    return line_from_planes(n_pt.field, l1.plane_through(n_pt), l2.plane_through(n_pt))


def quadric_through_lines(lines: Sequence[PluckerLine]) -> list[GradedPoly]:
    """Basis of the quadratic forms on P^3 vanishing on every given line."""
    fld = lines[0].field
    monos = monomials(4, 2)
    rows = []
    for ln in lines:
        a, b = ln.basis()
        for s, t in ((1, 0), (0, 1), (1, 1)):
            pt = fld.reduce(a * s + b * t)
            rows.append([_monomial_value(fld, pt, e) for e in monos])
    ker = kernel_of(fld, fld.array(rows))
    return [GradedPoly.from_vector(fld, 4, 2, ker[:, j].tolist()) for j in range(ker.shape[1])]


def _monomial_value(fld: Field, pt, exps):
    val = fld.one
    for x, k in zip(pt, exps):
        if k:
            val = fld(val * fld(x) ** k)
    return val


@dataclass(frozen=True)
class Regulus:
    """Quadric through three skew lines and a parametrisation of the transversal family.

    ``ruling_param(s, t)`` is the transversal through the point ``s*a + t*b``
    of the first line.
    """

    quadric: GradedPoly
    lines: tuple[PluckerLine, PluckerLine, PluckerLine]
    plucker_forms: tuple[GradedPoly, ...]  # six binary quadratic forms in (s, t)

    def ruling_param(self, s, t) -> PluckerLine:
        fld = self.quadric.field
        return PluckerLine(fld, [f.eval((s, t)) for f in self.plucker_forms])

    __call__ = ruling_param


def _linear_binary(fld: Field, vec_s: np.ndarray, vec_t: np.ndarray) -> list[GradedPoly]:
    return [GradedPoly.from_terms(fld, 2, {(1, 0): vec_s[i], (0, 1): vec_t[i]}, degree=1) for i in range(len(vec_s))]


def regulus_through_three(l1: PluckerLine, l2: PluckerLine, l3: PluckerLine) -> Regulus:
    fld = l1.field
    for a, b in itertools.combinations((l1, l2, l3), 2):
        _check_field(a.field, b.field)
        if meets(a, b):
            raise ValidationError("lines are not pairwise skew")
    quads = quadric_through_lines([l1, l2, l3])
    if len(quads) != 1:
        raise DegenerateError(f"expected a unique quadric, found a {len(quads)}-dimensional family")
    # P(s,t) = s*a + t*b on l1; Q(s,t) = l2 meet plane(P, l3), linear in (s,t)
    a, b = l1.basis()
    c, d = l3.basis()
    e, f = l2.basis()
    P = _linear_binary(fld, a, b)

    def plane_coeffs(pt_vec):
        # plane through pt, c, d: cofactors of the 3x4 matrix [pt; c; d]
        m = np.stack([pt_vec, c, d]).astype(object)
        out = []
        for k in range(4):
            cols = [j for j in range(4) if j != k]
            sub = m[:, cols]
            det = (sub[0, 0] * (sub[1, 1] * sub[2, 2] - sub[1, 2] * sub[2, 1])
                   - sub[0, 1] * (sub[1, 0] * sub[2, 2] - sub[1, 2] * sub[2, 0])
                   + sub[0, 2] * (sub[1, 0] * sub[2, 1] - sub[1, 1] * sub[2, 0]))
            out.append(fld(det * (-1) ** k))
        return out

    pi_a, pi_b = plane_coeffs(a), plane_coeffs(b)  # plane(P) = s*pi_a + t*pi_b
    pi = [GradedPoly.from_terms(fld, 2, {(1, 0): pi_a[k], (0, 1): pi_b[k]}, degree=1) for k in range(4)]

    def dot(form, vec):
        acc = GradedPoly.zero(fld, 2, 1)
        for k in range(4):
            acc = acc + form[k] * fld(vec[k])
        return acc

    u, v = dot(pi, f), -dot(pi, e)  # point u*e + v*f of l2 lies on plane(P)
    Q = [u * fld(e[k]) + v * fld(f[k]) for k in range(4)]
    forms = tuple(P[i] * Q[j] - P[j] * Q[i] for i, j in PLUCKER_PAIRS)
    return Regulus(quads[0], (l1, l2, l3), forms)


@dataclass(frozen=True)
class TransversalResult:
    lines: tuple[PluckerLine, ...] | None  # None means infinitely many
    double_root: bool = False

    @property
    def infinite(self) -> bool:
        return self.lines is None


def _binary_quadratic_roots(fld: Field, f: GradedPoly) -> tuple[list[tuple], bool]:
    """Rational roots in P^1 of a binary quadratic form and whether a root is double."""
    al, be, ga = (f.coeff((2, 0)), f.coeff((1, 1)), f.coeff((0, 2)))
    disc = fld(be * be - 4 * al * ga)
    if al == 0:
        # f = t*(be*s + ga*t)
        roots = [(1, 0)]
        if be != 0:
            roots.append((fld(-ga), be))
        return _dedupe(fld, roots), disc == 0
    r = fld.sqrt(disc)
    if r is None:
        return [], False
    inv2a = fld.inv(fld(2 * al))
    roots = [(fld((-be + r) * inv2a), 1), (fld((-be - r) * inv2a), 1)]
    return _dedupe(fld, roots), disc == 0


def _dedupe(fld, roots):
    out = []
    for r in roots:
        pt = _normalise(fld, r)
        if pt not in out:
            out.append(pt)
    return out


def transversals_to_four(l1: PluckerLine, l2: PluckerLine, l3: PluckerLine, l4: PluckerLine) -> TransversalResult:
    """Lines meeting all four inputs: roots of the pairing of l4 with the regulus of l1, l2, l3."""
    reg = regulus_through_three(l1, l2, l3)
    fld = l1.field
    acc = GradedPoly.zero(fld, 2, 2)
    q = l4.p
    signs = (q[5], -q[4], q[3], q[2], -q[1], q[0])
    for form, coeff in zip(reg.plucker_forms, signs):
        acc = acc + form * fld(coeff)
    if acc.is_zero():
        return TransversalResult(None)
    roots, double = _binary_quadratic_roots(fld, acc)
    lines = tuple(sorted({reg.ruling_param(*r) for r in roots}))
    return TransversalResult(lines, double)


def secancy_profile(line: PluckerLine, config: LineConfig | Sequence[PluckerLine]) -> int:
    """Number of members of ``config`` incident to ``line``."""
    members = config.lines if isinstance(config, LineConfig) else tuple(config)
    if line in members:
        raise ValidationError(f"{line} is a member of the configuration")
    return sum(meets(line, m) for m in members)


# --------------------------------------------------------------------------
# lines through a point and the plane Y


def complement_basis(n_pt: ProjPoint) -> np.ndarray:
    """Standard basis vectors complementary to the pivot of ``n_pt`` (rows w0, w1, w2)."""
    fld = n_pt.field
    eye = fld.eye(4)
    return np.stack([eye[j] for j in range(4) if j != n_pt.pivot])


def y_point_of_line(n_pt: ProjPoint, line: PluckerLine) -> ProjPoint:
    """Coordinates in Y = P(V4/<N>) of a line through ``n_pt``, for the complement basis."""
    fld = n_pt.field
    if not line.contains(n_pt):
        raise ValidationError(f"{line} does not pass through {n_pt}")
    piv = n_pt.pivot
    nv = n_pt.vector()
    for q in line.basis():
        r = fld.reduce(q - nv * fld(q[piv] * fld.inv(nv[piv])))
        if np.any(r):
            return ProjPoint(fld, [r[j] for j in range(4) if j != piv])
    raise DegenerateError("line collapsed onto the point")


def line_of_y_point(n_pt: ProjPoint, y: Sequence) -> PluckerLine:
    fld = n_pt.field
    w = fld.reduce(fld.array(list(y)) @ complement_basis(n_pt))
    return join(n_pt, ProjPoint(fld, w.tolist()))


def projected_line(n_pt: ProjPoint, line: PluckerLine) -> np.ndarray:
    """Linear form on Y of the image of ``line`` under projection from ``n_pt``."""
    fld = n_pt.field
    pts = np.stack([y_point_of_line(n_pt, join(n_pt, q)).vector() for q in line.points()])
    return left_kernel_of(fld, pts.T)[0]


def ngon_vertices(config: LineConfig | Sequence[PluckerLine], n_pt: ProjPoint) -> dict[tuple[int, int], ProjPoint]:
    """Projections from ``n_pt`` of the transversals through it to each pair of lines.

    Keys are the index pairs ``(i, j)``, ``i < j``.
    """
    lines = config.lines if isinstance(config, LineConfig) else tuple(config)
    for ln in lines:
        if ln.contains(n_pt):
            raise ValidationError(f"{n_pt} lies on {ln}")
    fld = n_pt.field
    out = {}
    missing = []
    proj = [projected_line(n_pt, ln) for ln in lines]
    for i, j in itertools.combinations(range(len(lines)), 2):
        tr = transversal_through_point(n_pt, lines[i], lines[j])
        if tr is None:
            missing.append((i, j))
            continue
        y = y_point_of_line(n_pt, tr)
        yv = y.vector()
        for k in (i, j):
            if fld(np.dot(proj[k], yv)) != 0:
                raise DegenerateError(f"vertex {(i, j)} is off the projection of line {k}")
        out[(i, j)] = y
    if missing:
        raise DegenerateError(f"no transversal through the point for pairs {missing}")
    return out


# --------------------------------------------------------------------------
# enumeration over F_p


def enumerate_points(fld: PrimeField) -> Iterator[ProjPoint]:
    from .algebra import projective_points

    for c in projective_points(fld, 3):
        yield ProjPoint(fld, c)


def enumerate_lines(fld: PrimeField) -> list[PluckerLine]:
    """Every F_p-line of P^3, from reduced row echelon 2x4 matrices, in Pluecker order."""
    p = fld.p
    out = []
    for i, j in itertools.combinations(range(4), 2):
        free0 = [c for c in range(i + 1, 4) if c != j]
        free1 = [c for c in range(j + 1, 4)]
        for vals0 in itertools.product(range(p), repeat=len(free0)):
            for vals1 in itertools.product(range(p), repeat=len(free1)):
                r0 = [0] * 4
                r1 = [0] * 4
                r0[i] = 1
                r1[j] = 1
                for c, v in zip(free0, vals0):
                    r0[c] = v
                for c, v in zip(free1, vals1):
                    r1[c] = v
                out.append(PluckerLine(fld, plucker_of(fld, r0, r1)))
    out.sort()
    return out


def enumerate_planes(fld: PrimeField) -> Iterator[np.ndarray]:
    for pt in enumerate_points(fld):
        yield pt.vector()


def lines_in_plane(fld: PrimeField, plane: np.ndarray) -> list[PluckerLine]:
    """Lines contained in the plane with the given linear form (its beta-plane)."""
    from .algebra import projective_points

    basis = kernel_of(fld, fld.array([list(plane)])).T  # 3 x 4, rows span the plane
    out = []
    for form in projective_points(fld, 2):
        two = kernel_of(fld, fld.array([list(form)])).T  # 2 x 3
        pts = fld.reduce(two @ basis)
        out.append(join(ProjPoint(fld, pts[0].tolist()), ProjPoint(fld, pts[1].tolist())))
    return sorted(out)


def lines_through_point(n_pt: ProjPoint) -> list[PluckerLine]:
    from .algebra import projective_points

    return sorted(line_of_y_point(n_pt, y) for y in projective_points(n_pt.field, 2))


def count_lines(p: int) -> int:
    return (p * p + 1) * (p * p + p + 1)


Parametrisation = Callable[[object, object], PluckerLine]

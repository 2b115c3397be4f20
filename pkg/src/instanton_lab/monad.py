"""Instanton bundles presented by monads O(-1)^n -A-> O^(2n+2) -B-> O(1)^n.

A monad stores ``A`` and ``B`` as four constant matrices each, the
coefficients of ``x0..x3``.  Everything cohomological reduces to kernels of
explicit section matrices:

* on a line ``L`` spanned by points ``a, b`` the map
  ``H^0(W(j)|_L) -> H^0(O_L(j+1)^n)`` induced by ``B`` has a kernel of
  dimension ``h^0(E|_L(j)) + n*j``;
* on P^3 the same holds with ``n * dim S_{j-1}`` in place of ``n*j``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .algebra import (
    Field,
    PrimeField,
    field_from_json,
    field_to_json,
    batch_rank,
    kernel_of,
    point_array,
    left_kernel_of,
    monomials,
    projective_points,
    rank_of,
)
from .errors import DegenerateError, ValidationError
from .geometry import (
    LineConfig,
    PluckerLine,
    ProjPoint,
    complement_basis,
    enumerate_lines,
    join,
)

__all__ = [
    "InstantonMonad",
    "SymplecticStructure",
    "LineRestriction",
    "validate_monad",
    "special_thooft_monad",
    "find_symplectic",
    "restrict_to_line",
    "restricted_h0",
    "jumping_order",
    "multijump_scan",
    "global_h0",
    "batch_line_h0",
    "multijump_through",
    "connecting_matrix",
    "thooft_configuration",
    "plane_h0",
    "plane_profiles",
    "PlaneProfile",
    "UNDECIDED",
]

UNDECIDED = "0-or-1"
_QUAD_MONOS = [(k, l) for k in range(4) for l in range(k, 4)]


@dataclass(frozen=True, eq=False)
class InstantonMonad:
    n: int
    field: Field
    A: tuple  # four (2n+2) x n coefficient matrices
    B: tuple  # four n x (2n+2) coefficient matrices

    @property
    def rank_w(self) -> int:
        return 2 * self.n + 2

    def A_at(self, x: Sequence) -> np.ndarray:
        fld = self.field
        return fld.reduce(sum(self.A[k] * fld(x[k]) for k in range(4)))

    def B_at(self, x: Sequence) -> np.ndarray:
        fld = self.field
        return fld.reduce(sum(self.B[k] * fld(x[k]) for k in range(4)))

    def to_json(self) -> dict:
        enc = self.field.encode
        return {
            "n": self.n,
            "field": field_to_json(self.field),
            "A": [[[enc(v) for v in row] for row in m.tolist()] for m in self.A],
            "B": [[[enc(v) for v in row] for row in m.tolist()] for m in self.B],
        }

    @classmethod
    def from_json(cls, obj: dict, scan_p: int | None = None) -> "InstantonMonad":
        fld = field_from_json(obj.get("field", "Q"))
        return validate_monad(obj["A"], obj["B"], fld, scan_p=scan_p, n=obj.get("n"))

    def transformed(self, g: np.ndarray) -> "InstantonMonad":
        """Pull back along ``x -> g @ x`` (a projective transformation of P^3)."""
        fld = self.field
        g = fld.array(g)
        a = tuple(fld.reduce(sum(self.A[i] * g[i, k] for i in range(4))) for k in range(4))
        b = tuple(fld.reduce(sum(self.B[i] * g[i, k] for i in range(4))) for k in range(4))
        return InstantonMonad(self.n, fld, a, b)


def _quadratic_coeff(left: Sequence[np.ndarray], right: Sequence[np.ndarray], k: int, l: int) -> np.ndarray:
    if k == l:
        return left[k] @ right[k]
    return left[k] @ right[l] + left[l] @ right[k]


def _mono_name(k: int, l: int) -> str:
    return f"x{k}^2" if k == l else f"x{k}x{l}"


def validate_monad(A, B, fld: Field, scan_p: int | None = None, n: int | None = None) -> InstantonMonad:
    """Check ``B A == 0`` coefficientwise and the fibrewise rank conditions.

    Rank conditions are checked at every point of P^3 over ``F_scan_p``.
    Over a prime field ``scan_p`` defaults to (and must equal) its
    characteristic; over the rationals the entries are reduced mod ``scan_p``.
    """
    A = tuple(fld.array(m) for m in A)
    B = tuple(fld.array(m) for m in B)
    if len(A) != 4 or len(B) != 4:
        raise ValidationError("A and B need one coefficient matrix per variable x0..x3")
    shapes_a = {m.shape for m in A}
    shapes_b = {m.shape for m in B}
    if len(shapes_a) != 1 or len(shapes_b) != 1:
        raise ValidationError("coefficient matrices of inconsistent shapes")
    (ra, ca), (rb, cb) = shapes_a.pop(), shapes_b.pop()
    if n is None:
        n = ca
    if (ra, ca, rb, cb) != (2 * n + 2, n, n, 2 * n + 2):
        raise ValidationError(f"shapes A {ra}x{ca}, B {rb}x{cb} do not fit a charge-{n} monad")
    for k, l in _QUAD_MONOS:
        c = fld.reduce(_quadratic_coeff(B, A, k, l))
        if np.any(c):
            i, j = map(int, np.argwhere(c != 0)[0])
            raise ValidationError(f"BA != 0 at coefficient ({i + 1},{j + 1}) of {_mono_name(k, l)}")
    if isinstance(fld, PrimeField):
        if scan_p is not None and int(scan_p) != fld.p:
            raise ValidationError(f"cannot scan a monad over {fld} at p={scan_p}")
        scan = fld
        As, Bs = A, B
    else:
        if scan_p is None:
            raise ValidationError("a rational monad needs an explicit scan prime")
        from .algebra import GF

        scan = GF(int(scan_p))
        As = tuple(scan.array(m) for m in A)
        Bs = tuple(scan.array(m) for m in B)
    _scan_ranks(scan, As, Bs, n)
    return InstantonMonad(n, fld, A, B)


def _scan_ranks(fld: PrimeField, A, B, n: int, chunk: int = 20000):
    pts = point_array(fld, 3)
    bad = {"A": None, "B": None}
    drops = {"A": 0, "B": 0}
    for start in range(0, len(pts), chunk):
        x = pts[start : start + chunk]
        for name, mats in (("A", A), ("B", B)):
            stack = np.stack([np.asarray(m, dtype=np.int64) for m in mats])
            vals = np.einsum("nk,kij->nij", x, stack) % fld.p
            low = np.nonzero(batch_rank(fld, vals) < n)[0]
            drops[name] += len(low)
            if len(low) and bad[name] is None:
                bad[name] = tuple(int(v) for v in x[low[0]])
    for name in ("A", "B"):
        if drops[name] == len(pts):
            raise ValidationError(f"{name} drops rank at every point")
        if drops[name]:
            raise ValidationError(f"{name} drops rank at point {bad[name]}")


def _pencil(fld: Field, n: int, on_diag: int, off_diag: int, lower: bool) -> list[np.ndarray]:
    """Coefficient matrices of C(u, v) (n x (n+1)) or D(u, v) ((n+1) x n) for variables u, v."""
    mats = [fld.zeros((n + 1, n) if lower else (n, n + 1)) for _ in range(4)]
    for i in range(n):
        if lower:
            # D(u, v): v on the diagonal, u on the subdiagonal
            mats[off_diag][i, i] = fld.one
            mats[on_diag][i + 1, i] = fld.one
        else:
            # C(u, v): u on the diagonal, v on the superdiagonal
            mats[on_diag][i, i] = fld.one
            mats[off_diag][i, i + 1] = fld.one
    return mats


def special_thooft_monad(n: int, fld: Field, validate: bool = True) -> InstantonMonad:
    """``B = [C(x0,x1) | C(x2,x3)]`` and ``A = [D(x2,x3) ; -D(x0,x1)]``.

    ``C(a,b) D(c,d)`` is tridiagonal with entries ``(ac, ad+bc, bd)``, which
    is symmetric under ``(a,b) <-> (c,d)``, so ``B A`` vanishes identically.
    """
    if n < 1:
        raise ValidationError("charge must be at least 1")
    c01 = _pencil(fld, n, 0, 1, lower=False)
    c23 = _pencil(fld, n, 2, 3, lower=False)
    d23 = _pencil(fld, n, 2, 3, lower=True)
    d01 = _pencil(fld, n, 0, 1, lower=True)
    B = [np.concatenate([c01[k], c23[k]], axis=1) for k in range(4)]
    A = [fld.reduce(np.concatenate([d23[k], -d01[k]], axis=0)) for k in range(4)]
    if validate and isinstance(fld, PrimeField):
        return validate_monad(A, B, fld)
    return InstantonMonad(n, fld, tuple(A), tuple(B))


# --------------------------------------------------------------------------
# self-duality


@dataclass(frozen=True, eq=False)
class SymplecticStructure:
    """Antisymmetric invertible ``J`` with ``A^t J = G B``; hence ``A^t J A == 0``."""

    J: np.ndarray
    G: np.ndarray
    solution_dim: int

    def omega(self, u: np.ndarray, v: np.ndarray):
        return u @ self.J @ v


def symplectic_space(monad: InstantonMonad) -> list[tuple[np.ndarray, np.ndarray]]:
    """Basis of pairs ``(J, G)``, ``J`` antisymmetric, with ``A_k^t J = G B_k`` for all k."""
    fld, n, m = monad.field, monad.n, monad.rank_w
    j_params = list(itertools.combinations(range(m), 2))
    g_params = [(i, j) for i in range(n) for j in range(n)]
    cols = []
    for a, b in j_params:
        J = fld.zeros((m, m))
        J[a, b], J[b, a] = fld.one, fld(-1)
        cols.append(np.concatenate([fld.reduce(monad.A[k].T @ J).ravel() for k in range(4)]))
    for i, j in g_params:
        G = fld.zeros((n, n))
        G[i, j] = fld.one
        cols.append(np.concatenate([fld.reduce(-(G @ monad.B[k])).ravel() for k in range(4)]))
    system = np.stack(cols, axis=1)
    ker = kernel_of(fld, system)
    out = []
    for c in ker.T:
        J = fld.zeros((m, m))
        for val, (a, b) in zip(c[: len(j_params)], j_params):
            J[a, b], J[b, a] = val, fld(-val)
        G = c[len(j_params):].reshape(n, n)
        out.append((J, G))
    return out


def find_symplectic(monad: InstantonMonad, seed: int = 0, trials: int = 100) -> SymplecticStructure | None:
    """Search the solution space for an invertible ``J`` (deterministic pseudo-random combinations)."""
    from .algebra import det_of

    fld = monad.field
    basis = symplectic_space(monad)
    if not basis:
        return None
    candidates = [basis[0]] if len(basis) == 1 else []
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        coeffs = fld.random_array(rng, len(basis))
        candidates.append(
            (
                fld.reduce(sum(c * J for c, (J, _) in zip(coeffs, basis))),
                fld.reduce(sum(c * G for c, (_, G) in zip(coeffs, basis))),
            )
        )
    for J, G in candidates:
        if det_of(fld, J) != 0:
            for k, l in _QUAD_MONOS:
                if np.any(fld.reduce(_quadratic_coeff([a.T for a in monad.A], [J @ a for a in monad.A], k, l))):
                    raise DegenerateError("solved J fails A^t J A == 0")
            return SymplecticStructure(J, G, len(basis))
    return None


# --------------------------------------------------------------------------
# lines


@dataclass(frozen=True, eq=False)
class LineRestriction:
    line: PluckerLine
    a: ProjPoint
    b: ProjPoint
    A_L: tuple[np.ndarray, np.ndarray]  # A(a), A(b): A|_L = s A(a) + t A(b)
    B_L: tuple[np.ndarray, np.ndarray]


def restrict_to_line(monad: InstantonMonad, line: PluckerLine) -> LineRestriction:
    a, b = line.points()
    return LineRestriction(
        line,
        a,
        b,
        (monad.A_at(a.coords), monad.A_at(b.coords)),
        (monad.B_at(a.coords), monad.B_at(b.coords)),
    )


def line_section_matrix(monad: InstantonMonad, restriction: LineRestriction, j: int) -> np.ndarray:
    """Matrix of ``H^0(W(j)|_L) -> H^0(O_L(j+1)^n)``, shape ``n(j+2) x (2n+2)(j+1)``."""
    fld, n, m = monad.field, monad.n, monad.rank_w
    ba, bb = restriction.B_L
    out = fld.zeros((n * (j + 2), m * (j + 1)))
    for i in range(j + 1):
        # v_i s^(j-i) t^i  maps to  B(a) v_i s^(j-i+1) t^i + B(b) v_i s^(j-i) t^(i+1)
        out[i * n : (i + 1) * n, i * m : (i + 1) * m] = ba
        out[(i + 1) * n : (i + 2) * n, i * m : (i + 1) * m] = bb
    return out


def restricted_h0(monad: InstantonMonad, line: PluckerLine | LineRestriction, j: int = 0) -> int:
    """``h^0(E|_L(j))`` for ``j >= 0``."""
    if j < 0:
        raise ValidationError("twist must be non-negative")
    res = line if isinstance(line, LineRestriction) else restrict_to_line(monad, line)
    mat = line_section_matrix(monad, res, j)
    return mat.shape[1] - rank_of(monad.field, mat) - monad.n * j


def connecting_matrix(monad: InstantonMonad, n_pt: Sequence, w: Sequence) -> np.ndarray:
    """``B(w) A(N)``: the map ``H^1(O_L(-2)^n) -> H^1(K(-1))`` on the line through N and w.

    Its corank is ``h^1(E|_L(-1))``, the jumping order; computed without ``J``.
    """
    fld = monad.field
    return fld.reduce(monad.B_at(w) @ monad.A_at(n_pt))


def jumping_order(monad: InstantonMonad, line: PluckerLine, symplectic: SymplecticStructure | None = None):
    """Order ``a`` of ``E|_L = O(a) + O(-a)``; ``"0-or-1"`` when undecidable without ``J``."""
    h0 = restricted_h0(monad, line, 0)
    if h0 >= 3:
        return h0 - 1
    if symplectic is None:
        return UNDECIDED
    from .net import hypernet_from_monad, net_at_point
    from .geometry import y_point_of_line

    n_pt = line.points()[0]
    net = net_at_point(hypernet_from_monad(monad, symplectic), n_pt)
    return net.corank(y_point_of_line(n_pt, line).coords)


def batch_line_h0(monad: InstantonMonad, a_pts: np.ndarray, b_pts: np.ndarray) -> np.ndarray:
    """``h^0(E|_L)`` for the lines through rows of ``a_pts`` and ``b_pts`` (batched ``j = 0``)."""
    fld = monad.field
    stack = np.stack([np.asarray(m, dtype=np.int64) for m in monad.B])
    ba = np.einsum("nk,kij->nij", np.asarray(a_pts, dtype=np.int64), stack) % fld.p
    bb = np.einsum("nk,kij->nij", np.asarray(b_pts, dtype=np.int64), stack) % fld.p
    return monad.rank_w - batch_rank(fld, np.concatenate([ba, bb], axis=1))


def _scan_chunk(args):
    monad, lines = args
    if not lines:
        return []
    pts = [ln.basis() for ln in lines]
    h0 = batch_line_h0(monad, np.stack([p[0] for p in pts]), np.stack([p[1] for p in pts]))
    return [(ln, int(h) - 1) for ln, h in zip(lines, h0) if h >= 3]


def multijump_scan(monad: InstantonMonad, p: int | None = None, jobs: int = 1) -> list[tuple[PluckerLine, int]]:
    """Every F_p-line with ``h^0(E|_L) >= 3`` and its order, in Pluecker order."""
    fld = monad.field
    if not isinstance(fld, PrimeField) or fld.dtype is object or (p is not None and p != fld.p):
        raise ValidationError("scan needs a monad over the prime field being scanned")
    lines = enumerate_lines(fld)
    if jobs <= 1:
        found = _scan_chunk((monad, lines))
    else:
        size = -(-len(lines) // (jobs * 4))
        chunks = [(monad, lines[i : i + size]) for i in range(0, len(lines), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            found = [item for part in pool.map(_scan_chunk, chunks) for item in part]
    return sorted(found, key=lambda item: item[0].p)


def multijump_through(monad: InstantonMonad, n_pt: ProjPoint) -> list[tuple[PluckerLine, int]]:
    """F_p-lines through ``n_pt`` with ``h^0(E|_L) >= 3``."""
    fld = monad.field
    others = fld.reduce(point_array(fld, 2) @ complement_basis(n_pt))
    base = np.tile(n_pt.vector(), (len(others), 1))
    h0 = batch_line_h0(monad, base, others)
    return [(join(n_pt, ProjPoint(fld, w.tolist())), int(h) - 1) for w, h in zip(others, h0) if h >= 3]


# --------------------------------------------------------------------------
# global sections on P^3


def global_section_matrix(monad: InstantonMonad, j: int) -> np.ndarray:
    """Matrix of ``W (x) S_j -> O(j+1)^n`` on global sections; columns indexed (monomial, w-basis)."""
    fld, n, m = monad.field, monad.n, monad.rank_w
    src = monomials(4, j)
    tgt = {mono: i for i, mono in enumerate(monomials(4, j + 1))}
    out = fld.zeros((n * len(tgt), m * len(src)))
    for si, mono in enumerate(src):
        for k in range(4):
            up = list(mono)
            up[k] += 1
            ti = tgt[tuple(up)]
            block = out[ti * n : (ti + 1) * n, si * m : (si + 1) * m]
            out[ti * n : (ti + 1) * n, si * m : (si + 1) * m] = fld.reduce(block + monad.B[k])
    return out


def section_value(monad: InstantonMonad, section: np.ndarray, j: int, x: Sequence) -> np.ndarray:
    """Value in ``W`` at ``x`` of a section given on the basis of :func:`global_section_matrix`."""
    fld, m = monad.field, monad.rank_w
    acc = fld.zeros(m)
    for si, mono in enumerate(monomials(4, j)):
        c = fld.one
        for xv, e in zip(x, mono):
            if e:
                c = fld(c * fld(xv) ** e)
        acc = fld.reduce(acc + section[si * m : (si + 1) * m] * c)
    return acc


def _value_conditions(monad: InstantonMonad, j: int, n_pt: Sequence) -> np.ndarray:
    """Rows forcing the value at ``n_pt`` into ``im A(N)``."""
    fld, m = monad.field, monad.rank_w
    ann = left_kernel_of(fld, monad.A_at(n_pt))  # rows annihilating im A(N)
    evals = fld.zeros((m, m * len(monomials(4, j))))
    for si, mono in enumerate(monomials(4, j)):
        c = fld.one
        for xv, e in zip(n_pt, mono):
            if e:
                c = fld(c * fld(xv) ** e)
        evals[:, si * m : (si + 1) * m] = fld.reduce(fld.eye(m) * c)
    return fld.reduce(ann @ evals)


def global_sections(monad: InstantonMonad, j: int, through: ProjPoint | Sequence | None = None) -> np.ndarray:
    """Kernel basis (columns) of the global section matrix, optionally vanishing at a point."""
    mat = global_section_matrix(monad, j)
    if through is not None:
        pt = through.coords if isinstance(through, ProjPoint) else tuple(through)
        mat = np.concatenate([mat, _value_conditions(monad, j, pt)], axis=0)
    return kernel_of(monad.field, mat)


def global_h0(monad: InstantonMonad, j: int, through: ProjPoint | Sequence | None = None) -> int:
    """``h^0(E(j))``, or ``h^0(I_N E(j))`` when ``through`` is given."""
    if j < 0:
        raise ValidationError("twist must be non-negative")
    ker = global_sections(monad, j, through)
    return ker.shape[1] - monad.n * comb(j + 2, 3)


def vanishes_at(monad: InstantonMonad, section: np.ndarray, j: int, x: Sequence) -> bool:
    """Whether the section's value at ``x`` is zero in the fibre ``ker B(x) / im A(x)``."""
    fld = monad.field
    val = section_value(monad, section, j, x)
    ann = left_kernel_of(fld, monad.A_at(x))
    return not np.any(fld.reduce(ann @ val))


def section_zero_lines(monad: InstantonMonad, section: np.ndarray, j: int = 1) -> list[PluckerLine] | None:
    """F_p-lines making up the zero set of a section, or ``None`` if the zero set is not a union of lines."""
    fld = monad.field
    zeros = {pt for pt in projective_points(fld, 3) if vanishes_at(monad, section, j, pt)}
    pts = sorted(zeros)
    lines: set[PluckerLine] = set()
    covered: set = set()
    for a, b in itertools.combinations(pts, 2):
        if a in covered and b in covered:
            continue
        ln = join(ProjPoint(fld, a), ProjPoint(fld, b))
        on = _points_on_line(ln)
        if on <= zeros:
            lines.add(ln)
            covered |= on
    if covered != zeros:
        return None
    return sorted(lines)


def _points_on_line(line: PluckerLine) -> set:
    fld = line.field
    a, b = line.basis()
    out = set()
    for s, t in projective_points(fld, 1):
        out.add(ProjPoint(fld, fld.reduce(a * s + b * t).tolist()).coords)
    return out


def thooft_configuration(monad: InstantonMonad) -> tuple[np.ndarray, LineConfig]:
    """A section of ``E(1)`` whose zero set is ``n+1`` pairwise skew F_p-lines.

    Searches the F_p-points of ``P(H^0(E(1)))``.
    """
    fld = monad.field
    if not isinstance(fld, PrimeField):
        raise ValidationError("section search needs a prime field")
    ker = global_sections(monad, 1)
    if ker.shape[1] == 0:
        raise DegenerateError("h^0(E(1)) = 0: not a t'Hooft bundle")
    for coeffs in projective_points(fld, ker.shape[1] - 1):
        sec = fld.reduce(ker @ fld.array(list(coeffs)))
        lines = section_zero_lines(monad, sec, 1)
        if lines is None or len(lines) != monad.n + 1:
            continue
        cfg = LineConfig.of(lines)
        if cfg.pairwise_skew:
            return sec, cfg
    raise DegenerateError(f"no section of E(1) over {fld} vanishes on {monad.n + 1} rational skew lines")


# --------------------------------------------------------------------------
# planes


def plane_h0(monad: InstantonMonad, plane: np.ndarray) -> int:
    """``h^0(E|_H) = dim {v : B(x) v = 0 for x in H}``; zero iff ``E|_H`` is stable."""
    fld = monad.field
    span = kernel_of(fld, fld.array([list(plane)])).T
    return kernel_of(fld, np.concatenate([monad.B_at(x) for x in span], axis=0)).shape[1]


@dataclass(frozen=True)
class PlaneProfile:
    plane: tuple
    stable: bool
    multijump: int  # F_p-lines of order >= 2 in the plane
    order3: int  # of order >= 3
    max_order: int

    def to_json(self) -> dict:
        return {
            "plane": list(self.plane),
            "stable": self.stable,
            "multijump": self.multijump,
            "order_ge_3": self.order3,
            "max_order": self.max_order,
        }


def plane_profiles(monad: InstantonMonad, scan: list[tuple[PluckerLine, int]] | None = None) -> list[PlaneProfile]:
    """Stability and multi-jumping counts for the lines in every F_p-plane."""
    from .geometry import enumerate_planes, lines_in_plane

    fld = monad.field
    orders = dict(scan if scan is not None else multijump_scan(monad))
    out = []
    for plane in enumerate_planes(fld):
        found = [orders[ln] for ln in lines_in_plane(fld, plane) if ln in orders]
        out.append(
            PlaneProfile(
                tuple(int(v) for v in plane),
                plane_h0(monad, plane) == 0,
                len(found),
                sum(o >= 3 for o in found),
                max(found, default=0),
            )
        )
    return out

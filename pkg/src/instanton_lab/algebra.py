"""Exact arithmetic: prime fields, rationals, dense matrices and graded polynomials.

Matrices over a prime field are numpy ``int64`` arrays holding least
non-negative residues; matrices over the rationals are numpy ``object``
arrays of :class:`fractions.Fraction`.  A single elimination routine serves
both, parametrised by the field's ``reduce`` and ``inv``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import FieldMismatchError, InhomogeneousError, ValidationError

__all__ = [
    "Field",
    "PrimeField",
    "RationalField",
    "GF",
    "QQ",
    "FieldElem",
    "ExactMatrix",
    "Reduction",
    "Solution",
    "mat_reduce",
    "linear_solve",
    "GradedPoly",
    "poly_arith",
    "rref",
    "rank_of",
    "kernel_of",
    "left_kernel_of",
    "solve_of",
    "det_of",
    "batch_rank",
    "point_array",
    "monomials",
]


# --------------------------------------------------------------------------
# fields


class Field:
    """Base class; concrete fields are :class:`PrimeField` and :class:`RationalField`."""

    dtype: object

    def __call__(self, x):
        raise NotImplementedError

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def array(self, data) -> np.ndarray:
        arr = np.array(data, dtype=object)
        flat = [self(x) for x in arr.ravel()]
        return np.array(flat, dtype=self.dtype).reshape(arr.shape)

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(self.zero)
            return out
        return np.zeros(shape, dtype=self.dtype)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out


class PrimeField(Field):
    # int64 while a length-2^11 dot product of residues cannot overflow
    INT64_LIMIT = 2**26

    def __init__(self, p: int):
        p = int(p)
        if p < 3 or p % 2 == 0 or any(p % d == 0 for d in range(3, int(p**0.5) + 1, 2)):
            raise ValidationError(f"{p} is not an odd prime")
        if p >= 2**31:
            raise ValidationError("primes must be below 2^31")
        self.p = p
        self.dtype = np.int64 if p < self.INT64_LIMIT else object

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __reduce__(self):
        return (GF, (self.p,))

    def __call__(self, x):
        if isinstance(x, FieldElem):
            if x.field != self:
                raise FieldMismatchError(f"element of {x.field} used over {self}")
            return x.value
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        if isinstance(x, str):
            return self(Fraction(x))
        return int(x) % self.p

    def reduce(self, arr):
        return arr % self.p

    def inv(self, a):
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("division by zero in " + repr(self))
        return pow(a, -1, self.p)

    def random_array(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.p, size=shape, dtype=np.int64).astype(self.dtype)

    def elements(self) -> range:
        return range(self.p)

    def encode(self, a):
        return int(a)

    def sqrt(self, a) -> int | None:
        a = int(a) % self.p
        if a == 0:
            return 0
        if pow(a, (self.p - 1) // 2, self.p) != 1:
            return None
        from sympy.ntheory import sqrt_mod

        return int(sqrt_mod(a, self.p))


class RationalField(Field):
    dtype = object

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __reduce__(self):
        return (RationalField, ())

    def __call__(self, x):
        if isinstance(x, FieldElem):
            if x.field != self:
                raise FieldMismatchError(f"element of {x.field} used over {self}")
            return x.value
        if isinstance(x, (np.integer,)):
            x = int(x)
        return Fraction(x)

    def reduce(self, arr):
        return arr

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("division by zero in QQ")
        return 1 / Fraction(a)

    def random_array(self, rng: np.random.Generator, shape) -> np.ndarray:
        ints = rng.integers(-9, 10, size=shape)
        return self.array(ints)

    def encode(self, a):
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def sqrt(self, a) -> Fraction | None:
        from math import isqrt

        a = Fraction(a)
        if a < 0:
            return None
        rn, rd = isqrt(a.numerator), isqrt(a.denominator)
        if rn * rn == a.numerator and rd * rd == a.denominator:
            return Fraction(rn, rd)
        return None


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


QQ = RationalField()


def field_from_json(obj) -> Field:
    if obj == "Q" or obj == "QQ":
        return QQ
    if isinstance(obj, Mapping) and "p" in obj:
        return GF(int(obj["p"]))
    raise ValidationError(f"unrecognised field descriptor {obj!r}")


def field_to_json(fld: Field):
    return {"p": fld.p} if isinstance(fld, PrimeField) else "Q"


@dataclass(frozen=True)
class FieldElem:
    """A scalar tagged with its field; arithmetic across fields raises."""

    field: Field
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", self.field(self.value))

    def _other(self, other):
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other.value
        return self.field(other)

    def __add__(self, other):
        return FieldElem(self.field, self.value + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElem(self.field, self.value - self._other(other))

    def __rsub__(self, other):
        return FieldElem(self.field, self._other(other) - self.value)

    def __mul__(self, other):
        return FieldElem(self.field, self.value * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(self.field, -self.value)

    def __truediv__(self, other):
        return FieldElem(self.field, self.value * self.field.inv(self._other(other)))

    def __rtruediv__(self, other):
        return FieldElem(self.field, self._other(other) * self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field(other)
        except (TypeError, ValueError, ZeroDivisionError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.field!r}({self.field.encode(self.value)})"


# --------------------------------------------------------------------------
# elimination on raw arrays


def rref(fld: Field, arr: np.ndarray) -> tuple[np.ndarray, list[int], object]:
    """Reduced row echelon form.

    Returns ``(R, pivots, det)`` where ``det`` is the determinant for square
    input and ``None`` otherwise.
    """
    a = np.array(arr, dtype=fld.dtype, copy=True)
    nrows, ncols = a.shape
    pivots: list[int] = []
    det = fld.one
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
            det = fld(-det)
        pv = a[r, c]
        det = fld(det * fld(pv))
        a[r] = fld.reduce(a[r] * fld.inv(pv))
        col = a[:, c].copy()
        col[r] = fld.zero
        rows = np.nonzero(col)[0]
        if rows.size:
            a[rows] = fld.reduce(a[rows] - np.outer(col[rows], a[r]))
        pivots.append(c)
        r += 1
    if nrows == ncols:
        det = det if len(pivots) == nrows else fld.zero
    else:
        det = None
    return a, pivots, det


def rank_of(fld: Field, arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    return len(rref(fld, arr)[1])


def kernel_of(fld: Field, arr: np.ndarray) -> np.ndarray:
    """Basis of the right kernel, as the columns of the returned array."""
    nrows, ncols = arr.shape
    if nrows == 0:
        return fld.eye(ncols)
    red, pivots, _ = rref(fld, arr)
    free = [c for c in range(ncols) if c not in set(pivots)]
    out = fld.zeros((ncols, len(free)))
    for j, f in enumerate(free):
        out[f, j] = fld.one
        for i, pc in enumerate(pivots):
            out[pc, j] = -red[i, f]
    return fld.reduce(out)


def left_kernel_of(fld: Field, arr: np.ndarray) -> np.ndarray:
    """Basis of ``{u : u @ arr == 0}`` as the rows of the returned array."""
    return kernel_of(fld, arr.T).T


@lru_cache(maxsize=8)
def _inverse_table(p: int) -> np.ndarray:
    table = np.zeros(p, dtype=np.int64)
    table[1:] = [pow(i, -1, p) for i in range(1, p)]
    return table


def batch_rank(fld: Field, arrs: np.ndarray) -> np.ndarray:
    """Ranks of a stack of matrices (shape ``(N, r, c)``), eliminated in lockstep."""
    if fld.dtype is object:
        return np.array([rank_of(fld, a) for a in arrs], dtype=np.int64)
    a = fld.reduce(np.array(arrs, dtype=np.int64, copy=True))
    if a.shape[1] > a.shape[2]:
        a = np.ascontiguousarray(a.transpose(0, 2, 1))
    count, nrows, ncols = a.shape
    rank = np.zeros(count, dtype=np.int64)
    idx = np.arange(count)
    rows = np.arange(nrows)
    p = fld.p
    table = _inverse_table(p) if p <= 2**20 else None
    for c in range(ncols):
        live = (a[:, :, c] != 0) & (rows[None, :] >= rank[:, None])
        has = live.any(axis=1) & (rank < nrows)
        if not has.any():
            continue
        b = idx[has]
        piv = live[b].argmax(axis=1)
        r = rank[b]
        prow = a[b, piv].copy()
        a[b, piv] = a[b, r]
        if table is not None:
            inv = table[prow[:, c]]
        else:
            inv = np.array([pow(int(v), -1, p) for v in prow[:, c]], dtype=np.int64)
        prow = prow * inv[:, None] % p
        a[b, r] = prow
        factors = a[b, :, c].copy()
        factors[np.arange(len(b)), r] = 0
        factors[rows[None, :] < r[:, None]] = 0
        a[b] = (a[b] - factors[:, :, None] * prow[:, None, :]) % p
        rank[b] += 1
    return rank


def det_of(fld: Field, arr: np.ndarray):
    if arr.shape[0] != arr.shape[1]:
        raise ValidationError("determinant of a non-square matrix")
    if arr.shape[0] == 0:
        return fld.one
    return rref(fld, arr)[2]


def solve_of(fld: Field, arr: np.ndarray, b: np.ndarray):
    """One solution of ``arr @ x == b`` or ``None`` when inconsistent."""
    nrows, ncols = arr.shape
    aug = np.concatenate([np.asarray(arr, dtype=fld.dtype), np.asarray(b, dtype=fld.dtype).reshape(nrows, 1)], axis=1)
    red, pivots, _ = rref(fld, aug)
    if pivots and pivots[-1] == ncols:
        return None
    x = fld.zeros(ncols)
    for i, pc in enumerate(pivots):
        x[pc] = red[i, ncols]
    return x


def span_contains(fld: Field, basis: np.ndarray, vec: np.ndarray) -> bool:
    """Whether ``vec`` lies in the column span of ``basis`` (rank comparison)."""
    if basis.shape[1] == 0:
        return not np.any(vec)
    aug = np.concatenate([basis, np.asarray(vec, dtype=fld.dtype).reshape(-1, 1)], axis=1)
    return rank_of(fld, aug) == rank_of(fld, basis)


# --------------------------------------------------------------------------
# matrices


class ExactMatrix:
    """Immutable dense matrix over a single exact field."""

    __slots__ = ("field", "data")

    def __init__(self, fld: Field, rows):
        if isinstance(rows, ExactMatrix):
            if rows.field != fld:
                raise FieldMismatchError(f"matrix over {rows.field} used as {fld}")
            data = rows.data.copy()
        else:
            data = fld.array(rows)
            if data.ndim == 1 and data.size == 0:
                data = data.reshape(0, 0)
            if data.ndim != 2:
                raise ValidationError("matrix data must be two-dimensional")
        data.flags.writeable = False
        object.__setattr__(self, "field", fld)
        object.__setattr__(self, "data", data)

    def __setattr__(self, key, value):
        raise AttributeError("ExactMatrix is immutable")

    @classmethod
    def identity(cls, fld: Field, n: int) -> "ExactMatrix":
        return cls(fld, fld.eye(n))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def _check(self, other: "ExactMatrix"):
        if not isinstance(other, ExactMatrix):
            raise TypeError("expected ExactMatrix")
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            self._check(other)
            return ExactMatrix(self.field, self.field.reduce(self.data @ other.data))
        vec = self.field.array(list(other))
        return tuple(self.field.reduce(self.data @ vec).tolist())

    def __add__(self, other):
        self._check(other)
        return ExactMatrix(self.field, self.field.reduce(self.data + other.data))

    def __sub__(self, other):
        self._check(other)
        return ExactMatrix(self.field, self.field.reduce(self.data - other.data))

    def __neg__(self):
        return ExactMatrix(self.field, self.field.reduce(-self.data))

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self.field, self.data.T)

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and other.field == self.field
            and other.shape == self.shape
            and bool(np.all(other.data == self.data))
        )

    def __hash__(self):
        return hash((self.field, self.shape, tuple(self.data.ravel().tolist())))

    def __getitem__(self, idx):
        return self.data[idx]

    def tolist(self):
        return self.data.tolist()

    def __repr__(self):
        return f"ExactMatrix({self.field!r}, {self.tolist()!r})"

    def rank(self) -> int:
        return rank_of(self.field, self.data)

    def kernel(self) -> list[tuple]:
        return [tuple(col) for col in kernel_of(self.field, self.data).T.tolist()]

    def det(self) -> FieldElem:
        return FieldElem(self.field, det_of(self.field, self.data))


def hstack(*mats: ExactMatrix) -> ExactMatrix:
    for m in mats[1:]:
        mats[0]._check(m)
    return ExactMatrix(mats[0].field, np.concatenate([m.data for m in mats], axis=1))


def vstack(*mats: ExactMatrix) -> ExactMatrix:
    for m in mats[1:]:
        mats[0]._check(m)
    return ExactMatrix(mats[0].field, np.concatenate([m.data for m in mats], axis=0))


@dataclass(frozen=True)
class Reduction:
    rank: int
    kernel: tuple[tuple, ...]
    det: FieldElem | None
    pivots: tuple[int, ...]


def mat_reduce(m: ExactMatrix) -> Reduction:
    """Rank, kernel basis and (square case) determinant of ``m``."""
    fld = m.field
    if m.rows == 0:
        return Reduction(0, tuple(tuple(c) for c in fld.eye(m.cols).T.tolist()), None if m.cols else FieldElem(fld, 1), ())
    red, pivots, det = rref(fld, m.data)
    ker = kernel_of(fld, m.data)
    return Reduction(
        rank=len(pivots),
        kernel=tuple(tuple(c) for c in ker.T.tolist()),
        det=None if det is None else FieldElem(fld, det),
        pivots=tuple(pivots),
    )


@dataclass(frozen=True)
class Solution:
    """Affine solution set ``particular + span(kernel)``; ``particular`` is ``None`` if inconsistent."""

    particular: tuple | None
    kernel: tuple[tuple, ...]

    @property
    def consistent(self) -> bool:
        return self.particular is not None

    @property
    def dimension(self) -> int | None:
        return len(self.kernel) if self.consistent else None


def linear_solve(m: ExactMatrix, targets: Sequence[Sequence]) -> list[Solution]:
    """Solve ``m @ x == b`` for every ``b`` in ``targets``."""
    fld = m.field
    ker = tuple(tuple(c) for c in kernel_of(fld, m.data).T.tolist())
    out = []
    for b in targets:
        if len(b) != m.rows:
            raise ValidationError(f"target of length {len(b)} for a matrix with {m.rows} rows")
        x = solve_of(fld, m.data, fld.array(list(b)))
        out.append(Solution(None if x is None else tuple(x.tolist()), ker))
    return out


# --------------------------------------------------------------------------
# graded polynomials


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of the given degree, in lexicographically decreasing order."""
    if nvars == 0:
        return ((),) if degree == 0 else ()
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - first):
            out.append((first,) + rest)
    return tuple(out)


@dataclass(frozen=True)
class GradedPoly:
    """Homogeneous polynomial; ``terms`` maps exponent vectors to nonzero coefficients."""

    field: Field
    nvars: int
    degree: int
    terms: tuple = dc_field(default=())

    @classmethod
    def from_terms(cls, fld: Field, nvars: int, terms: Mapping | Iterable, degree: int | None = None) -> "GradedPoly":
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, ...], object] = {}
        for exp, c in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars or any(e < 0 for e in exp):
                raise ValidationError(f"bad exponent vector {exp} for {nvars} variables")
            acc[exp] = fld(acc.get(exp, 0)) + fld(c)
        acc = {e: fld(c) for e, c in acc.items() if fld(c) != 0}
        degs = {sum(e) for e in acc}
        if len(degs) > 1:
            raise InhomogeneousError(f"terms of degrees {sorted(degs)} in one form")
        if degs:
            (d,) = degs
            if degree is not None and degree != d:
                raise InhomogeneousError(f"declared degree {degree} but terms have degree {d}")
            degree = d
        if degree is None:
            raise ValidationError("degree of the zero form must be given")
        return cls(fld, nvars, degree, tuple(sorted(acc.items(), reverse=True)))

    @classmethod
    def zero(cls, fld: Field, nvars: int, degree: int) -> "GradedPoly":
        return cls(fld, nvars, degree, ())

    @classmethod
    def const(cls, fld: Field, nvars: int, c) -> "GradedPoly":
        return cls.from_terms(fld, nvars, {(0,) * nvars: c}, degree=0)

    @classmethod
    def var(cls, fld: Field, nvars: int, i: int) -> "GradedPoly":
        exp = [0] * nvars
        exp[i] = 1
        return cls.from_terms(fld, nvars, {tuple(exp): 1})

    @classmethod
    def linear(cls, fld: Field, coeffs: Sequence) -> "GradedPoly":
        n = len(coeffs)
        return cls.from_terms(
            fld, n, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs)}, degree=1
        )

    @property
    def coeffs(self) -> dict:
        return dict(self.terms)

    def coeff(self, exp) -> object:
        return self.coeffs.get(tuple(exp), self.field.zero)

    def is_zero(self) -> bool:
        return not self.terms

    def _compatible(self, other: "GradedPoly"):
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        if other.nvars != self.nvars:
            raise ValidationError("forms in different numbers of variables")

    def __add__(self, other: "GradedPoly") -> "GradedPoly":
        self._compatible(other)
        if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
            raise InhomogeneousError(f"adding degree {self.degree} to degree {other.degree}")
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        acc = self.coeffs
        for e, c in other.terms:
            acc[e] = acc.get(e, 0) + c
        return GradedPoly.from_terms(self.field, self.nvars, acc, degree=self.degree)

    def __neg__(self) -> "GradedPoly":
        return GradedPoly.from_terms(self.field, self.nvars, {e: -c for e, c in self.terms}, degree=self.degree)

    def __sub__(self, other: "GradedPoly") -> "GradedPoly":
        return self + (-other)

    def scale(self, c) -> "GradedPoly":
        c = self.field(c)
        return GradedPoly.from_terms(self.field, self.nvars, {e: v * c for e, v in self.terms}, degree=self.degree)

    def __mul__(self, other) -> "GradedPoly":
        if not isinstance(other, GradedPoly):
            return self.scale(other)
        self._compatible(other)
        acc: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return GradedPoly.from_terms(self.field, self.nvars, acc, degree=self.degree + other.degree)

    __rmul__ = __mul__

    def __call__(self, point: Sequence):
        return self.eval(point)

    def eval(self, point: Sequence):
        if len(point) != self.nvars:
            raise ValidationError(f"point has {len(point)} coordinates, form has {self.nvars} variables")
        pt = [self.field(x) for x in point]
        if all(x == 0 for x in pt):
            raise ValidationError("evaluation at the zero vector")
        total = self.field.zero
        for e, c in self.terms:
            term = c
            for x, k in zip(pt, e):
                if k:
                    term = term * x**k
            total = total + term
        return self.field(total)

    def substitute(self, images: Sequence["GradedPoly"]) -> "GradedPoly":
        """Compose with ``x_i -> images[i]``; all images must be forms of one common degree."""
        if len(images) != self.nvars:
            raise ValidationError("need one image per variable")
        if not images:
            return self
        target = images[0]
        for im in images:
            target._compatible(im)
            if im.degree != target.degree:
                raise InhomogeneousError("substitution images of different degrees")
        out = GradedPoly.zero(self.field, target.nvars, self.degree * target.degree)
        powers: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = GradedPoly.const(self.field, target.nvars, 1) if k == 0 else power(i, k - 1) * images[i]
            return powers[key]

        for e, c in self.terms:
            term = GradedPoly.const(self.field, target.nvars, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    def coefficient_vector(self) -> np.ndarray:
        """Coefficients on :func:`monomials` order."""
        cs = self.coeffs
        return self.field.array([cs.get(m, 0) for m in monomials(self.nvars, self.degree)])

    @classmethod
    def from_vector(cls, fld: Field, nvars: int, degree: int, vec) -> "GradedPoly":
        return cls.from_terms(fld, nvars, dict(zip(monomials(nvars, degree), vec)), degree=degree)

    def __repr__(self):
        if not self.terms:
            return f"GradedPoly(0, deg={self.degree})"
        parts = []
        for e, c in self.terms:
            mono = "*".join(f"x{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"{self.field.encode(c)}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def poly_arith(op: str, *args):
    """Dispatch ``mul``, ``eval`` or ``linear_substitute`` on graded forms."""
    if op == "mul":
        a, b = args
        return a * b
    if op == "eval":
        f, point = args
        return FieldElem(f.field, f.eval(point))
    if op == "linear_substitute":
        f, images = args
        for im in images:
            if im.degree != 1:
                raise InhomogeneousError("linear_substitute needs linear images")
        return f.substitute(images)
    raise ValidationError(f"unknown polynomial operation {op!r}")


def poly_det(mat: Sequence[Sequence[GradedPoly]]) -> GradedPoly:
    """Determinant of a square matrix of forms by Laplace expansion with memoisation."""
    n = len(mat)
    if n == 0:
        raise ValidationError("empty matrix")
    fld, nvars = mat[0][0].field, mat[0][0].nvars
    degs = {p.degree for row in mat for p in row}
    if len(degs) != 1:
        raise InhomogeneousError("entries of different degrees")
    (d,) = degs
    memo: dict = {}

    def minor(row: int, cols: tuple[int, ...]) -> GradedPoly:
        if row == n:
            return GradedPoly.const(fld, nvars, 1)
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = GradedPoly.zero(fld, nvars, d * (n - row))
        for k, c in enumerate(cols):
            entry = mat[row][c]
            if entry.is_zero():
                continue
            sub = minor(row + 1, cols[:k] + cols[k + 1 :])
            term = entry * sub
            acc = acc + (term if k % 2 == 0 else -term)
        memo[key] = acc
        return acc

    return minor(0, tuple(range(n)))


def binom(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0


def point_array(fld: PrimeField, dim: int) -> np.ndarray:
    """All points of P^dim(F_p) as rows, in the order of :func:`projective_points`."""
    p = fld.p
    blocks = []
    for lead in range(dim + 1):
        free = dim - lead
        tails = np.indices((p,) * free).reshape(free, -1).T if free else np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((len(tails), dim + 1), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1 :] = tails
        blocks.append(block)
    return np.concatenate(blocks)


def projective_points(fld: PrimeField, dim: int) -> Iterable[tuple[int, ...]]:
    """Points of P^dim(F_p), normalised so the first nonzero coordinate is 1."""
    p = fld.p
    for lead in range(dim + 1):
        for tail in itertools.product(range(p), repeat=dim - lead):
            yield (0,) * lead + (1,) + tail

"""Schubert calculus on G(1,3) and the residual-class bookkeeping for congruences.

Classes are combinations of ``t^a u^b`` (``t`` the hyperplane class, ``u``
the class of lines in a plane) reduced to the basis ``1, t, t^2, u, tu, pt``
with ``pt = t^2 u`` by the rules ``t^3 = 2tu`` and ``u^2 = t^2 u``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Mapping

import sympy

from .errors import ValidationError

__all__ = [
    "BASIS",
    "ChowClassG",
    "CongruenceData",
    "ResidualClass",
    "chow_mul",
    "chern_F",
    "residual_class",
    "residual_smooth",
    "congruence_identity",
    "canonical_square",
    "sym2_omega_check",
]

# basis label -> exponents (a, b) of t^a u^b
BASIS = {"1": (0, 0), "t": (1, 0), "t2": (2, 0), "u": (0, 1), "tu": (1, 1), "pt": (2, 1)}
_LABEL = {v: k for k, v in BASIS.items()}


def _reduce_monomial(a: int, b: int) -> dict[tuple[int, int], int]:
    if a + 2 * b > 4:
        return {}
    if a >= 3:
        return {k: 2 * v for k, v in _reduce_monomial(a - 2, b + 1).items()}
    if b >= 2:
        return _reduce_monomial(a + 2, b - 1)
    return {(a, b): 1}


@dataclass(frozen=True)
class ChowClassG:
    coeffs: tuple  # sorted (label, coefficient) pairs with nonzero coefficients

    @classmethod
    def of(cls, terms: Mapping[str, object] | None = None, **kw) -> "ChowClassG":
        acc: dict[str, object] = {}
        for label, c in {**(terms or {}), **kw}.items():
            if label not in BASIS:
                raise ValidationError(f"unknown basis class {label!r}")
            acc[label] = acc.get(label, 0) + c
        return cls(tuple(sorted((k, v) for k, v in acc.items() if v != 0)))

    @classmethod
    def monomial(cls, a: int, b: int, c=1) -> "ChowClassG":
        return cls.of({_LABEL[e]: c * v for e, v in _reduce_monomial(a, b).items()})

    def __getitem__(self, label: str):
        return dict(self.coeffs).get(label, 0)

    def __add__(self, other: "ChowClassG") -> "ChowClassG":
        acc = dict(self.coeffs)
        for k, v in other.coeffs:
            acc[k] = acc.get(k, 0) + v
        return ChowClassG.of(acc)

    def __neg__(self) -> "ChowClassG":
        return ChowClassG.of({k: -v for k, v in self.coeffs})

    def __sub__(self, other: "ChowClassG") -> "ChowClassG":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ChowClassG):
            return chow_mul(self, other)
        return ChowClassG.of({k: v * other for k, v in self.coeffs})

    __rmul__ = __mul__

    def codims(self) -> set[int]:
        return {BASIS[k][0] + 2 * BASIS[k][1] for k, _ in self.coeffs}

    def to_json(self) -> dict:
        return {k: _encode(v) for k, v in self.coeffs}

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{v}*{k}" for k, v in self.coeffs)


def _encode(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    return v


T = ChowClassG.of(t=1)
U = ChowClassG.of(u=1)
ONE = ChowClassG.of({"1": 1})


def chow_mul(x: ChowClassG, y: ChowClassG) -> ChowClassG:
    out = ChowClassG.of()
    for k1, c1 in x.coeffs:
        a1, b1 = BASIS[k1]
        for k2, c2 in y.coeffs:
            a2, b2 = BASIS[k2]
            out = out + ChowClassG.monomial(a1 + a2, b1 + b2, c1 * c2)
    return out


def chern_F(n: int) -> tuple[ChowClassG, ChowClassG, ChowClassG]:
    if n < 1:
        raise ValidationError("n must be positive")
    return (
        ChowClassG.of(t=n),
        ChowClassG.of(t2=comb(n + 1, 2), u=-n),
        ChowClassG.of(tu=2 * comb(n + 1, 3)),
    )


# --------------------------------------------------------------------------
# congruences


@dataclass(frozen=True)
class CongruenceData:
    n: int
    alpha: int
    beta: int
    pi: int
    chi: int
    m: int = 1
    c2Omega: int | None = None
    c1Omega_sq: int | None = None

    def __post_init__(self):
        for name in ("n", "alpha", "beta", "pi", "chi", "m"):
            if not isinstance(getattr(self, name), int):
                raise ValidationError(f"{name} must be an integer")
        if self.alpha < 0 or self.beta < 0:
            raise ValidationError("bidegree must be non-negative")
        if self.m < 1:
            raise ValidationError("multiplicity must be positive")

    @classmethod
    def from_json(cls, obj: Mapping) -> "CongruenceData":
        known = {"n", "m", "alpha", "beta", "pi", "chi", "c2Omega", "c1Omega_sq"}
        extra = set(obj) - known
        if extra:
            raise ValidationError(f"unknown congruence fields {sorted(extra)}")
        try:
            return cls(**{k: obj[k] for k in known if k in obj and obj[k] is not None})
        except TypeError as exc:
            raise ValidationError(str(exc)) from None

    def resolved_c2(self) -> int:
        """``c2(Omega_S)``, from Noether's formula when only ``K^2`` is given."""
        if self.c2Omega is not None:
            if self.c1Omega_sq is not None and self.c1Omega_sq + self.c2Omega != 12 * self.chi:
                raise ValidationError("c1Omega_sq + c2Omega != 12 chi")
            return self.c2Omega
        if self.c1Omega_sq is not None:
            return 12 * self.chi - self.c1Omega_sq
        raise ValidationError("need c2Omega or c1Omega_sq")


@dataclass(frozen=True)
class ResidualClass:
    point_coeff: int  # degree-0 part over the reduced surface
    tu_coeff: int
    convention_dependent: bool

    def to_json(self) -> dict:
        return {
            "point_coeff": self.point_coeff,
            "tu_coeff": self.tu_coeff,
            "convention_dependent": self.convention_dependent,
        }


def _halve(value: int, what: str) -> int:
    if value % 2:
        raise ValidationError(f"{what} is not integral: {value}/2")
    return value // 2


def residual_smooth(n: int, alpha: int, beta: int, pi: int, chi: int) -> tuple[int, int]:
    """``(point_coeff, tu_coeff)`` of the residual class for a smooth congruence of bidegree (alpha, beta)."""
    point = _halve(
        alpha**2
        + beta**2
        - (n * n - 7 * n + 13) * beta
        - (n * n - 5 * n + 13) * alpha
        + (2 * pi - 2) * (2 * n - 12)
        - 12 * chi,
        "point coefficient",
    )
    tu = 2 * comb(n + 1, 3) - (n - 3) * (alpha + beta) + 2 * pi - 2
    return point, tu


def residual_class(data: CongruenceData) -> ResidualClass:
    """Residual class for ``S = m * S_red``, with ``t.c1N`` and ``c1N^2 - c2N`` read off ``S_red``.

    Multiplicities ``m >= 2`` depend on the chosen pushforward conventions and are flagged.
    """
    n, m = data.n, data.m
    ab = data.alpha + data.beta
    t_c1n = 3 * ab + 2 * data.pi - 2
    c1n_sq_minus_c2n = 5 * ab + 8 * (data.pi - 1) + data.resolved_c2()
    point = -(m**3) * c1n_sq_minus_c2n + m * m * n * t_c1n - m * (comb(n + 1, 2) * ab - n * data.beta)
    tu = 2 * comb(n + 1, 3) - n * m * m * ab + m**3 * t_c1n
    return ResidualClass(point, tu, m >= 2)


def canonical_square(alpha: int, beta: int, pi: int, chi: int) -> int:
    """``K^2`` forced by the smooth-congruence identity."""
    return _halve(alpha**2 + beta**2 - 3 * (alpha + beta) - 4 * (2 * pi - 2) + 12 * chi, "K^2")


def congruence_identity(alpha: int, beta: int, pi: int, c1Omega_sq: int, chi: int) -> bool:
    """``a^2 + b^2 == 3(a+b) + 4(2pi-2) + 2K^2 - 12chi``."""
    return alpha**2 + beta**2 == 3 * (alpha + beta) + 4 * (2 * pi - 2) + 2 * c1Omega_sq - 12 * chi


def sym2_omega_check() -> int:
    """``c2(S^2 F) - h c1(S^2 F) + h^2`` in units of ``h^2`` for rank 2 ``F`` with ``c1 = h, c2 = h^2``."""
    a, b, h = sympy.symbols("a b h")
    roots = (2 * a, a + b, 2 * b)
    c1 = sum(roots)
    c2 = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2]
    combo = sympy.expand(c2 - h * c1 + h**2)
    sym, rest, subs = sympy.polys.polyfuncs.symmetrize(combo, [a, b], formal=True)
    if rest != 0:
        raise ValidationError("combination is not symmetric in the Chern roots")
    s1, s2 = (s for s, _ in subs)
    value = sympy.expand(sym.subs({s1: h, s2: h**2}))
    return int(sympy.Poly(value, h).coeff_monomial(h**2))

"""Constructors for the Fermat polynomials, ideals and point configurations."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

from .arrangement import LineParam, census, fermat_planes, intersection_lattice
from .exactnum import QQ, CyclotomicField
from .mpoly import Poly, PolyRing, default_names


@dataclass(frozen=True)
class FermatContext:
    N: int
    n: int

    def __post_init__(self):
        if self.N < 2 or self.n < 1:
            raise ValueError("need N >= 2 and n >= 1")

    @property
    def ring(self) -> PolyRing:
        return PolyRing(default_names(self.N), QQ)

    @property
    def cyclotomic_ring(self) -> PolyRing:
        return PolyRing(default_names(self.N), CyclotomicField(self.n))


def _diff(ring: PolyRing, i: int, j: int, n: int) -> Poly:
    return ring.var(i) ** n - ring.var(j) ** n


def fermat_poly(N: int, n: int, ring: PolyRing | None = None) -> Poly:
    """Product of x_i^n - x_j^n over all pairs i < j; degree n * C(N+1, 2)."""
    if N < 2 or n < 1:
        raise ValueError("need N >= 2 and n >= 1")
    ring = ring or FermatContext(N, n).ring
    out = ring.const(1)
    for i, j in itertools.combinations(range(N + 1), 2):
        out = out * _diff(ring, i, j, n)
    return out


def p2_witness(n: int) -> Poly:
    """(x^n - y^n)(y^n - z^n)(z^n - x^n), the planar Fermat polynomial as printed."""
    R = FermatContext(2, n).ring
    return _diff(R, 0, 1, n) * _diff(R, 1, 2, n) * _diff(R, 2, 0, n)


@dataclass(frozen=True)
class GeneratorSet:
    """g_1 .. g_6 in display order, plus the two complete-intersection forms."""

    n: int
    generators: tuple
    J: tuple

    @property
    def ring(self) -> PolyRing:
        return self.generators[0].ring

    @property
    def degrees(self) -> tuple:
        return tuple(g.degree() for g in self.generators)

    def __len__(self):
        return len(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    def __iter__(self):
        return iter(self.generators)


def restricted_ideal_generators(n: int) -> GeneratorSet:
    """The six degree-(2n+2) generators of the ideal of the restricted lines."""
    if n < 1:
        raise ValueError("need n >= 1")
    if n < 3:
        warnings.warn(f"n = {n} lies outside the non-containment range n >= 3",
                      stacklevel=2)
    R = FermatContext(3, n).ring
    x, y, z, w = R.gens()
    a = _diff(R, 0, 1, n) * _diff(R, 2, 3, n)   # (x^n-y^n)(z^n-w^n)
    b = _diff(R, 0, 2, n) * _diff(R, 1, 3, n)   # (x^n-z^n)(y^n-w^n)
    c = _diff(R, 0, 3, n) * _diff(R, 1, 2, n)   # (x^n-w^n)(y^n-z^n)
    gens = (a * x * y, a * z * w, b * x * z, b * y * w, c * x * w, c * y * z)
    return GeneratorSet(n, gens, (a, b))


def p2_fermat_ideal(n: int) -> tuple[Poly, Poly, Poly]:
    """x(y^n - z^n), y(z^n - x^n), z(x^n - y^n)."""
    if n < 1:
        raise ValueError("need n >= 1")
    R = FermatContext(2, n).ring
    x, y, z = R.gens()
    return (x * _diff(R, 1, 2, n), y * _diff(R, 2, 0, n), z * _diff(R, 0, 1, n))


def p2_fermat_points(n: int) -> list[LineParam]:
    """Intersection points of the planar Fermat arrangement.

    The n^2 points (z^(a+b) : z^b : 1) lie on three lines each; the three
    coordinate points lie on n lines and are lattice points only for n >= 2.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    K = CyclotomicField(n)
    zero, one = K.zero, K.one
    pts = []
    for a in range(n):
        for b in range(n):
            pts.append(LineParam(((K.root_of_unity(a + b), K.root_of_unity(b), one),),
                                 3, f"triple:{a},{b}"))
    if n >= 2:
        for k in range(3):
            e = [zero] * 3
            e[k] = one
            pts.append(LineParam((tuple(e),), n, f"vertex:{k}"))
    return pts


def p2_census(n: int):
    arr = fermat_planes(2, n)
    return census(intersection_lattice(arr), arr.d, 2)

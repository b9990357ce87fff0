"""Hyperplane arrangements, intersection lattices and their censuses."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

from .exactnum import CyclotomicField, PrimeField
from . import linalg


@dataclass(frozen=True)
class LinForm:
    """A hyperplane, stored with its first nonzero coefficient equal to 1."""

    coeffs: tuple

    @classmethod
    def normalized(cls, coeffs: Sequence) -> LinForm:
        lead = next((c for c in coeffs if c), None)
        if lead is None:
            raise ValueError("zero linear form")
        inv = linalg._inv(lead)
        return cls(tuple(c * inv if c else c - c for c in coeffs))

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"


@dataclass(frozen=True)
class LineParam:
    """A flat given by spanning points (two for a line, one for a point)."""

    points: tuple
    multiplicity: int | None = None
    label: str = ""

    @property
    def dim(self) -> int:
        return len(self.points) - 1


@dataclass(frozen=True)
class Flat:
    """Element of the intersection lattice.

    ``basis`` is the reduced echelon basis of the linear forms vanishing on
    the flat and doubles as its identity; ``planes`` holds the indices of
    the arrangement hyperplanes containing it.
    """

    dim: int
    basis: tuple
    pivots: tuple
    planes: frozenset

    @property
    def multiplicity(self) -> int:
        return len(self.planes)

    @property
    def key(self) -> tuple:
        return self.basis

    def spanning_points(self) -> tuple:
        ncols = len(self.basis[0])
        pts = linalg.nullspace([list(r) for r in self.basis], ncols)
        return tuple(tuple(p) for p in pts)

    def as_line_param(self, label: str = "") -> LineParam:
        return LineParam(self.spanning_points(), self.multiplicity, label)


@dataclass(frozen=True)
class Arrangement:
    N: int
    forms: tuple
    field: object
    labels: tuple = ()

    @property
    def d(self) -> int:
        return len(self.forms)

    def subarrangement(self, indices: Iterable[int]) -> Arrangement:
        idx = sorted(set(indices))
        labels = tuple(self.labels[i] for i in idx) if self.labels else ()
        return Arrangement(self.N, tuple(self.forms[i] for i in idx), self.field, labels)


@dataclass
class Census:
    """t_j(k) histogram, plus (p, q) point-on-line incidence pairs for N = 3."""

    N: int
    d: int
    t: dict = field(default_factory=dict)
    incidences: dict | None = None

    def count(self, k: int, j: int) -> int:
        return self.t.get((k, j), 0)

    def level(self, k: int) -> dict:
        return {j: c for (kk, j), c in sorted(self.t.items()) if kk == k}

    def to_json(self) -> dict:
        out = {
            "N": self.N,
            "d": self.d,
            "flats": [{"dimension": k, "multiplicity": j, "count": c}
                      for (k, j), c in sorted(self.t.items(), key=lambda kv: (-kv[0][0], kv[0][1]))],
        }
        if self.incidences is not None:
            out["incidences"] = [{"p": p, "q": q, "incidences": c}
                                 for (p, q), c in sorted(self.incidences.items())]
        return out

    def to_csv(self) -> str:
        lines = ["dimension,multiplicity,count"]
        for (k, j), c in sorted(self.t.items(), key=lambda kv: (-kv[0][0], kv[0][1])):
            lines.append(f"{k},{j},{c}")
        if self.incidences is not None:
            lines.append("")
            lines.append("p,q,incidences")
            for (p, q), c in sorted(self.incidences.items()):
                lines.append(f"{p},{q},{c}")
        return "\n".join(lines) + "\n"


# -- construction -------------------------------------------------------------

def fermat_planes(N: int, n: int, field=None) -> Arrangement:
    """The hyperplanes x_i - z^a x_j, i < j, 0 <= a < n."""
    if N < 2 or n < 1:
        raise ValueError("fermat_planes needs N >= 2 and n >= 1")
    if field is None:
        field = CyclotomicField(n)
    if isinstance(field, PrimeField):
        roots = [field.root_of_unity(n, a) for a in range(n)]
    else:
        roots = [field.root_of_unity(a) for a in range(n)]
    zero, one = field.zero, field.one
    forms, labels = [], []
    for i, j in itertools.combinations(range(N + 1), 2):
        for a in range(n):
            coeffs = [zero] * (N + 1)
            coeffs[i] = one
            coeffs[j] = -roots[a]
            forms.append(LinForm(tuple(coeffs)))
            labels.append((i, j, a))
    return Arrangement(N, tuple(forms), field, tuple(labels))


def arrangement_from_forms(forms: Sequence[Sequence], field) -> Arrangement:
    lfs = [LinForm.normalized([field(c) for c in f]) for f in forms]
    return Arrangement(len(forms[0]) - 1, tuple(lfs), field)


# -- lattice --------------------------------------------------------------------

def _reduce(basis, pivots, h):
    """Remainder of h modulo a reduced echelon basis."""
    r = list(h)
    for row, p in zip(basis, pivots):
        c = r[p]
        if c:
            r = [a - c * b if b else a for a, b in zip(r, row)]
    return r


def _extend(basis, pivots, h):
    """Echelon basis of span(basis) + h, or None when h is already inside."""
    r = _reduce(basis, pivots, h)
    piv = next((i for i, c in enumerate(r) if c), None)
    if piv is None:
        return None
    inv = linalg._inv(r[piv])
    r = [c * inv if c else c for c in r]
    rows = []
    for row in basis:
        c = row[piv]
        rows.append(tuple(a - c * b if b else a for a, b in zip(row, r)) if c else tuple(row))
    rows.append(tuple(r))
    pv = list(pivots) + [piv]
    order = sorted(range(len(rows)), key=lambda i: pv[i])
    return tuple(rows[i] for i in order), tuple(pv[i] for i in order)


def _canon(field, rows):
    return tuple(tuple(field(c) for c in row) for row in rows)


def intersection_lattice(arr: Arrangement) -> list[Flat]:
    """All flats of dimension 0 .. N-2 with their incident hyperplanes.

    Pairwise intersections first, then each flat is cut by every hyperplane
    not containing it, until codimension N is reached.
    """
    N, fld = arr.N, arr.field
    forms = [tuple(fld(c) for c in f.coeffs) for f in arr.forms]
    if len(set(forms)) != len(forms):
        raise ValueError("duplicate hyperplanes in arrangement")
    pivot_of = [next(i for i, c in enumerate(f) if c) for f in forms]

    def incident(basis, pivots):
        return frozenset(i for i, f in enumerate(forms)
                         if not any(_reduce(basis, pivots, f)))

    flats: list[Flat] = []
    level: dict = {}
    for i, j in itertools.combinations(range(len(forms)), 2):
        ext = _extend(((forms[i]),), (pivot_of[i],), forms[j])
        if ext is None:
            continue
        basis, pivots = ext
        key = _canon(fld, basis)
        if key not in level:
            level[key] = pivots
    current = [Flat(N - 2, key, piv, incident(key, piv)) for key, piv in level.items()]
    if N >= 2:
        flats.extend(current)
    for codim in range(3, N + 1):
        level = {}
        for X in current:
            for h in range(len(forms)):
                if h in X.planes:
                    continue
                ext = _extend(X.basis, X.pivots, forms[h])
                basis, pivots = ext
                key = _canon(fld, basis)
                if key not in level:
                    level[key] = pivots
        current = [Flat(N - codim, key, piv, incident(key, piv)) for key, piv in level.items()]
        flats.extend(current)
    return flats


def flat_key_from_points(points: Sequence[Sequence], field) -> tuple:
    """Canonical lattice key of the flat spanned by ``points``."""
    rows = [[field(c) for c in p] for p in points]
    forms = linalg.nullspace(rows, len(rows[0]))
    echelon, _, pivots = linalg.rref(forms, len(rows[0]))
    return _canon(field, echelon)


def _containment(flats: Sequence[Flat]) -> dict:
    """Map flat index -> indices of strictly larger lattice flats containing it."""
    above: dict = {}
    for a, X in enumerate(flats):
        above[a] = [b for b, Y in enumerate(flats)
                    if Y.dim > X.dim and Y.planes < X.planes]
    return above


class LatticeIndex:
    """Full lattice plus containment data, for deriving sub-arrangement lattices.

    Every intersection of a subset S of hyperplanes is a flat X of the full
    lattice; X is a flat of L(S) iff the S-planes through X number at least
    two and are not all contained in a strictly larger flat.
    """

    def __init__(self, arr: Arrangement, flats: Sequence[Flat] | None = None):
        self.arr = arr
        self.flats = list(flats) if flats is not None else intersection_lattice(arr)
        self.above = _containment(self.flats)

    def restrict(self, subset: Iterable[int]) -> list[Flat]:
        """Lattice of the sub-arrangement; plane indices are renumbered 0..|S|-1."""
        S = sorted(set(subset))
        renum = {h: i for i, h in enumerate(S)}
        Sset = frozenset(S)
        out = []
        for a, X in enumerate(self.flats):
            T = X.planes & Sset
            if len(T) < 2:
                continue
            if any(T <= self.flats[b].planes for b in self.above[a]):
                continue
            out.append(Flat(X.dim, X.basis, X.pivots, frozenset(renum[h] for h in T)))
        return out


def census(flats: Sequence[Flat], d: int, N: int) -> Census:
    """Histogram of (dimension, multiplicity) plus point/line incidences for N = 3."""
    t = Counter()
    t[(N - 1, 1)] = d
    for X in flats:
        t[(X.dim, X.multiplicity)] += 1
    incidences = None
    if N == 3:
        incidences = Counter()
        points = [X for X in flats if X.dim == 0]
        lines = [X for X in flats if X.dim == 1]
        for P in points:
            for L in lines:
                if L.planes <= P.planes:
                    incidences[(P.multiplicity, L.multiplicity)] += 1
        incidences = dict(incidences)
    if d == 0:
        del t[(N - 1, 1)]
    return Census(N, d, dict(t), incidences)


def arrangement_census(arr: Arrangement) -> Census:
    return census(intersection_lattice(arr), arr.d, arr.N)


# -- combinatorial identities ----------------------------------------------------

def pair_identity(c: Census) -> dict:
    """Both sides of C(d,2) = sum_j C(j,2) t_j(N-2).

    ``rhs`` sums over every multiplicity present; ``rhs_bounded`` stops at
    j <= N, as the printed summation bound would.
    """
    k = c.N - 2
    level = c.level(k)
    lhs = comb(c.d, 2)
    rhs = sum(comb(j, 2) * t for j, t in level.items() if j >= 2)
    rhs_bounded = sum(comb(j, 2) * t for j, t in level.items() if 2 <= j <= c.N)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "rhs_bounded": rhs_bounded,
        "holds": lhs == rhs,
        "bound_sensitive": (lhs == rhs) != (lhs == rhs_bounded),
    }


def verify_pair_identity(c: Census) -> bool:
    return pair_identity(c)["holds"]


def hunt_identity(c: Census) -> dict:
    """Both sides of the N = 3 triple-count identity.

    C(d,3) = sum_p t_p(0) C(p,3) - sum_{q>=3} (sum_{p>=q} t_pq - t_q(1)) C(q,3),
    where t_pq counts incident (point, q-fold line) pairs.
    """
    if c.N != 3:
        raise ValueError("the triple-count identity is stated for N = 3")
    if c.incidences is None:
        raise ValueError("census has no incidence data")
    lhs = comb(c.d, 3)
    points = c.level(0)
    lines = c.level(1)
    first = sum(t * comb(p, 3) for p, t in points.items() if p >= 3)
    qs = sorted({q for q in lines if q >= 3} | {q for _, q in c.incidences if q >= 3})
    second = 0
    for q in qs:
        inc = sum(v for (p, qq), v in c.incidences.items() if qq == q and p >= q)
        second += (inc - lines.get(q, 0)) * comb(q, 3)
    return {"lhs": lhs, "first_sum": first, "second_sum": second,
            "rhs": first - second, "holds": lhs == first - second}


def verify_hunt(c: Census) -> bool:
    return hunt_identity(c)["holds"]


# -- the restricted configuration ----------------------------------------------

def restricted_config_lines(n: int) -> list[LineParam]:
    """The 4n^2 triple lines and 6 coordinate edges of the P^3 Fermat arrangement.

    Triple lines join a coordinate vertex to a point with root-of-unity
    coordinates in the opposite face.
    """
    if n < 3:
        raise ValueError(
            f"restricted configuration needs n >= 3 (for n = {n} the coordinate edges "
            f"have multiplicity {n} < 3 and drop out)")
    K = CyclotomicField(n)
    zero, one = K.zero, K.one
    out = []
    for vertex in (3, 2, 1, 0):
        face = [i for i in range(4) if i != vertex]
        for a in range(n):
            for b in range(n):
                p = [zero] * 4
                p[face[0]] = one
                p[face[1]] = K.root_of_unity(a)
                p[face[2]] = K.root_of_unity(b)
                e = [zero] * 4
                e[vertex] = one
                out.append(LineParam((tuple(p), tuple(e)), 3, f"triple:v{vertex}:{a},{b}"))
    for i, j in itertools.combinations(range(4), 2):
        rest = [k for k in range(4) if k not in (i, j)]
        pts = []
        for k in rest:
            e = [zero] * 4
            e[k] = one
            pts.append(tuple(e))
        out.append(LineParam(tuple(pts), n, f"edge:{i}{j}"))
    return out


def lattice_lines_with_multiplicity(flats: Sequence[Flat], at_least: int) -> list[Flat]:
    return [X for X in flats if X.dim == 1 and X.multiplicity >= at_least]

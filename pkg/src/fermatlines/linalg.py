"""Exact dense linear algebra over a field.

Matrices are plain lists of rows.  Over the rationals elimination is
fraction-free: rows are scaled to integers and combined by cross
multiplication, with the row content divided out after every step.  Any
other field (cyclotomic, prime) uses ordinary Gauss-Jordan with exact
division.  Pivoting is always "first nonzero in fixed column order", so
results depend only on the entry order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .exactnum import rat

Mat = list  # list of rows, each a list of field elements


def _is_rational_matrix(rows) -> bool:
    return all(isinstance(v, (int, Fraction)) for row in rows for v in row)


def _inv(v):
    if isinstance(v, (int, Fraction)):
        return rat(Fraction(1) / v)
    return v.inverse()


def _integral_row(row) -> list[int]:
    den = 1
    for v in row:
        if isinstance(v, Fraction) and v.denominator != 1:
            den = den * v.denominator // gcd(den, v.denominator)
    out = [int(v * den) for v in row]
    return _primitive(out)


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def _rref_integer(rows: list[list[int]], ncols: int):
    rows = [_primitive(list(r)) for r in rows]
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        pv = prow[c]
        support = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            a = row[c]
            if not a:
                continue
            g = gcd(a, pv)
            fa, fp = pv // g, a // g
            if fa != 1:
                row = [fa * v for v in row]
            for j in support:
                row[j] -= fp * prow[j]
            rows[i] = _primitive(row)
        pivots.append(c)
        r += 1
    echelon = []
    for i, c in enumerate(pivots):
        pv = rows[i][c]
        echelon.append([rat(Fraction(v, pv)) if v else 0 for v in rows[i]])
    return echelon, pivots


def _rref_generic(rows, ncols: int):
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = _inv(rows[r][c])
        rows[r] = [v * inv if v else v for v in rows[r]]
        prow = rows[r]
        support = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                row = rows[i]
                for j in support:
                    row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rref(m: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form.

    Returns ``(echelon_rows, rank, pivot_columns)``; only the nonzero rows of
    the echelon form are returned.

    >>> rref([[1, 2], [2, 4]])[1]
    1
    """
    rows = [list(r) for r in m]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if _is_rational_matrix(rows):
        echelon, pivots = _rref_integer([_integral_row(r) for r in rows], ncols)
    else:
        echelon, pivots = _rref_generic(rows, ncols)
    return echelon, len(pivots), pivots


def rank(m: Sequence[Sequence]) -> int:
    return rref(m)[1]


def nullspace(m: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """Basis of the right kernel, one vector per free column."""
    if ncols is None:
        ncols = len(m[0]) if len(m) else 0
    echelon, _, pivots = rref(m, ncols)
    pivset = set(pivots)
    zero = _zero_like(m)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [zero] * ncols
        v[f] = zero + 1
        for row, p in zip(echelon, pivots):
            if row[f]:
                v[p] = -row[f]
        basis.append(v)
    return basis


def _zero_like(m):
    for row in m:
        for v in row:
            return v - v
    return 0


def mat_vec(m: Sequence[Sequence], v: Sequence):
    return [sum((a * b for a, b in zip(row, v) if a and b), 0) for row in m]


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v) if a and b), 0)


def transpose(m: Sequence[Sequence], nrows: int | None = None) -> list[list]:
    if not m:
        return [[] for _ in range(nrows or 0)]
    return [list(col) for col in zip(*m)]


def solve(m: Sequence[Sequence], rhs: Sequence):
    """One solution of ``m x = rhs`` (free variables set to 0), or None."""
    ncols = len(m[0]) if m else 0
    aug = [list(row) + [b] for row, b in zip(m, rhs)]
    echelon, _, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    zero = _zero_like(aug) if aug else 0
    x = [zero] * ncols
    for row, p in zip(echelon, pivots):
        x[p] = row[ncols]
    return x


@dataclass(frozen=True)
class SpanCertificate:
    """Witness for (non-)membership of a target vector in a column span.

    ``member``: ``columns @ combination == target``.
    ``non-member``: ``functional @ column == 0`` for every column and
    ``functional @ target == 1``.
    """

    kind: str
    combination: tuple | None = None
    functional: tuple | None = None

    @property
    def is_member(self) -> bool:
        return self.kind == "member"


def in_span(target: Sequence, columns: Sequence[Sequence]) -> SpanCertificate:
    """Decide whether ``target`` lies in the span of ``columns``."""
    m = len(target)
    if not columns:
        x = None
    else:
        a = transpose(columns)
        x = solve(a, target)
    if x is not None:
        return SpanCertificate("member", combination=tuple(x))
    # left kernel of the column matrix: vectors u with column . u == 0
    basis = nullspace([list(c) for c in columns], m) if columns else None
    if basis is None:
        zero = _zero_like([target])
        basis = [[zero + int(i == j) for j in range(m)] for i in range(m)]
    for u in basis:
        s = dot(u, target)
        if s:
            inv = _inv(s)
            return SpanCertificate(
                "non-member",
                functional=tuple(rat(v * inv) if isinstance(v, (int, Fraction)) else v * inv
                                 for v in u))
    raise ArithmeticError("target outside span but no separating functional found")


def verify_span_certificate(cert: SpanCertificate, target: Sequence,
                            columns: Sequence[Sequence]) -> bool:
    if cert.kind == "member":
        if cert.combination is None or len(cert.combination) != len(columns):
            return False
        acc = [0] * len(target)
        for c, col in zip(cert.combination, columns):
            if c:
                for i, v in enumerate(col):
                    if v:
                        acc[i] = acc[i] + c * v
        return all(a == t for a, t in zip(acc, target))
    if cert.kind == "non-member":
        u = cert.functional
        if u is None or len(u) != len(target):
            return False
        return all(not dot(u, col) for col in columns) and dot(u, target) == 1
    return False


def rank_mod_p(m: Sequence[Sequence], p: int) -> int:
    """Rank over F_p of an integer/rational matrix (a lower bound for the rational rank)."""
    rows = []
    for row in m:
        out = []
        for v in row:
            if isinstance(v, Fraction):
                out.append(v.numerator * pow(v.denominator, -1, p) % p)
            else:
                out.append(int(v) % p)
        rows.append(out)
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        prow = [v * inv % p for v in rows[r]]
        rows[r] = prow
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], prow)]
        r += 1
        if r == len(rows):
            break
    return r


class EchelonBasis:
    """Incrementally maintained reduced basis of a subspace of Q^m (sparse rows).

    Used to deduplicate large spanning sets by rank.
    """

    def __init__(self):
        self.rows: dict = {}  # pivot key -> sparse row with pivot coefficient 1

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        v = dict(vec)
        # basis rows are fully reduced, so one pass over present pivots suffices
        for key in [k for k in v if k in self.rows]:
            f = v.get(key)
            if not f:
                continue
            for k, c in self.rows[key].items():
                nv = v.get(k, 0) - f * c
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
        return v

    def add(self, vec: dict) -> bool:
        """Insert a vector; returns False when it was already in the span."""
        v = self.reduce(vec)
        if not v:
            return False
        key = min(v)
        inv = v[key]
        v = {k: rat(Fraction(c) / inv) for k, c in v.items()}
        for row in self.rows.values():
            f = row.get(key)
            if f:
                for k, c in v.items():
                    nv = row.get(k, 0) - f * c
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        self.rows[key] = v
        return True

"""Membership in symbolic and ordinary powers.

Symbolic powers of the ideal of a union of linear flats are tested by
order of vanishing: ``f`` lies in the m-th symbolic power iff every partial
derivative of order < m vanishes on every flat.  Ordinary powers are tested
degreewise by exact linear algebra, either against the products of given
generators or against products of graded pieces of the vanishing ideal
computed from the flats alone.
"""

from __future__ import annotations

import functools
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from ._parallel import pmap
from .arrangement import LineParam, flat_key_from_points
from .exactnum import QQ, CycNum, CyclotomicField, rat, rat_str, restrict_scalars
from .mpoly import Poly, PolyRing, Substitution, default_names, grevlex_key, monomials

GENERATOR_PRODUCTS = "generator-products"
DEGREEWISE_ORACLE = "degreewise-oracle"
_STRATEGY_ALIASES = {"gp": GENERATOR_PRODUCTS, "oracle": DEGREEWISE_ORACLE,
                     GENERATOR_PRODUCTS: GENERATOR_PRODUCTS, DEGREEWISE_ORACLE: DEGREEWISE_ORACLE}


class MembershipError(ValueError):
    pass


def strategy_name(strategy: str) -> str:
    try:
        return _STRATEGY_ALIASES[strategy]
    except KeyError:
        raise MembershipError(f"unknown strategy {strategy!r}") from None


# -- jets -------------------------------------------------------------------------

def jets(f: Poly, m: int) -> list[Poly]:
    """All distinct nonzero partial derivatives of f of order < m."""
    if m < 1:
        raise MembershipError("vanishing order must be >= 1")
    out = [f] if f else []
    layer = {(0,) * f.ring.nvars: f}
    for _ in range(m - 1):
        nxt = {}
        for idx, g in layer.items():
            for v in range(f.ring.nvars):
                key = idx[:v] + (idx[v] + 1,) + idx[v + 1:]
                if key in nxt:
                    continue
                d = g.partial_derivative(v)
                if d:
                    nxt[key] = d
        layer = nxt
        out.extend(layer[k] for k in sorted(layer, key=grevlex_key, reverse=True))
    return out


def _check_flat(flat: LineParam, nvars: int):
    if not flat.points or any(len(p) != nvars for p in flat.points):
        raise MembershipError("degenerate flat: wrong coordinate count")
    if linalg.rank([list(p) for p in flat.points]) < len(flat.points):
        raise MembershipError("degenerate flat: dependent spanning points")


def _jets_vanish(derivs: Sequence[Poly], flat: LineParam) -> bool:
    sub = Substitution(flat.points, derivs[0].ring if derivs else len(flat.points[0]))
    return all(sub.is_zero_on(g) for g in derivs)


def vanishing_order_at_least(f: Poly, flat: LineParam, m: int) -> bool:
    """True iff every derivative of f of order < m restricts to 0 on the flat."""
    if not f.is_homogeneous():
        raise MembershipError("polynomial is not homogeneous")
    _check_flat(flat, f.ring.nvars)
    return _jets_vanish(jets(f, m), flat)


def vanishing_order(f: Poly, flat: LineParam, limit: int | None = None) -> int:
    """Largest m with f vanishing to order m along the flat (capped at ``limit``)."""
    if not f:
        raise MembershipError("the zero polynomial vanishes to every order")
    limit = f.degree() + 1 if limit is None else limit
    _check_flat(flat, f.ring.nvars)
    sub = Substitution(flat.points, f.ring)
    m = 0
    layer = [f]
    while m < limit:
        if not all(sub.is_zero_on(g) for g in layer):
            return m
        m += 1
        layer = [d for g in layer for v in range(f.ring.nvars)
                 if (d := g.partial_derivative(v))]
        layer = list(dict.fromkeys(layer))
    return m


def symbolic_power_member(f: Poly, flats: Sequence[LineParam], m: int) -> bool:
    """Order-m vanishing along every flat (membership in the m-th symbolic power)."""
    return all(symbolic_power_report(f, flats, m)["per_flat"])


def symbolic_power_report(f: Poly, flats: Sequence[LineParam], m: int) -> dict:
    if not flats:
        raise MembershipError("empty flat list")
    if not f.is_homogeneous():
        raise MembershipError("polynomial is not homogeneous")
    for fl in flats:
        _check_flat(fl, f.ring.nvars)
    derivs = jets(f, m)
    per_flat = pmap(functools.partial(_jets_vanish, derivs), flats)
    return {"m": m, "flats": len(flats), "jets": len(derivs), "per_flat": per_flat,
            "member": all(per_flat)}


# -- graded pieces of the vanishing ideal -------------------------------------------

def _order_of(flats: Sequence[LineParam]) -> int:
    orders = {c.order for fl in flats for p in fl.points for c in p if isinstance(c, CycNum)}
    if len(orders) > 1:
        raise MembershipError("flats mix cyclotomic fields")
    return orders.pop() if orders else 1


def torus_stable(flats: Sequence[LineParam], n: int) -> bool:
    """Whether scaling any single coordinate by a primitive n-th root permutes the flats."""
    if n <= 1:
        return False
    K = CyclotomicField(n)
    z = K.root_of_unity(1)
    keys = {flat_key_from_points(fl.points, K) for fl in flats}
    nv = len(flats[0].points[0])
    for fl in flats:
        for i in range(nv):
            pts = [tuple(c * z if j == i else c for j, c in enumerate(p)) for p in fl.points]
            if flat_key_from_points(pts, K) not in keys:
                return False
    return True


def monomial_class(e, n: int) -> tuple:
    return tuple(v % n for v in e)


def _flat_conditions(flat: LineParam, mons: tuple) -> list[dict]:
    """Rational linear conditions (unknown index -> coeff) for vanishing on one flat."""
    sub = Substitution(flat.points, len(flat.points[0]))
    by_param: dict = defaultdict(dict)
    for idx, e in enumerate(mons):
        for pm, c in sub.monomial(e).items():
            if c:
                by_param[pm][idx] = c
    rows = []
    for pm in sorted(by_param):
        cond = {k: v for k, v in by_param[pm].items() if v}
        for row in restrict_scalars(cond) if cond else []:
            if row:
                rows.append(row)
    return rows


@functools.lru_cache(maxsize=256)
def _graded_piece_cached(flats: tuple, d: int, names: tuple, split: bool) -> tuple:
    nv = len(names)
    mons = tuple(monomials(nv, d))
    n = _order_of(flats)
    if split:
        groups: dict = defaultdict(list)
        for i, e in enumerate(mons):
            groups[monomial_class(e, n)].append(i)
        group_list = [groups[k] for k in sorted(groups)]
    else:
        group_list = [list(range(len(mons)))]
    conditions = pmap(functools.partial(_flat_conditions, mons=mons), flats)
    all_rows = [row for rows in conditions for row in rows]
    ring = PolyRing(names, QQ)
    basis = []
    for group in group_list:
        local = {g: i for i, g in enumerate(group)}
        gset = set(group)
        mat = []
        for row in all_rows:
            if gset.isdisjoint(row):
                continue
            dense = [0] * len(group)
            for k, v in row.items():
                if k in gset:
                    dense[local[k]] = v
            mat.append(dense)
        if mat:
            kernel = linalg.nullspace(mat, len(group))
        else:
            kernel = [[int(i == j) for j in range(len(group))] for i in range(len(group))]
        for vec in kernel:
            basis.append(Poly(ring, {mons[g]: rat(vec[local[g]]) for g in group if vec[local[g]]}))
    return tuple(basis)


def graded_piece_of_vanishing_ideal(flats: Sequence[LineParam], d: int,
                                    ring: PolyRing | None = None,
                                    split: bool | None = None) -> list[Poly]:
    """Basis over Q of the degree-d forms vanishing on every flat.

    When the flats are stable under coordinate scaling by n-th roots of
    unity (checked, not assumed) the computation splits by exponent
    residues mod n, since the vanishing ideal is then graded by them.
    """
    if d < 0:
        raise MembershipError("degree must be >= 0")
    if not flats:
        raise MembershipError("empty flat list")
    nv = len(flats[0].points[0])
    names = ring.names if ring is not None else default_names(nv - 1)
    flats = tuple(flats)
    if split is None:
        split = torus_stable(flats, _order_of(flats))
    return list(_graded_piece_cached(flats, d, tuple(names), bool(split)))


# -- ordinary power membership --------------------------------------------------------

@dataclass(frozen=True)
class MembershipQuery:
    """f against either (generators, r) or (flats, m).

    ``codim`` records the codimension of the flats, when known, as metadata.
    """

    f: Poly
    generators: tuple | None = None
    flats: tuple | None = None
    r: int | None = None
    m: int | None = None
    codim: int | None = None

    def __post_init__(self):
        if not self.f.is_homogeneous():
            raise MembershipError("non-homogeneous input is rejected")
        if self.r is None and self.m is None:
            raise MembershipError("query needs a power r or a symbolic power m")
        if (self.r is not None and self.r < 1) or (self.m is not None and self.m < 1):
            raise MembershipError("powers must be >= 1")
        if self.generators is not None:
            for g in self.generators:
                if not g.is_homogeneous():
                    raise MembershipError("generators must be homogeneous")

    @property
    def degree(self) -> int:
        return self.f.degree()


@dataclass
class MembershipResult:
    verdict: str
    strategy: str
    degree: int
    power: int
    span_dimension: int | None = None
    rows: int | None = None
    columns: int | None = None
    certificate: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)

    @property
    def is_member(self) -> bool:
        return self.verdict == "member"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "strategy": self.strategy,
            "degree": self.degree,
            "power": self.power,
            "span_dimension": self.span_dimension,
            "rows": self.rows,
            "columns": self.columns,
            "certificate": self.certificate,
            "diagnostics": list(self.diagnostics),
        }


def generator_product_columns(generators: Sequence[Poly], r: int, d: int):
    """Labels and polynomials mu * g_i1 * ... * g_ir of degree d.

    Labels are ``(indices, mu)`` with 1-based, non-decreasing generator indices.
    """
    nv = generators[0].ring.nvars
    labels, cols = [], []
    for combo in itertools.combinations_with_replacement(range(len(generators)), r):
        prod = generators[combo[0]]
        for i in combo[1:]:
            prod = prod * generators[i]
        rest = d - prod.degree()
        if rest < 0:
            continue
        for mu in monomials(nv, rest):
            terms = {tuple(a + b for a, b in zip(e, mu)): c for e, c in prod.terms.items()}
            labels.append((tuple(i + 1 for i in combo), mu))
            cols.append(terms)
    return labels, cols


def _components(columns: Sequence[dict]) -> list[tuple[list, list]]:
    """Connected components of the row/column incidence graph.

    Returns (row keys sorted descending grevlex, column indices) per
    component, ordered by leading row.
    """
    parent: dict = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for col in columns:
        keys = iter(col)
        first = next(keys, None)
        if first is None:
            continue
        parent.setdefault(first, first)
        ra = find(first)
        for k in keys:
            parent.setdefault(k, k)
            rb = find(k)
            if rb != ra:
                parent[rb] = ra
    rows_of: dict = defaultdict(list)
    for k in parent:
        rows_of[find(k)].append(k)
    cols_of: dict = defaultdict(list)
    for j, col in enumerate(columns):
        if col:
            cols_of[find(next(iter(col)))].append(j)
    comps = []
    for root, rows in rows_of.items():
        rows.sort(key=grevlex_key, reverse=True)
        comps.append((rows, cols_of[root]))
    comps.sort(key=lambda rc: grevlex_key(rc[0][0]), reverse=True)
    return comps


def span_decision(target: dict, columns: Sequence[dict], prime: int | None = None):
    """Exact span test split over connected components.

    Returns ``(kind, payload, rank)``: payload is {column index: coefficient}
    for members and {row key: value} (a functional) for non-members.  With
    ``prime`` set, components of full row rank modulo p skip the exact rank
    computation (rank over Q is at least rank mod p); certificates are
    always computed exactly.
    """
    comps = _components(columns)
    covered = {}
    for ci, (rows, _) in enumerate(comps):
        for k in rows:
            covered[k] = ci
    total_rank = 0
    combination: dict = {}
    functional = None
    stray = sorted((k for k in target if k not in covered), key=grevlex_key, reverse=True)
    if stray:
        k = stray[0]
        functional = {k: rat(Fraction(1) / Fraction(target[k]))}
    touched = {covered[k] for k in target if k in covered}
    for ci, (rows, cols) in enumerate(comps):
        index = {k: i for i, k in enumerate(rows)}
        mat = []
        for j in cols:
            v = [0] * len(rows)
            for k, c in columns[j].items():
                v[index[k]] = c
            mat.append(v)
        if prime is not None and linalg.rank_mod_p(mat, prime) == len(rows):
            total_rank += len(rows)
        else:
            total_rank += linalg.rank(mat)
        if ci not in touched or functional is not None:
            continue
        t = [target.get(k, 0) for k in rows]
        cert = linalg.in_span(t, mat)
        if cert.is_member:
            for j, c in zip(cols, cert.combination):
                if c:
                    combination[j] = rat(c)
        else:
            functional = {rows[i]: rat(u) for i, u in enumerate(cert.functional) if u}
    if functional is not None:
        return "non-member", functional, total_rank
    return "member", combination, total_rank


def _functional_json(functional: dict) -> list:
    return [[list(k), rat_str(v)] for k, v in
            sorted(functional.items(), key=lambda kv: grevlex_key(kv[0]), reverse=True)]


def _functional_from_json(data) -> dict:
    return {tuple(k): rat(Fraction(v)) for k, v in data}


def _pair_value(functional: dict, col: dict):
    return sum((functional[k] * c for k, c in col.items() if k in functional), 0)


def power_piece_spanning_set(flats: Sequence[LineParam], d: int, r: int,
                             ring: PolyRing | None = None) -> list[Poly]:
    """Independent products spanning (I^r)_d, I the vanishing ideal of the flats."""
    flats = tuple(flats)
    nv = len(flats[0].points[0])
    ring = ring or PolyRing(default_names(nv - 1), QQ)
    n = _order_of(flats)
    split = torus_stable(flats, n)
    return list(_power_piece(flats, d, r, ring.names, split, n))


@functools.lru_cache(maxsize=64)
def _power_piece(flats, d, r, names, split, n) -> tuple:
    ring = PolyRing(names, QQ)
    if r == 1:
        return tuple(graded_piece_of_vanishing_ideal(flats, d, ring, split))
    bases: dict = {}
    keep = []

    def cls(p):
        e = next(iter(p.terms))
        return monomial_class(e, n) if split else ()

    for d1 in range(1, d):
        left = graded_piece_of_vanishing_ideal(flats, d1, ring, split)
        if not left:
            continue
        if r == 2 and d1 > d - d1:
            break
        right = _power_piece(flats, d - d1, r - 1, names, split, n)
        if not right:
            continue
        for a in left:
            for b in right:
                prod = a * b
                eb = bases.setdefault(cls(prod), linalg.EchelonBasis())
                if eb.add(prod.terms):
                    keep.append(prod)
    return tuple(keep)


def power_membership(f: Poly, source, r: int, strategy: str = GENERATOR_PRODUCTS,
                     prime: int | None = None) -> MembershipResult:
    """Decide f in I^r by exact linear algebra in degree deg f.

    ``source`` is a generator sequence for the generator-products strategy
    and a flat sequence for the degreewise oracle.
    """
    strategy = strategy_name(strategy)
    if not f.is_homogeneous():
        raise MembershipError("non-homogeneous input is rejected")
    if r < 1:
        raise MembershipError("power must be >= 1")
    d = f.degree()
    if strategy == GENERATOR_PRODUCTS:
        gens = list(source)
        labels, cols = generator_product_columns(gens, r, d)
        if not cols:
            return _vacuous(f, strategy, d, r)
    else:
        spanning = power_piece_spanning_set(source, d, r, f.ring.with_field(QQ))
        labels = None
        cols = [p.terms for p in spanning]
        if not cols:
            return _vacuous(f, strategy, d, r)
    kind, payload, rank = span_decision(f.terms, cols, prime)
    nrows = len(set().union(*cols) | set(f.terms))
    res = MembershipResult(kind, strategy, d, r, span_dimension=rank, rows=nrows, columns=len(cols))
    if kind == "member":
        if labels is not None:
            res.certificate = {"combination": [
                {"generators": list(labels[j][0]), "monomial": list(labels[j][1]),
                 "coefficient": rat_str(c)} for j, c in sorted(payload.items())]}
        else:
            res.certificate = {"combination": [
                {"column": j, "coefficient": rat_str(c)} for j, c in sorted(payload.items())]}
    else:
        res.certificate = {"functional": _functional_json(payload)}
    return res


def _vacuous(f, strategy, d, r) -> MembershipResult:
    res = MembershipResult("non-member", strategy, d, r, span_dimension=0, rows=len(f.terms),
                           columns=0)
    res.diagnostics.append(
        f"degree {d} is below the least degree of any product of {r} generators; "
        "the degree-d piece of the power is zero")
    if f:
        k = max(f.terms, key=grevlex_key)
        res.certificate = {"functional": _functional_json({k: rat(Fraction(1) / Fraction(f.terms[k]))})}
    return res


def query_columns(query: MembershipQuery, strategy: str) -> list[dict]:
    strategy = strategy_name(strategy)
    if strategy == GENERATOR_PRODUCTS:
        return generator_product_columns(list(query.generators), query.r, query.degree)[1]
    return [p.terms for p in power_piece_spanning_set(query.flats, query.degree, query.r,
                                                     query.f.ring.with_field(QQ))]


def verify_membership_certificate(res: MembershipResult, query: MembershipQuery) -> bool:
    """Re-check a result against its query from scratch.

    Members: the combination is reassembled and compared with f.
    Non-members: the functional must vanish on every spanning column and
    take the value 1 on f.
    """
    cert = res.certificate
    try:
        if res.verdict == "member":
            if res.strategy == GENERATOR_PRODUCTS:
                gens = list(query.generators)
                acc = query.f.ring.zero()
                for item in cert["combination"]:
                    prod = query.f.ring.monomial(tuple(item["monomial"]), rat(Fraction(item["coefficient"])))
                    for i in item["generators"]:
                        prod = prod * gens[i - 1]
                    acc = acc + prod
                return acc == query.f
            cols = query_columns(query, res.strategy)
            acc: dict = {}
            for item in cert["combination"]:
                c = rat(Fraction(item["coefficient"]))
                for k, v in cols[item["column"]].items():
                    acc[k] = acc.get(k, 0) + c * v
            return {k: v for k, v in acc.items() if v} == query.f.terms
        if res.verdict == "non-member":
            functional = _functional_from_json(cert["functional"])
            if _pair_value(functional, query.f.terms) != 1:
                return False
            cols = query_columns(query, res.strategy)
            return all(not _pair_value(functional, col) for col in cols)
    except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError):
        return False
    return False

from __future__ import annotations

import itertools
import random
from collections import Counter
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from fermatlines import linalg
from fermatlines.arrangement import (LatticeIndex, arrangement_census, arrangement_from_forms,
                                     census, fermat_planes, flat_key_from_points, hunt_identity,
                                     intersection_lattice, lattice_lines_with_multiplicity,
                                     pair_identity, restricted_config_lines)
from fermatlines.exactnum import QQ, PrimeField


def brute_census(arr):
    """Group plane pairs/triples by the nullspace they cut out; no lattice code involved."""
    forms = [list(h.coeffs) for h in arr.forms]
    nv = arr.N + 1

    def key(rows):
        ech, _, _ = linalg.rref(rows, nv)
        return tuple(tuple(r) for r in ech)

    t = Counter()
    by_codim = {}
    for size in range(2, arr.N + 1):
        found = {}
        for S in itertools.combinations(range(arr.d), size):
            rows = [forms[i] for i in S]
            if linalg.rank(rows) != size:
                continue
            k = key(rows)
            if k in found:
                continue
            ker = linalg.nullspace(rows, nv)
            found[k] = sum(1 for f in forms if all(not linalg.dot(f, p) for p in ker))
        by_codim[size] = found
        for mult in found.values():
            t[(arr.N - size, mult)] += 1
    t[(arr.N - 1, 1)] = arr.d
    return dict(t)


def test_braid_planes():
    arr = fermat_planes(3, 1)
    assert arr.d == 6
    forms = {h.coeffs for h in arr.forms}
    expect = set()
    for i, j in itertools.combinations(range(4), 2):
        v = [0] * 4
        v[i], v[j] = 1, -1
        expect.add(tuple(v))
    assert forms == expect


def test_plane_counts():
    assert fermat_planes(3, 3).d == 18
    assert fermat_planes(2, 3).d == 9


def test_generic_planes():
    arr = arrangement_from_forms([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)], QQ)
    c = arrangement_census(arr)
    assert c.level(0) == {3: 1} and c.level(1) == {2: 3}


def test_coordinate_tetrahedron():
    arr = arrangement_from_forms([tuple(int(i == j) for j in range(4)) for i in range(4)], QQ)
    c = arrangement_census(arr)
    assert c.level(1) == {2: 6} and c.level(0) == {3: 4}
    assert hunt_identity(c)["lhs"] == 4 and hunt_identity(c)["holds"]


def test_duplicate_planes_rejected():
    arr = arrangement_from_forms([(1, 0, 0, 0), (2, 0, 0, 0), (0, 1, 0, 0)], QQ)
    with pytest.raises(ValueError):
        intersection_lattice(arr)


def test_pencil():
    arr = arrangement_from_forms([(1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0)], QQ)
    c = arrangement_census(arr)
    assert c.level(1) == {3: 1} and c.level(0) == {}
    h = hunt_identity(c)
    assert (h["lhs"], h["first_sum"], h["second_sum"]) == (1, 0, -1) and h["holds"]


def test_fermat_n2_merges():
    # at n = 2 the coordinate edges (multiplicity n) join the 3n^2 double lines
    # and the vertices (multiplicity 3n) join the n^3 six-fold points
    c = arrangement_census(fermat_planes(3, 2))
    assert c.level(1) == {2: 12 + 6, 3: 16}
    assert c.level(0) == {3: 12, 6: 8 + 4}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_census_against_brute_force(n):
    arr = fermat_planes(3, n)
    assert arrangement_census(arr).t == brute_census(arr)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_planar_census_against_brute_force(n):
    arr = fermat_planes(2, n)
    assert arrangement_census(arr).t == brute_census(arr)


def test_fermat_n4_tables():
    c = arrangement_census(fermat_planes(3, 4))
    assert c.level(1) == {2: 48, 3: 64, 4: 6}
    assert c.level(0) == {5: 24, 6: 64, 12: 4}
    assert c.incidences == {(12, 4): 12, (12, 3): 64, (5, 4): 24, (5, 2): 96,
                            (6, 3): 256, (6, 2): 192}


def test_fermat_n3_merged_tables():
    c = arrangement_census(fermat_planes(3, 3))
    assert c.level(1) == {2: 27, 3: 42}
    assert c.level(0) == {4: 18, 6: 27, 9: 4}


def test_braid_tables():
    c = arrangement_census(fermat_planes(3, 1))
    assert c.level(1) == {2: 3, 3: 4}


def test_incidences_against_direct_count():
    arr = fermat_planes(3, 3)
    flats = intersection_lattice(arr)
    pts = [X.spanning_points()[0] for X in flats if X.dim == 0]
    mult_pt = [X.multiplicity for X in flats if X.dim == 0]
    inc = Counter()
    for L in (X for X in flats if X.dim == 1):
        for p, m in zip(pts, mult_pt):
            if all(not linalg.dot(row, p) for row in L.basis):
                inc[(m, L.multiplicity)] += 1
    assert census(flats, arr.d, 3).incidences == dict(inc)


def test_pair_identity_examples():
    c = arrangement_census(fermat_planes(3, 1))
    assert pair_identity(c)["lhs"] == 15 == pair_identity(c)["rhs"]
    c = arrangement_census(fermat_planes(3, 4))
    p = pair_identity(c)
    assert p["lhs"] == 276 == 48 + 64 * 3 + 6 * 6 == p["rhs"]
    assert p["lhs"] == 18 * 16 - 12
    generic = arrangement_census(arrangement_from_forms([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)], QQ))
    assert pair_identity(generic)["holds"] and pair_identity(generic)["lhs"] == 3


def test_hunt_identity_fermat_n4():
    h = hunt_identity(arrangement_census(fermat_planes(3, 4)))
    assert h["lhs"] == comb(24, 3) == 2024
    assert h["first_sum"] == 64 * 20 + 24 * 10 + 4 * 220 == 2400
    assert h["second_sum"] == 256 + 120 == 376
    assert h["holds"]


def test_hunt_requires_n3():
    with pytest.raises(ValueError):
        hunt_identity(arrangement_census(fermat_planes(2, 3)))


@pytest.mark.parametrize("n, expected", [(3, 42), (4, 70), (5, 106)])
def test_restricted_config_counts(n, expected):
    lines = restricted_config_lines(n)
    assert len(lines) == expected == 4 * n * n + 6
    assert sum(L.multiplicity == n for L in lines if L.label.startswith("edge")) == 6


@pytest.mark.parametrize("n", [3, 4])
def test_restricted_lines_are_lattice_lines(n):
    arr = fermat_planes(3, n)
    lattice = {X.key: X.multiplicity for X in lattice_lines_with_multiplicity(intersection_lattice(arr), 3)}
    for L in restricted_config_lines(n):
        k = flat_key_from_points(L.points, arr.field)
        assert lattice.pop(k) == L.multiplicity
    assert not lattice


def test_restricted_config_small_n():
    with pytest.raises(ValueError):
        restricted_config_lines(2)


@pytest.mark.parametrize("n, p", [(3, 7), (4, 13), (3, 13)])
def test_prime_field_census_matches(n, p):
    a = arrangement_census(fermat_planes(3, n))
    b = arrangement_census(fermat_planes(3, n, PrimeField(p)))
    assert a.t == b.t and a.incidences == b.incidences


# -- sub-arrangements ------------------------------------------------------------

_INDEX = {}


def _index(N, n):
    if (N, n) not in _INDEX:
        _INDEX[(N, n)] = LatticeIndex(fermat_planes(N, n))
    return _INDEX[(N, n)]


@settings(max_examples=40)
@given(st.sampled_from([(3, 2), (3, 3), (2, 4), (3, 1)]), st.randoms(use_true_random=False))
def test_restricted_lattice_matches_direct(case, rng):
    N, n = case
    idx = _index(N, n)
    size = rng.randint(3, idx.arr.d)
    S = sorted(rng.sample(range(idx.arr.d), size))
    derived = census(idx.restrict(S), size, N)
    direct = arrangement_census(idx.arr.subarrangement(S))
    assert derived.t == direct.t
    assert derived.incidences == direct.incidences


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_identities_on_random_subarrangements(n):
    idx = _index(3, n)
    rng = random.Random(n)
    for _ in range(40):
        size = rng.randint(3, idx.arr.d)
        S = rng.sample(range(idx.arr.d), size)
        c = census(idx.restrict(S), size, 3)
        assert pair_identity(c)["holds"]
        assert hunt_identity(c)["holds"]

from __future__ import annotations

import copy
import json
from importlib.resources import files

import jsonschema
import pytest

from fermatlines.certify import (ASSUMPTIONS, certify_report, digest, forced_coefficient,
                                 obstruction_report, obstruction_targets,
                                 reduce_products_mod_var, search_constraints, sign)
from fermatlines.fermat import fermat_poly, restricted_ideal_generators
from fermatlines.mpoly import monomials


def schema(name):
    return json.loads(files("fermatlines").joinpath("schemas", name).read_text())


def nonzero_pairs(products):
    return {p for p, q in products.items() if q}


def pairs_among(idx):
    return {(i, j) for i in idx for j in idx if i <= j}


def test_reduction_supports():
    G = restricted_ideal_generators(3)
    assert nonzero_pairs(reduce_products_mod_var(G, 0)) == pairs_among([2, 4, 6])
    assert nonzero_pairs(reduce_products_mod_var(G, 2)) == pairs_among([1, 4, 5])
    assert len(reduce_products_mod_var(G, 0)) == 21


def test_reduction_two_variables_kills_everything():
    G = restricted_ideal_generators(3)
    for i in range(6):
        for j in range(i, 6):
            assert not (G[i] * G[j]).set_var_zero(0).set_var_zero(1)


def brute_constraint(target, var, n):
    """Coefficient of target in mu * (g_i g_j mod x_var) for every pair and every mu."""
    G = restricted_ideal_generators(n)
    R = G.ring
    hits = {}
    for (i, j), prod in reduce_products_mod_var(G, var).items():
        for mu in monomials(4, 2 * n - 4):
            c = (R.monomial(mu) * prod).coefficient_of(target)
            if c:
                hits[((i, j), mu)] = c
    rhs = fermat_poly(3, n).set_var_zero(var).coefficient_of(target)
    return hits, rhs


@pytest.mark.parametrize("n", [3, 4, 5])
def test_forced_coefficients_match_brute_force(n):
    mu = (0, n - 2, 0, n - 2)
    expected = {0: -1, 2: 1}
    for target, var in obstruction_targets(n):
        c = forced_coefficient(target, var, n)
        hits, rhs = brute_constraint(target, var, n)
        assert hits == {((4, 4), mu): 1}
        assert c.status == "forced"
        assert c.unknown == ((4, 4), mu)
        assert c.rhs == rhs == expected[var]
        assert c.forced_value == expected[var]


def test_vacuous_target():
    c = forced_coefficient((0, 18, 0, 0), 0, 3)
    assert c.status == "vacuous" and c.rhs == 0 and not c.unknowns


def test_target_validation():
    with pytest.raises(ValueError):
        forced_coefficient((0, 3, 2, 1), 0, 3)
    with pytest.raises(ValueError):
        forced_coefficient((1, 9, 5, 3), 0, 3)


def test_exclusion_reasons_mention_large_powers():
    c = forced_coefficient((0, 9, 6, 3), 0, 3)
    assert (2, 2) in c.exclusions
    assert "power too large" in c.exclusions[(2, 2)]


@pytest.mark.parametrize("n", [3, 4, 5])
def test_obstruction_inconsistent(n):
    rep = obstruction_report(n)
    assert not rep.consistent
    assert sorted(c.forced_value for c in rep.constraints) == [-1, 1]
    assert len({c.unknown for c in rep.constraints}) == 1


def test_obstruction_small_n():
    with pytest.raises(ValueError, match="n >= 3"):
        obstruction_report(2)


def test_search_recovers_targets():
    found = search_constraints(3, 0)
    assert (0, 9, 6, 3) in {c.target for c in found}
    assert all(c.status in ("forced", "contradiction") for c in found)


def test_digest_detects_tampering():
    payload = {"a": 1, "b": [1, 2]}
    signed = sign(payload)
    assert signed["digest"] == digest(payload)
    tampered = dict(signed)
    tampered["b"] = [1, 3]
    body = {k: v for k, v in tampered.items() if k != "digest"}
    assert digest(body) != signed["digest"]


def test_certify_report_n3():
    rep = certify_report(3)
    jsonschema.validate(rep, schema("certify.v1.json"))
    assert rep["verdict"] == "non-member"
    assert rep["jet_check"]["member"] and not rep["jet_check"]["order_4_member"]
    assert rep["span_check"]["verified"]
    assert not rep["obstruction"]["consistent"]
    assert rep["assumptions"] == ASSUMPTIONS
    body = {k: v for k, v in rep.items() if k != "digest"}
    assert digest(body) == rep["digest"]
    assert certify_report(3) == rep


def test_certify_report_tamper():
    rep = certify_report(3)
    bad = copy.deepcopy(rep)
    bad["span_check"]["rank"] += 1
    body = {k: v for k, v in bad.items() if k != "digest"}
    assert digest(body) != bad["digest"]

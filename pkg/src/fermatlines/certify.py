"""Coefficient obstruction for F_n in I_n^2, and the certification report.

A hypothetical identity F = sum h_ij g_i g_j with deg h_ij = 2n - 4 is
reduced modulo one variable.  For a chosen target monomial T the
coefficient of T on the right is a linear expression in the coefficients
of the h_ij; it is found by scanning the supports of the reduced products
for terms dividing T.  When exactly one unknown appears, its value is
forced.  Two forced values for the same unknown that disagree are a
contradiction.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .exactnum import rat, rat_str
from .fermat import fermat_poly, restricted_ideal_generators, GeneratorSet
from .membership import (GENERATOR_PRODUCTS, MembershipQuery, power_membership,
                         symbolic_power_report, verify_membership_certificate)
from .arrangement import restricted_config_lines
from .mpoly import monomials

SCHEMA_VERSION = "v1"
ASSUMPTIONS = ["the six generators generate the ideal in every degree above 6n"]


def _mono_str(e, names) -> str:
    parts = [n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k]
    return "*".join(parts) or "1"


def reduce_products_mod_var(G: GeneratorSet, var: int) -> dict:
    """All products g_i g_j (1 <= i <= j <= 6) modulo (x_var), zeros included."""
    if not 0 <= var < G.ring.nvars:
        raise ValueError("variable index out of range")
    reduced = [g.set_var_zero(var) for g in G.generators]
    out = {}
    for i, j in itertools.combinations_with_replacement(range(len(reduced)), 2):
        out[(i + 1, j + 1)] = reduced[i] * reduced[j]
    return out


@dataclass
class Constraint:
    """Coefficient equation for one target monomial after reduction modulo a variable.

    ``unknowns`` lists (pair, monomial of h_pair, coefficient) triples; the
    equation is sum(coefficient * h_pair[monomial]) = rhs.
    """

    target: tuple
    var: int
    rhs: object
    unknowns: list
    status: str  # forced | vacuous | contradiction | underdetermined
    forced_value: object = None
    exclusions: dict = field(default_factory=dict)

    @property
    def unknown(self):
        if self.status != "forced":
            return None
        pair, mono, _ = self.unknowns[0]
        return (pair, mono)

    def to_json(self, names) -> dict:
        out = {
            "target": list(self.target),
            "target_text": _mono_str(self.target, names),
            "reduced_variable": names[self.var],
            "rhs": rat_str(self.rhs),
            "status": self.status,
            "unknowns": [{"pair": list(p), "monomial": list(m), "monomial_text": _mono_str(m, names),
                          "coefficient": rat_str(c)} for p, m, c in self.unknowns],
            "forced_value": None if self.forced_value is None else rat_str(self.forced_value),
            "exclusions": [{"pair": list(p), "reason": r} for p, r in sorted(self.exclusions.items())],
        }
        return out


def _exclusion_reason(poly, target, names) -> str:
    """Why no term of ``poly`` divides ``target``: variables whose power is too large."""
    if not poly:
        return "product vanishes modulo the variable"
    too_large = set()
    for e in poly.terms:
        bad = [names[i] for i, (a, b) in enumerate(zip(e, target)) if a > b]
        too_large.add(" or ".join(bad))
    return "power too large in every term: " + "; ".join(sorted(too_large))


def forced_coefficient(target, var: int, n: int, G: GeneratorSet | None = None,
                       F=None, products: dict | None = None) -> Constraint:
    """Which unknown coefficients the coefficient of ``target`` constrains."""
    G = G or restricted_ideal_generators(n)
    target = tuple(target)
    if sum(target) != 6 * n:
        raise ValueError(f"target degree {sum(target)} does not match 6n = {6 * n}")
    if target[var]:
        raise ValueError("target involves the reduced variable")
    F = F if F is not None else fermat_poly(3, n)
    products = products if products is not None else reduce_products_mod_var(G, var)
    names = G.ring.names
    rhs = F.set_var_zero(var).coefficient_of(target)
    unknowns = []
    exclusions = {}
    for pair in sorted(products):
        prod = products[pair]
        hits = []
        for e, c in prod.terms.items():
            if all(a <= b for a, b in zip(e, target)):
                mu = tuple(b - a for a, b in zip(e, target))
                hits.append((pair, mu, c))
        if hits:
            unknowns.extend(sorted(hits, key=lambda h: h[1]))
        else:
            exclusions[pair] = _exclusion_reason(prod, target, names)
    combined: dict = {}
    for pair, mu, c in unknowns:
        combined[(pair, mu)] = combined.get((pair, mu), 0) + c
    unknowns = [(p, m, c) for (p, m), c in sorted(combined.items()) if c]
    if not unknowns:
        status = "vacuous" if not rhs else "contradiction"
        return Constraint(target, var, rhs, [], status, None, exclusions)
    if len(unknowns) == 1:
        _, _, c = unknowns[0]
        value = rat(Fraction(rhs) / Fraction(c))
        return Constraint(target, var, rhs, unknowns, "forced", value, exclusions)
    return Constraint(target, var, rhs, unknowns, "underdetermined", None, exclusions)


def obstruction_targets(n: int) -> list[tuple[tuple, int]]:
    """y^{3n} z^{2n} w^n modulo (x), and x^{2n} y^{3n} w^n modulo (z)."""
    return [((0, 3 * n, 2 * n, n), 0), ((2 * n, 3 * n, 0, n), 2)]


@dataclass
class ObstructionReport:
    n: int
    constraints: list
    consistent: bool
    narrative: list

    def to_json(self, names=("x", "y", "z", "w")) -> dict:
        return {"n": self.n, "consistent": self.consistent,
                "constraints": [c.to_json(names) for c in self.constraints],
                "narrative": list(self.narrative)}


def _consistency(constraints) -> bool:
    seen: dict = {}
    for c in constraints:
        if c.status == "contradiction":
            return False
        if c.status != "forced":
            continue
        key = c.unknown
        if key in seen and seen[key] != c.forced_value:
            return False
        seen.setdefault(key, c.forced_value)
    return True


def obstruction_report(n: int) -> ObstructionReport:
    if n < 3:
        raise ValueError(
            f"n = {n}: the h_ij would have degree 2n - 4 = {2 * n - 4} < 2; "
            "the obstruction argument needs n >= 3")
    G = restricted_ideal_generators(n)
    F = fermat_poly(3, n)
    names = G.ring.names
    constraints = []
    narrative = []
    for target, var in obstruction_targets(n):
        products = reduce_products_mod_var(G, var)
        c = forced_coefficient(target, var, n, G, F, products)
        constraints.append(c)
        alive = [p for p, q in sorted(products.items()) if q]
        narrative.append(
            f"modulo ({names[var]}): surviving products "
            + ", ".join(f"g{i}g{j}" for i, j in alive)
            + f"; coefficient of {_mono_str(target, names)} on the left is {rat_str(c.rhs)}")
        if c.status == "forced":
            (pair, mu, coeff), = c.unknowns
            narrative.append(
                f"only h_{pair[0]},{pair[1]} reaches it, through its coefficient of "
                f"{_mono_str(mu, names)} (multiplier {rat_str(coeff)}), forcing {rat_str(c.forced_value)}")
        else:
            narrative.append(f"status {c.status}: {len(c.unknowns)} unknowns involved")
    consistent = _consistency(constraints)
    narrative.append("contradiction: the same coefficient is forced to two different values"
                     if not consistent else "no contradiction found")
    return ObstructionReport(n, constraints, consistent, narrative)


def search_constraints(n: int, var: int) -> list[Constraint]:
    """Every degree-6n target avoiding x_var whose coefficient equation has one unknown.

    No claim is made that these exhaust the available obstructions.
    """
    G = restricted_ideal_generators(n)
    F = fermat_poly(3, n)
    products = reduce_products_mod_var(G, var)
    out = []
    for e in monomials(4, 6 * n):
        if e[var]:
            continue
        c = forced_coefficient(e, var, n, G, F, products)
        if c.status in ("forced", "contradiction"):
            out.append(c)
    return out


def digest(payload: dict) -> str:
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(body.encode()).hexdigest()


def sign(payload: dict) -> dict:
    out = dict(payload)
    out["digest"] = digest(payload)
    return out


def certify_report(n: int) -> dict:
    """Run the jet check, the span check and the obstruction replay for F_n."""
    G = restricted_ideal_generators(n)
    F = fermat_poly(3, n)
    lines = restricted_config_lines(n)
    jet3 = symbolic_power_report(F, lines, 3)
    jet4 = symbolic_power_report(F, lines, 4)
    res = power_membership(F, G.generators, 2, GENERATOR_PRODUCTS)
    query = MembershipQuery(F, generators=G.generators, r=2, codim=2)
    verified = verify_membership_certificate(res, query)
    obstruction = obstruction_report(n)
    payload = {
        "schema": SCHEMA_VERSION,
        "n": n,
        "theorem": "symbolic3-not-in-square",
        "jet_check": {
            "m": 3,
            "lines": len(lines),
            "jets": jet3["jets"],
            "member": jet3["member"],
            "order_4_member": jet4["member"],
        },
        "span_check": {
            "strategy": res.strategy,
            "degree": res.degree,
            "rank": res.span_dimension,
            "rows": res.rows,
            "columns": res.columns,
            "verdict": res.verdict,
            "certificate": res.certificate,
            "verified": verified,
        },
        "obstruction": obstruction.to_json(G.ring.names),
        "verdict": res.verdict,
        "assumptions": list(ASSUMPTIONS),
    }
    return sign(payload)

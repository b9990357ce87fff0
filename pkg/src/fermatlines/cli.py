"""Command-line entry point.

Exit codes: 0 success, 1 an expected result did not reproduce, 2 usage
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import warnings
from collections import Counter
from dataclasses import dataclass

from . import arrangement as arr_mod
from .certify import SCHEMA_VERSION, certify_report, sign
from .exactnum import PrimeField
from .fermat import (FermatContext, fermat_poly, p2_fermat_ideal, p2_fermat_points,
                     p2_witness, restricted_ideal_generators)
from .membership import (MembershipQuery, power_membership, strategy_name,
                         symbolic_power_report, verify_membership_certificate)
from .mpoly import PolyRing, parse_poly

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    N: int = 3
    n: tuple = (3,)
    m: int | None = None
    r: int | None = None
    strategy: str = "gp"
    prime: int | None = None
    fmt: str = "json"
    output: str | None = None
    poly: str | None = None
    samples: int = 200
    seed: int = 0

    def validate(self):
        if self.prime is not None:
            try:
                PrimeField(self.prime)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            bad = [k for k in self.n if (self.prime - 1) % k]
            if bad:
                raise UsageError(f"prime mode needs p = 1 mod n; fails for n = {bad}")
        if self.subcommand in ("census", "identities", "check-symbolic", "check-power") \
                and self.N not in (2, 3):
            raise UsageError("N must be 2 or 3 for this subcommand")
        if self.N < 2:
            raise UsageError("N must be >= 2")
        if any(k < 1 for k in self.n):
            raise UsageError("n must be >= 1")


# -- expected values -----------------------------------------------------------

def expected_census(N: int, n: int) -> dict | None:
    """Generic Fermat counts with coinciding multiplicities merged (n >= 2 only)."""
    if n < 2:
        return None
    t = Counter()
    if N == 3:
        t[(2, 1)] += 6 * n
        t[(1, 2)] += 3 * n * n
        t[(1, 3)] += 4 * n * n
        t[(1, n)] += 6
        t[(0, 6)] += n ** 3
        t[(0, n + 1)] += 6 * n
        t[(0, 3 * n)] += 4
    elif N == 2:
        t[(1, 1)] += 3 * n
        t[(0, 3)] += n * n
        t[(0, n)] += 3
    else:
        return None
    return dict(t)


def _t_json(t: dict) -> list:
    return [{"dimension": k, "multiplicity": j, "count": c}
            for (k, j), c in sorted(t.items(), key=lambda kv: (-kv[0][0], kv[0][1]))]


# -- subcommands -------------------------------------------------------------------

def _load_poly(text: str | None, ring: PolyRing):
    if text is None:
        return None
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return parse_poly(text.strip(), ring)
    except ValueError as exc:
        raise UsageError(f"cannot parse polynomial: {exc}") from None


def cmd_fermat_poly(cfg: RunConfig):
    reports = []
    for n in cfg.n:
        F = fermat_poly(cfg.N, n)
        reports.append({"N": cfg.N, "n": n, "degree": F.degree(), "terms": len(F), "poly": str(F)})
    if cfg.fmt == "text":
        return EXIT_OK, "".join(r["poly"] + "\n" for r in reports)
    return EXIT_OK, _json({"schema": SCHEMA_VERSION, "command": "fermat-poly", "results": reports})


def cmd_generators(cfg: RunConfig):
    reports = []
    for n in cfg.n:
        G = restricted_ideal_generators(n)
        reports.append({"n": n, "degrees": list(G.degrees),
                        "generators": [str(g) for g in G.generators],
                        "J": [str(j) for j in G.J]})
    if cfg.fmt == "text":
        out = []
        for r in reports:
            out.extend(f"g{i + 1} = {g}" for i, g in enumerate(r["generators"]))
        return EXIT_OK, "\n".join(out) + "\n"
    return EXIT_OK, _json({"schema": SCHEMA_VERSION, "command": "generators", "results": reports})


def _census_for(N: int, n: int, prime: int | None):
    field = PrimeField(prime) if prime is not None else None
    a = arr_mod.fermat_planes(N, n, field)
    return arr_mod.census(arr_mod.intersection_lattice(a), a.d, N)


def cmd_census(cfg: RunConfig):
    code = EXIT_OK
    results = []
    csv_chunks = []
    for n in cfg.n:
        c = _census_for(cfg.N, n, cfg.prime)
        exp = expected_census(cfg.N, n)
        matches = None if exp is None else (exp == c.t)
        if matches is False:
            code = EXIT_MISMATCH
        entry = {"N": cfg.N, "n": n, "field": f"GF({cfg.prime})" if cfg.prime else f"QQ(zeta_{n})",
                 **c.to_json(), "expected": None if exp is None else _t_json(exp),
                 "matches_expected": matches}
        results.append(entry)
        csv_chunks.append(c.to_csv())
    if cfg.fmt == "csv":
        return code, "\n".join(csv_chunks)
    return code, _json({"schema": SCHEMA_VERSION, "command": "census", "results": results})


def _identity_entry(c, N):
    out = {"pair": arr_mod.pair_identity(c)}
    if N == 3:
        out["hunt"] = arr_mod.hunt_identity(c)
    out["holds"] = out["pair"]["holds"] and (N != 3 or out["hunt"]["holds"])
    return out


def cmd_identities(cfg: RunConfig):
    code = EXIT_OK
    results = []
    for n in cfg.n:
        a = arr_mod.fermat_planes(cfg.N, n)
        index = arr_mod.LatticeIndex(a)
        full = _identity_entry(arr_mod.census(index.flats, a.d, cfg.N), cfg.N)
        rng = random.Random(f"{cfg.seed}:{cfg.N}:{n}")
        failures, sensitive = [], 0
        for s in range(cfg.samples):
            size = rng.randint(3, a.d)
            subset = sorted(rng.sample(range(a.d), size))
            c = arr_mod.census(index.restrict(subset), size, cfg.N)
            e = _identity_entry(c, cfg.N)
            sensitive += e["pair"]["bound_sensitive"]
            if not e["holds"]:
                failures.append({"sample": s, "subset": subset})
        ok = full["holds"] and not failures
        if not ok:
            code = EXIT_MISMATCH
        results.append({"N": cfg.N, "n": n, "d": a.d, "full": full, "samples": cfg.samples,
                        "failures": failures, "bound_sensitive_samples": sensitive,
                        "passed": ok})
    return code, _json({"schema": SCHEMA_VERSION, "command": "identities", "seed": cfg.seed,
                        "results": results})


def _point_repr(p):
    return [str(c) for c in p]


def cmd_lines(cfg: RunConfig):
    code = EXIT_OK
    results = []
    for n in cfg.n:
        try:
            lines = arr_mod.restricted_config_lines(n)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        a = arr_mod.fermat_planes(3, n)
        flats = arr_mod.intersection_lattice(a)
        lattice = {X.key for X in arr_mod.lattice_lines_with_multiplicity(flats, 3)}
        K = a.field
        built = {arr_mod.flat_key_from_points(L.points, K) for L in lines}
        agree = built == lattice
        if not agree:
            code = EXIT_MISMATCH
        results.append({
            "n": n, "count": len(lines), "matches_lattice": agree,
            "lines": [{"label": L.label, "multiplicity": L.multiplicity,
                       "points": [_point_repr(p) for p in L.points]} for L in lines],
        })
    return code, _json({"schema": SCHEMA_VERSION, "command": "lines", "results": results})


def _ideal_data(N: int, n: int):
    """(generators, flats, default polynomial, ring) for the configuration."""
    if N == 3:
        try:
            flats = arr_mod.restricted_config_lines(n)
        except ValueError:
            flats = None
        with warnings.catch_warnings():
            # n < 3 is reported through the result notes instead
            warnings.simplefilter("ignore", UserWarning)
            gens = restricted_ideal_generators(n).generators
        return gens, flats, fermat_poly(3, n), FermatContext(3, n).ring
    return p2_fermat_ideal(n), p2_fermat_points(n), p2_witness(n), FermatContext(2, n).ring


def _notes_for(N, n):
    notes = []
    if N == 3 and n < 3:
        notes.append("n < 3 lies outside the non-containment range: reported as an experiment, no verdict asserted")
    return notes


def cmd_check_symbolic(cfg: RunConfig):
    if cfg.m is None:
        raise UsageError("--m is required")
    results = []
    for n in cfg.n:
        _, flats, default, ring = _ideal_data(cfg.N, n)
        if flats is None:
            raise UsageError(f"no restricted configuration for n = {n} (needs n >= 3)")
        f = _load_poly(cfg.poly, ring) or default
        if not f.is_homogeneous():
            raise UsageError("polynomial is not homogeneous")
        rep = symbolic_power_report(f, flats, cfg.m)
        failing = [fl.label for fl, ok in zip(flats, rep["per_flat"]) if not ok]
        results.append({"N": cfg.N, "n": n, "m": cfg.m, "degree": f.degree(),
                        "flats": rep["flats"], "codim": cfg.N - (len(flats[0].points) - 1),
                        "jets": rep["jets"],
                        "verdict": "member" if rep["member"] else "non-member",
                        "failing_flats": failing, "notes": _notes_for(cfg.N, n)})
    return EXIT_OK, _json({"schema": SCHEMA_VERSION, "command": "check-symbolic",
                           "results": results})


def cmd_check_power(cfg: RunConfig):
    if cfg.r is None:
        raise UsageError("--r is required")
    strategy = strategy_name(cfg.strategy)
    code = EXIT_OK
    results = []
    for n in cfg.n:
        gens, flats, default, ring = _ideal_data(cfg.N, n)
        f = _load_poly(cfg.poly, ring) or default
        if not f.is_homogeneous():
            raise UsageError("polynomial is not homogeneous")
        if strategy == "degreewise-oracle":
            if flats is None:
                raise UsageError("oracle strategy needs the configuration flats (n >= 3)")
            source = flats
            query = MembershipQuery(f, flats=tuple(flats), r=cfg.r)
        else:
            source = gens
            query = MembershipQuery(f, generators=tuple(gens), r=cfg.r)
        res = power_membership(f, source, cfg.r, strategy, prime=cfg.prime)
        verified = verify_membership_certificate(res, query)
        if not verified:
            code = EXIT_MISMATCH
        entry = {"N": cfg.N, "n": n, **res.to_json(), "verified": verified,
                 "notes": _notes_for(cfg.N, n)}
        if cfg.prime is not None:
            entry["prime_prepass"] = cfg.prime
        results.append(entry)
    return code, _json({"schema": SCHEMA_VERSION, "command": "check-power", "results": results})


def cmd_certify(cfg: RunConfig):
    code = EXIT_OK
    results = []
    for n in cfg.n:
        if n < 3:
            raise UsageError(f"n = {n}: certification needs n >= 3 "
                             "(the h_ij of degree 2n - 4 must be non-constant)")
        rep = certify_report(n)
        ok = (rep["jet_check"]["member"] and rep["span_check"]["verdict"] == "non-member"
              and rep["span_check"]["verified"] and not rep["obstruction"]["consistent"])
        if not ok:
            code = EXIT_MISMATCH
        results.append(rep)
    if len(results) == 1:
        return code, _json(results[0], signed=False)
    return code, _json({"schema": SCHEMA_VERSION, "command": "certify", "results": results})


def _json(payload: dict, signed: bool = True) -> str:
    body = sign(payload) if signed else payload
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


COMMANDS = {
    "fermat-poly": cmd_fermat_poly,
    "generators": cmd_generators,
    "census": cmd_census,
    "identities": cmd_identities,
    "lines": cmd_lines,
    "check-symbolic": cmd_check_symbolic,
    "check-power": cmd_check_power,
    "certify": cmd_certify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, nargs="+", default=[3], help="Fermat degree(s)")
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default=None)
    common.add_argument("--output", "-o", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="fermatlines",
                                     description="Fermat arrangements and the containment problem")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("fermat-poly", parents=[common], help="expand the Fermat polynomial")
    p.add_argument("--N", type=int, default=3)
    sub.add_parser("generators", parents=[common], help="print the six ideal generators")
    for name, helptext in (("census", "intersection lattice census"),
                           ("identities", "check the pair and triple counting identities")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--N", type=int, default=3)
        if name == "census":
            p.add_argument("--prime", type=int, help="compute over GF(p), p = 1 mod n")
        else:
            p.add_argument("--samples", type=int, default=200)
            p.add_argument("--seed", type=int, default=0)
    sub.add_parser("lines", parents=[common], help="list the restricted configuration lines")
    p = sub.add_parser("check-symbolic", parents=[common], help="symbolic power membership by jets")
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--poly", help="polynomial text or file (default: the Fermat polynomial)")
    p = sub.add_parser("check-power", parents=[common], help="ordinary power membership")
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--strategy", choices=("gp", "oracle"), default="gp")
    p.add_argument("--poly", help="polynomial text or file (default: the Fermat polynomial)")
    p.add_argument("--prime", type=int, help="rank pre-pass modulo p (p = 1 mod n)")
    sub.add_parser("certify", parents=[common], help="full certification report")
    return parser


def config_from_args(args) -> RunConfig:
    default_fmt = "csv" if args.subcommand == "census" else "json"
    return RunConfig(
        subcommand=args.subcommand,
        N=getattr(args, "N", 3),
        n=tuple(args.n),
        m=getattr(args, "m", None),
        r=getattr(args, "r", None),
        strategy=getattr(args, "strategy", "gp"),
        prime=getattr(args, "prime", None),
        fmt=args.fmt or default_fmt,
        output=args.output,
        poly=getattr(args, "poly", None),
        samples=getattr(args, "samples", 200),
        seed=getattr(args, "seed", 0),
    )


def run(cfg: RunConfig) -> tuple[int, str]:
    cfg.validate()
    return COMMANDS[cfg.subcommand](cfg)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = config_from_args(args)
    try:
        code, text = run(cfg)
    except UsageError as exc:
        print(f"fermatlines: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if cfg.output:
            with open(cfg.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"fermatlines: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: one JSON document per invocation on stdout."""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import io
from .cusps import (COMPOSANTES, POINTES, LevelContext, cusp_count_rows, cusp_invariants,
                    enumerate_cusps_bruteforce, enumeration_budget)
from .errors import HilbcuspError, InvalidArgumentError
from .fans import HULL, HULL_SMOOTH, build_admissible_fan, check_admissible, hilbert_basis
from .field import make_field, parse_element
from .ideals import Ideal, factor_rational_prime
from .mumford import integrality_scale, mumford_generators, polarization_check, torsion_structure
from .qexp import boundary_components, koecher_divergence, qexp_descriptor
from .units import GM, RESGM, fundamental_unit, totally_positive_unit

COMMANDS = ("field-info", "cusps", "cusp-count", "fan", "chart", "mumford", "qexp", "boundary", "koecher")


def _context(job: io.JobSpec) -> LevelContext:
    K = job.number_field()
    if not job.n:
        raise InvalidArgumentError("this command needs a level --n")
    return LevelContext(K, io.parse_ideal(K, job.c), io.parse_level(K, job.n), job.D_flag)


def _bs(job: io.JobSpec, K):
    texts = job.params.get("b") or ["O"]
    return [io.parse_ideal(K, t) for t in texts]


def cmd_field_info(job):
    K = job.number_field()
    res = {"degree": K.degree, "D": K.D if K.degree == 2 else None, "discriminant": K.discriminant,
           "integral_basis": K.integral_basis(), "different": Ideal.different(K)}
    if K.degree == 2:
        e0 = fundamental_unit(K)
        res.update({"fundamental_unit": e0, "fundamental_unit_norm": e0.norm(),
                    "totally_positive_unit": totally_positive_unit(K)})
    res["splitting"] = [
        {"p": s.p, "kind": s.kind, "primes": list(s.primes)}
        for s in (factor_rational_prime(K, int(p)) for p in job.params.get("primes", []))]
    return res, {"operation": "field_core"}


def _count_results(job, variant_key, brute: bool):
    K = job.number_field()
    ctx = _context(job)
    variant = job.params.get("variant", POINTES)
    budget = job.params.get("budget")
    strata = []
    totals = {"unramified": 0, "ramified": 0}
    agree = True
    for b in _bs(job, K):
        bf = enumerate_cusps_bruteforce(b, ctx, variant, frame=int(job.params.get("frame", 0)),
                                        budget=budget) if brute else None
        for row in cusp_count_rows(b, ctx, variant):
            entry = {"b": b, "b_prime": row["b_prime"], "f": row["f"], "n": row["n"],
                     "formula": row["count"], "numerator": row["numerator"],
                     "denominator": row["denominator"]}
            count = row["count"]
            if brute:
                entry["bruteforce"] = bf.get(row["b_prime"], 0)
                agree &= entry["bruteforce"] == row["count"]
                count = entry["bruteforce"]
            totals["unramified" if row["f"].is_unit_ideal() else "ramified"] += count
            strata.append(entry)
    res = {"variant": variant, "strata": strata, "counts": totals}
    prov = {"formula": "cusp_count_formula"}
    if brute:
        res["formula_matches_bruteforce"] = agree
        prov["bruteforce"] = "enumerate_cusps_bruteforce"
    return res, prov


def cmd_cusps(job):
    return _count_results(job, "cusps", brute=True)


def cmd_cusp_count(job):
    return _count_results(job, "cusp-count", brute=False)


def _fan(job):
    K = job.number_field()
    X = io.parse_ideal(K, job.params.get("ideal", "O"))
    unit = job.params.get("unit")
    unit = parse_element(K, unit) if unit else None
    return build_admissible_fan(X, unit, job.params.get("mode", HULL_SMOOTH))


def _fan_json(fan):
    return {"X": fan.X, "X_star_basis": fan.basis, "eta": fan.eta, "action": fan.action,
            "mode": fan.mode, "rays": fan.rays, "cones": [list(c.rays) for c in fan.cones],
            "orbit_count": fan.orbit_count(), "admissibility": check_admissible(fan).as_dict()}


def cmd_fan(job):
    fan = _fan(job)
    res = _fan_json(fan)
    svg = job.params.get("svg")
    if svg:
        with open(svg, "w", encoding="utf-8") as fh:
            fh.write(io.fan_svg(fan))
        res["svg"] = svg
    return res, {"operation": "build_admissible_fan"}


def cmd_chart(job):
    fan = _fan(job)
    charts = []
    for cone in fan.cones:
        charts.append({"cone": list(cone.rays), "det": cone.det,
                       "dual_hilbert_basis": hilbert_basis(cone),
                       "monoid_generators": hilbert_basis(cone, fan.basis)})
    res = _fan_json(fan)
    res["charts"] = charts
    return res, {"operation": "hilbert_basis"}


def cmd_mumford(job):
    K = job.number_field()
    p = job.params
    phi = parse_element(K, p.get("phi", "1"))
    a = io.parse_ideal(K, p.get("a", "O"))
    b = io.parse_ideal(K, p.get("b_lattice", "O"))
    star = io.parse_elements(K, p.get("star", "-1,0,1"))
    bound = Fraction(p.get("beta_bound", 10))
    gens = mumford_generators(phi, a, b, star, bound)
    table = [{"beta": g.beta, "alpha": g.alpha, "q_exponent": g.q_exponent,
              "character": g.character, "degree": g.degree, "integral": g.integral} for g in gens]
    positive = all(g.q_exponent.is_totally_positive() for g in gens if g.beta and not g.alpha)
    box = Fraction(p.get("search_box", bound))
    scales = []
    for alpha in sorted(set(star), key=lambda e: (e.embeddings(), e.a, e.b)):
        n, cert = integrality_scale(alpha, phi, box, b)
        scales.append({"alpha": alpha, "n": n, **cert})
    res = {"phi": phi, "polarization_ok": polarization_check(phi, io.parse_ideal(K, job.c)),
           "generators": table, "positivity_alpha0": positive, "integrality_scale": scales}
    if job.n:
        n_ideal = io.parse_level(K, job.n)
        bp = io.parse_ideal(K, p["b_prime"]) if p.get("b_prime") else n_ideal.inverse() * b
        res["torsion"] = torsion_structure(a, b, bp, n_ideal)
    return res, {"operation": "mumford_generators"}


def _cusp(job, ctx):
    K = ctx.field
    a_txt, _, c_txt = str(job.params.get("cusp", "1;0")).partition(";")
    return cusp_invariants(parse_element(K, a_txt), parse_element(K, c_txt or "0"), ctx)


def cmd_qexp(job):
    ctx = _context(job)
    cusp = _cusp(job, ctx)
    weight = io.parse_weight(job.params.get("weight", "0"))
    d = qexp_descriptor(cusp, weight, Fraction(job.params.get("bound", 10)))
    limit = int(job.params.get("max_orbits", 50))
    orbits = [{"rep": sum((c * e for c, e in zip(o.rep, d.basis)), ctx.field.zero),
               "rep_coords": o.rep, "members": len(o.members), "relations": o.relations,
               "stabilizer_twists": o.stabilizer_twists, "forced_zero_unless": o.forced_zero_unless}
              for o in d.orbits[:limit]]
    res = {"cusp": cusp.summary(), "weight": d.weight, "bound": d.bound, "zeta_order": d.n,
           "eta": d.eta, "X_basis": d.basis, "orbit_count": len(d.orbits), "point_count": d.point_count(),
           "orbits": orbits, "orbits_truncated": len(d.orbits) > limit, "constant_term": d.constant_term,
           "zeta_exponents": sorted({r["zeta"] for o in d.orbits for r in o.relations})}
    return res, {"operation": "qexp_descriptor"}


def cmd_boundary(job):
    ctx = _context(job)
    recs = boundary_components(ctx, _bs(job, ctx.field), budget=job.params.get("budget"))
    return {"components": recs, "count": len(recs)}, {"bruteforce": "boundary_components",
                                                      "formula": "cusp_count_formula"}


def cmd_koecher(job):
    K = job.number_field()
    p = job.params
    r = koecher_divergence(parse_element(K, p.get("xi0", "1:-1")), parse_element(K, p.get("xi_star", "0:1/10")),
                           int(p.get("M", 10 ** 6)))
    return {"k": r.k, "trace": r.trace, "multiplier": r.multiplier, "traces": r.traces}, {"operation": "koecher_divergence"}


HANDLERS = {"field-info": cmd_field_info, "cusps": cmd_cusps, "cusp-count": cmd_cusp_count,
            "fan": cmd_fan, "chart": cmd_chart, "mumford": cmd_mumford, "qexp": cmd_qexp,
            "boundary": cmd_boundary, "koecher": cmd_koecher}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hilbcusp", description="Cusps, fans and q-expansions over real quadratic fields.")
    ap.add_argument("--job", help="read the job spec from a JSON file (overrides other options)")
    sub = ap.add_subparsers(dest="command")

    def common(p, level=True):
        p.add_argument("--field", default="rational", help="squarefree D > 1, or 'rational'")
        p.add_argument("--c", default="1", help="generators of the polarization ideal c, comma separated")
        if level:
            p.add_argument("--n", default="", help="level recipe, e.g. 5, p@11, p2@11, inert@13, p@11*p@19")
            p.add_argument("--D-flag", dest="D_flag", default=GM, choices=(GM, RESGM))
            p.add_argument("--b", action="append", help="generators of a lattice b (repeatable)")
            p.add_argument("--budget", type=int)

    p = sub.add_parser("field-info")
    common(p, level=False)
    p.add_argument("--primes", type=int, nargs="*", default=[])
    for name in ("cusps", "cusp-count"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--variant", default=POINTES, choices=(POINTES, COMPOSANTES))
        p.add_argument("--frame", type=int, default=0)
    for name in ("fan", "chart"):
        p = sub.add_parser(name)
        common(p, level=False)
        p.add_argument("--ideal", default="O", help="generators of X, or O")
        p.add_argument("--unit", help="totally positive unit acting on the fan")
        p.add_argument("--mode", default=HULL_SMOOTH, choices=(HULL, HULL_SMOOTH))
        if name == "fan":
            p.add_argument("--svg")
    p = sub.add_parser("mumford")
    common(p, level=False)
    p.add_argument("--n", default="")
    p.add_argument("--phi", default="1")
    p.add_argument("--a", default="O")
    p.add_argument("--b-lattice", dest="b_lattice", default="O")
    p.add_argument("--b-prime", dest="b_prime")
    p.add_argument("--star", default="-1,0,1")
    p.add_argument("--beta-bound", dest="beta_bound", default="10")
    p.add_argument("--search-box", dest="search_box")
    p = sub.add_parser("qexp")
    common(p)
    p.add_argument("--cusp", default="1;0", help="a;c with elements written a or a:b")
    p.add_argument("--weight", default="0")
    p.add_argument("--bound", default="10")
    p.add_argument("--max-orbits", dest="max_orbits", type=int, default=50)
    p = sub.add_parser("boundary")
    common(p)
    p = sub.add_parser("koecher")
    common(p, level=False)
    p.add_argument("--xi0", default="1:-1")
    p.add_argument("--xi-star", dest="xi_star", default="0:1/10")
    p.add_argument("--M", default="1000000")
    return ap


def job_from_args(args) -> io.JobSpec:
    d = {k: v for k, v in vars(args).items() if v is not None and k not in ("job", "command")}
    base = {k: d.pop(k) for k in ("field", "c", "n", "D_flag") if k in d}
    return io.JobSpec(command=args.command, params=d, **base)


def run_command(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        if exc.code:
            out.write(io.dumps(io.error_document("invalid-argument", "could not parse the command line")) + "\n")
        return int(exc.code or 0)
    command = args.command
    try:
        if args.job:
            with open(args.job, encoding="utf-8") as fh:
                job = io.JobSpec.from_text(fh.read())
        else:
            if command is None:
                raise InvalidArgumentError(f"a subcommand is required: {', '.join(COMMANDS)}")
            job = job_from_args(args)
        command = job.command
        if command not in HANDLERS:
            raise InvalidArgumentError(f"unknown command {command!r}")
        make_field(job.field)
        results, prov = HANDLERS[command](job)
        budget = {"limit": enumeration_budget(job.params.get("budget")), "env": "HILBCUSP_BUDGET"}
        out.write(io.dumps(io.document(command, job.to_dict(), results, prov, budget)) + "\n")
        return 0
    except HilbcuspError as exc:
        out.write(io.dumps(io.error_document(exc.kind, str(exc), command)) + "\n")
        return 1
    except OSError as exc:
        out.write(io.dumps(io.error_document("io-error", str(exc), command)) + "\n")
        return 1


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()

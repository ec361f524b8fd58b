"""Command-line front end: JSON in, JSON report out.

Exit status 0 means the property holds or the construction succeeded, 1 that
it fails (residuals are in the report) and 2 that the input was invalid.
``COCYCLE_ATOL`` overrides the absolute tolerance.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import endo, focksim, generators as gen, jsonio, subordination as sub
from .matcore import (
    ConsistencyError,
    DimensionError,
    Tolerance,
    ValidationError,
    opnorm,
)

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class InvalidInput(Exception):
    pass


def _tolerance() -> Tolerance:
    raw = os.environ.get("COCYCLE_ATOL")
    if raw is None:
        return Tolerance()
    try:
        return Tolerance(float(raw))
    except ValueError as exc:
        raise InvalidInput(f"bad COCYCLE_ATOL={raw!r}: {exc}") from exc


def _partition(path):
    return None if path is None else jsonio.partition_from_json(jsonio.load(path))


def _matrix_arg(path):
    return None if path is None else jsonio.matrix_from_json(jsonio.load(path))


def cmd_gen_check(args, tol):
    F = jsonio.generator_from_json(jsonio.load(args.generator))
    partition = _partition(args.partition)
    contraction = gen.is_contraction_generator(F, tol)
    local = gen.is_local(F, tol)
    report = {
        "n": F.n, "d": F.d,
        "contraction": contraction,
        "local": local,
        "gamma_max_eigenvalue": float(np.linalg.eigvalsh(gen.gamma_left(F)).max()) if F.dim else 0.0,
        "projection": False,
    }
    try:
        L, P = gen.classify_projection_generator(F, partition, tol)
        report.update(projection=True, L=jsonio.matrix_to_json(L), P=jsonio.matrix_to_json(P))
    except gen.ProjectionGeneratorError as exc:
        report["projection_failure"] = exc.reason
    if report["projection"]:
        kind = "local projection cocycle generator" if local else "projection cocycle generator"
    elif contraction:
        kind = "contraction cocycle generator"
    else:
        kind = "not a contraction cocycle generator"
    report["classification"] = kind
    return report, contraction


def cmd_gen_from_pair(args, tol):
    pair = jsonio.pair_from_json(jsonio.load(args.pair), tol)
    F = gen.from_local_pair(pair, args.n)
    return {"generator": jsonio.generator_to_json(F), "local": gen.is_local(F, tol)}, True


def _relation_json(rep: sub.RelationReport) -> dict:
    return {"relation": rep.relation, "holds": rep.holds,
            "witnesses": rep.witnesses, "residuals": rep.residuals}


def cmd_sub_check(args, tol):
    F = jsonio.generator_from_json(jsonio.load(args.F))
    G = jsonio.generator_from_json(jsonio.load(args.G))
    rep = sub.compare(G, F, tol)
    rep.relation = "X^F <= X^G"
    return _relation_json(rep), rep.holds


def cmd_sub_equiv(args, tol):
    F = jsonio.generator_from_json(jsonio.load(args.F))
    G = jsonio.generator_from_json(jsonio.load(args.G))
    partition = _partition(args.partition)
    D = sub.equivalent_projections(F, G, partition, tol)
    witnesses = {} if D is None else {"D": jsonio.matrix_to_json(D)}
    rep = {"relation": "P ~ Q in N (x) B(k)", "holds": D is not None,
           "witnesses": witnesses, "residuals": {}}
    if D is not None:
        _, P = gen.classify_projection_generator(F, partition, tol)
        _, Q = gen.classify_projection_generator(G, partition, tol)
        rep["residuals"] = {"D*D-P": opnorm(D.conj().T @ D - P), "DD*-Q": opnorm(D @ D.conj().T - Q)}
    return rep, D is not None


def cmd_sub_construct_h(args, tol):
    F = jsonio.generator_from_json(jsonio.load(args.F))
    G = jsonio.generator_from_json(jsonio.load(args.G))
    D, E, K = _matrix_arg(args.D), _matrix_arg(args.E), _matrix_arg(args.K)
    H = sub.construct_intertwiner(F, G, D, E, K, tol, _partition(args.partition))
    rep = {"relation": "intertwiner", "holds": True,
           "witnesses": {"H": jsonio.generator_to_json(H)},
           "residuals": sub.intertwiner_residuals(F, G, H)}
    return rep, True


def cmd_sub_chain(args, tol):
    chain = sub.build_chain(args.d, tol)
    gens = [jsonio.generator_to_json(gen.from_local_pair(p)) for p in chain]
    checks = [sub.compare(gen.from_local_pair(hi), gen.from_local_pair(lo), tol)
              for lo, hi in zip(chain, chain[1:])]
    rep = {
        "relation": "chain",
        "holds": all(c.holds for c in checks),
        "witnesses": {"chain": [jsonio.pair_to_json(p) for p in chain], "generators": gens},
        "residuals": {"adjacent_algebraic": [c.residuals["algebraic"] for c in checks]},
        "length": len(chain),
        "extendable": sub.can_extend_above(chain, tol),
        "note": f"max chain length {1 + args.d}",
    }
    return rep, rep["holds"]


def cmd_sub_relations(args, tol):
    a = jsonio.pair_from_json(jsonio.load(args.a), tol)
    b = jsonio.pair_from_json(jsonio.load(args.b), tol)
    cles_ab, wit_ab = sub.cles_sigma(a, b, tol)
    cles_ba, wit_ba = sub.cles_sigma(b, a, tol)
    sim = sub.sim_sigma(a, b, tol)
    witnesses = {}
    if sim:
        witnesses["H"] = jsonio.generator_to_json(sub.sim_sigma_witness(a, b, tol))
    if wit_ab is not None:
        witnesses["cles_ab"] = jsonio.pair_to_json(wit_ab)
    if wit_ba is not None:
        witnesses["cles_ba"] = jsonio.pair_to_json(wit_ba)
    rep = {
        "relation": "Sub(sigma) relations",
        "holds": {
            "leq_ab": sub.local_pair_leq(a, b, tol),
            "leq_ba": sub.local_pair_leq(b, a, tol),
            "sim": sim,
            "cles_ab": cles_ab,
            "cles_ba": cles_ba,
            "antisymmetry": sub.antisymmetry_check(a, b, tol),
        },
        "witnesses": witnesses,
        "residuals": {},
    }
    return rep, rep["holds"]["antisymmetry"]


def cmd_endo_subordinates(args, tol):
    hom = jsonio.hom_from_json(jsonio.load(args.hom))
    projections = list(endo.coordinate_commutant_projections(hom, tol))
    reps = endo.distinct_subordinates(hom, projections, tol)
    alpha_choi = endo.choi_matrix(lambda S: endo.apply(hom, S), hom.m)
    out = []
    for P, gamma in reps:
        diff = alpha_choi - gamma.choi()
        out.append({
            "P": jsonio.matrix_to_json(P),
            "gamma_of_identity": jsonio.matrix_to_json(gamma(np.eye(hom.m))),
            "equals_alpha": endo.same_subordinate(hom, P, np.eye(hom.n), tol),
            "is_zero": all(opnorm(K) <= tol.atol for K in gamma.kraus),
            "difference_choi_min_eigenvalue": float(np.linalg.eigvalsh(diff).min()),
        })
    return {"projections_enumerated": len(projections), "distinct_subordinates": len(out),
            "subordinates": out}, True


def cmd_endo_check(args, tol):
    alpha = jsonio.hom_from_json(jsonio.load(args.alpha))
    beta = jsonio.hom_from_json(jsonio.load(args.beta))
    holds = endo.dominates_endo(alpha, beta, tol)
    diff = endo.difference_choi(alpha, beta)
    rep = {"relation": "alpha >= beta", "holds": holds,
           "witnesses": {"choi": jsonio.matrix_to_json(diff)},
           "residuals": {"choi_min_eigenvalue": float(np.linalg.eigvalsh((diff + diff.conj().T) / 2).min())}}
    return rep, holds


def _check_size(F, N):
    if N * np.log(1 + F.d) + np.log(F.n) > np.log(2e6):
        raise InvalidInput("state dimension exceeds the desk-scale limit of 2e6")


def _sim_setup(cfg, seed_override):
    if not isinstance(cfg, dict):
        raise InvalidInput("simulation config must be a JSON object")
    try:
        F = jsonio.generator_from_json(cfg["generator"])
        N = int(cfg["slices"])
        tau = float(cfg["tau"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed simulation config: {exc}") from exc
    _check_size(F, N)
    pcfg = cfg.get("probes", {})
    seed = int(pcfg.get("seed", 0)) if seed_override is None else seed_override
    probes = focksim.standard_probes(F.n, F.d, N, seed=seed, count=int(pcfg.get("count", 1)),
                                     exponential=pcfg.get("exponential"))
    G = jsonio.generator_from_json(cfg["compare"]) if "compare" in cfg else None
    return F, G, N, tau, seed, probes


def cmd_sim_run(args, tol):
    cfg = jsonio.load(args.config)
    F, G, N, tau, seed, probes = _sim_setup(cfg, args.seed)
    steps = int(cfg.get("steps", N))
    c = focksim.DiscreteCocycle(F, tau, N)
    other = focksim.DiscreteCocycle(G, tau, N) if G is not None else None
    defects = focksim.defect_report(c, steps, probes, other)
    vac = focksim.vacuum_expectation(c, steps)
    exact = np.linalg.matrix_power(np.eye(F.n) + tau * F.A, steps)
    cont = gen.expectation_semigroup(F, steps * tau)
    rep = {
        "seed": seed, "tau": tau, "slices": N, "steps": steps,
        "defects": defects,
        "vacuum_expectation": jsonio.matrix_to_json(vac),
        "vacuum_vs_discrete_semigroup": opnorm(vac - exact),
        "vacuum_vs_expectation_semigroup": opnorm(vac - cont),
        "contraction_generator": gen.is_contraction_generator(F, tol),
    }
    return rep, True


def cmd_sim_rates(args, tol):
    cfg = jsonio.load(args.config)
    F, G, N, tau, seed, probes = _sim_setup(cfg, args.seed)
    taus = [float(t) for t in cfg.get("taus", [tau / 2 ** k for k in range(5)])]
    window = tuple(cfg.get("window", (0.3, 0.7)))
    study = focksim.rate_study(F, taus, N, probes, G, window)
    # vacuum expectation at fixed horizon T = N tau against exp(T A)
    T = N * tau
    conv = []
    for t in taus:
        steps = max(1, int(round(T / t)))
        approx = np.linalg.matrix_power(np.eye(F.n) + t * F.A, steps)
        conv.append(opnorm(approx - gen.expectation_semigroup(F, steps * t)))
    study["seed"] = seed
    study["expectation_error_fixed_horizon"] = conv
    if "horizon_slices" in cfg:
        # same horizon at several resolutions; see focksim.horizon_study
        counts = [int(k) for k in cfg["horizon_slices"]]
        _check_size(F, max(counts))
        study["horizon"] = focksim.horizon_study(F, T, counts, seed=seed, G=G)
    study["all_pass"] = all(study["pass"].values())
    return study, study["all_pass"]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccrcocycle", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=None, help="probe seed for sim commands")
    top = p.add_subparsers(dest="group", required=True)

    g = top.add_parser("gen").add_subparsers(dest="cmd", required=True)
    s = g.add_parser("check")
    s.add_argument("generator")
    s.add_argument("--partition")
    s.set_defaults(func=cmd_gen_check)
    s = g.add_parser("from-pair")
    s.add_argument("pair")
    s.add_argument("--n", type=int, default=1)
    s.set_defaults(func=cmd_gen_from_pair)

    r = top.add_parser("sub").add_subparsers(dest="cmd", required=True)
    s = r.add_parser("check")
    s.add_argument("F")
    s.add_argument("G")
    s.set_defaults(func=cmd_sub_check)
    s = r.add_parser("equiv")
    s.add_argument("F")
    s.add_argument("G")
    s.add_argument("--partition", required=True)
    s.set_defaults(func=cmd_sub_equiv)
    s = r.add_parser("construct-h")
    s.add_argument("F")
    s.add_argument("G")
    s.add_argument("--D", required=True)
    s.add_argument("--E")
    s.add_argument("--K")
    s.add_argument("--partition")
    s.set_defaults(func=cmd_sub_construct_h)
    s = r.add_parser("chain")
    s.add_argument("--d", type=int, required=True)
    s.set_defaults(func=cmd_sub_chain)
    s = r.add_parser("relations")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_sub_relations)

    e = top.add_parser("endo").add_subparsers(dest="cmd", required=True)
    s = e.add_parser("subordinates")
    s.add_argument("hom")
    s.set_defaults(func=cmd_endo_subordinates)
    s = e.add_parser("check")
    s.add_argument("alpha")
    s.add_argument("beta")
    s.set_defaults(func=cmd_endo_check)

    m = top.add_parser("sim").add_subparsers(dest="cmd", required=True)
    for name, func in (("run", cmd_sim_run), ("rates", cmd_sim_rates)):
        s = m.add_parser(name)
        s.add_argument("config")
        s.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        s.set_defaults(func=func)
    return p


def _error(kind: str, message: str) -> str:
    return jsonio.dumps({"error": {"type": kind, "message": message}})


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code not in (0, None):
            print(_error("usage", "invalid command line"))
            return EXIT_INVALID
        return EXIT_OK
    try:
        tol = _tolerance()
        report, ok = args.func(args, tol)
    except (InvalidInput, ValidationError, DimensionError, json.JSONDecodeError,
            OSError, KeyError, TypeError, ValueError) as exc:
        print(_error(type(exc).__name__, str(exc)))
        return EXIT_INVALID
    except ConsistencyError as exc:
        print(_error("ConsistencyError", str(exc)))
        return EXIT_FAIL
    print(jsonio.dumps(report))
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

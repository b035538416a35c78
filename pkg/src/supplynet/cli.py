"""Command-line entry point."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import SupplyNetError
from .evolver import GAConfig, Objective, evolve
from .experiments import KINDS, ExperimentSpec, run_experiment, spec_template
from .model import (dumps, evaluate, generate_setup, load_network, load_setup, network_to_dict,
                    save_network, save_setup, setup_to_dict)
from .motifs import NullModel, NullModelConfig, TargetSignature, motif_signature
from .steiner import connectivity_threshold, solve_min_cost


def _cmd_generate_setup(a) -> int:
    n_dem = a.demanders if a.demanders is not None else a.n // 2
    save_setup(generate_setup(a.n, a.producers, n_dem, a.seed), a.out)
    return 0


def _cmd_solve(a) -> int:
    net = solve_min_cost(load_setup(a.setup))
    save_network(net, a.out)
    met = evaluate(net)
    print(json.dumps({"c": met.c, "d": met.d, "r": met.r, "m": met.m}))
    return 0


def _cmd_motifs(a) -> int:
    net = load_network(a.network)
    cfg = NullModelConfig(NullModel.parse(a.null_model), a.ensemble, a.swaps_per_edge, a.seed)
    target = TargetSignature.load(a.target) if a.target else None
    sig = motif_signature(net, cfg, target)
    doc = sig.to_dict()
    text = json.dumps({k: doc[k] for k in ("counts", "z", "sp", "sigma")}, indent=1)
    if a.out:
        Path(a.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def _cmd_optimize(a) -> int:
    setup = load_setup(a.setup)
    cap = a.length_cap_factor * connectivity_threshold(setup) if a.length_cap_factor else None
    objective = Objective.parse(a.objective)
    kw = {}
    if objective is Objective.COST_SIGMA:
        kw["motif_cfg"] = NullModelConfig(NullModel.parse(a.null_model), a.ensemble, seed=a.seed)
        if a.target:
            kw["target"] = TargetSignature.load(a.target)
    cfg = GAConfig(a.mmin, a.mmax, population_size=a.pop, generations=a.generations,
                   mutation_size=a.mutation_size, edge_length_cap=cap, objective=objective,
                   two_sided=not a.one_sided, seed=a.seed, **kw)
    archive = evolve(setup, cfg)
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "objective": objective.value,
        "critical": archive.critical,
        "diagnostic": archive.diagnostic,
        "members": [
            {"member_id": i, "c": m.c, "r": m.r, "sigma": m.sigma, "m": m.m,
             "edges": network_to_dict(m.network)["edges"]}
            for i, m in enumerate(archive)
        ],
        "setup": setup_to_dict(setup),
    }
    (out / "networks.json").write_text(dumps(doc))
    with open(out / "front.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("member_id", "c", "r", "sigma", "m"))
        for i, m in enumerate(archive):
            w.writerow((i, repr(m.c), repr(m.r), repr(float(m.sigma)), m.m))
    print(f"{len(archive)} archive members written to {out}")
    if archive.diagnostic:
        print(archive.diagnostic, file=sys.stderr)
    return 0


def _cmd_experiment_run(a) -> int:
    spec = ExperimentSpec.load(a.spec)
    if a.workers:
        spec = ExperimentSpec.from_dict({**spec.to_dict(), "workers": a.workers})
    progress = (lambda msg: print(msg, file=sys.stderr)) if a.verbose else None
    result = run_experiment(spec, progress)
    out = result.write(a.out)
    print(f"{spec.kind}: {', '.join(sorted(result.tables))} written to {out}")
    return 0


def _cmd_experiment_spec(a) -> int:
    text = spec_template(a.kind)
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="supplynet", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate-setup", help="random setup on the unit square")
    g.add_argument("--n", type=int, default=20)
    g.add_argument("--producers", type=int, default=1)
    g.add_argument("--demanders", type=int, default=None, help="default n // 2")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate_setup)

    s = sub.add_parser("solve-min-cost", help="low-cost full-demand network")
    s.add_argument("--setup", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_solve)

    nulls = sorted({"mutual", "nomutual", "demand", *(v.value for v in NullModel)})
    m = sub.add_parser("motifs", help="triad census, z-scores and signature strength")
    m.add_argument("--network", required=True)
    m.add_argument("--null-model", default="mutual", choices=nulls)
    m.add_argument("--ensemble", type=int, default=500)
    m.add_argument("--swaps-per-edge", type=int, default=10)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--target", default=None, help="JSON array of 13 reals")
    m.add_argument("--out", default=None)
    m.set_defaults(func=_cmd_motifs)

    o = sub.add_parser("optimize", help="multi-objective network optimization")
    o.add_argument("--setup", required=True)
    o.add_argument("--objective", default="cr", choices=["cr", "csigma", *(v.value for v in Objective)])
    o.add_argument("--mmin", type=int, required=True)
    o.add_argument("--mmax", type=int, required=True)
    o.add_argument("--generations", type=int, default=150)
    o.add_argument("--pop", type=int, default=200)
    o.add_argument("--mutation-size", type=int, default=1)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--length-cap-factor", type=float, default=None,
                   help="cap edge length at this multiple of the connectivity threshold")
    o.add_argument("--one-sided", action="store_true", help="plain maximization of the secondary objective")
    o.add_argument("--null-model", default="mutual", choices=nulls)
    o.add_argument("--ensemble", type=int, default=100)
    o.add_argument("--target", default=None)
    o.add_argument("--out", required=True)
    o.set_defaults(func=_cmd_optimize)

    e = sub.add_parser("experiment", help="declarative experiments")
    esub = e.add_subparsers(dest="action", required=True)
    er = esub.add_parser("run")
    er.add_argument("--spec", required=True)
    er.add_argument("--out", required=True)
    er.add_argument("--workers", type=int, default=None)
    er.set_defaults(func=_cmd_experiment_run)
    es = esub.add_parser("spec")
    es.add_argument("--kind", required=True, choices=["e1", "e2", "e3", "e4", *KINDS])
    es.add_argument("--template", action="store_true", help="print a commented template (default)")
    es.add_argument("--out", default=None)
    es.set_defaults(func=_cmd_experiment_spec)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SupplyNetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

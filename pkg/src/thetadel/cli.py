"""Command line front end.

Exit codes: 0 yes/ok, 1 no, 2 error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .approx import approximate_detailed
from .errors import BudgetExceeded, ThetaError
from .formats import read_instance, write_instance
from .graph import sorted_vertices
from .minors import has_theta_c, minimal_model
from .pipeline import Config, kernelize_k1t, kernelize_thetac, solve, stats, verify

EXIT_YES, EXIT_NO, EXIT_ERROR, EXIT_BUDGET = 0, 1, 2, 3


def _emit(doc: dict) -> None:
    json.dump(doc, sys.stdout, indent=2, default=lambda x: sorted_vertices(x) if isinstance(x, (set, frozenset)) else repr(x))
    sys.stdout.write("\n")


def _load(args):
    inst = read_instance(args.instance)
    if args.c is not None:
        inst = replace(inst, c=args.c)
    if args.k is not None:
        inst = replace(inst, k=args.k)
    cfg = Config.from_file(args.config) if args.config else Config()
    changes = {"seed": args.seed}
    if args.budget_n is not None:
        changes["n_max"] = args.budget_n
    if args.strict_bounds:
        changes["strict"] = True
    if args.mode is not None:
        changes["mode"] = args.mode
    if args.t is not None:
        changes["t"] = args.t
    return inst, replace(cfg, **changes)


def cmd_detect(args) -> int:
    inst, cfg = _load(args)
    found = has_theta_c(inst.graph, inst.c, cfg.n_max)
    doc = {"c": inst.c, "has_theta_c": found}
    if found:
        m = minimal_model(inst.graph, inst.c, cfg.n_max)
        doc["model"] = {"tree1": m.tree1, "tree2": m.tree2, "cross_edges": [list(e) for e in m.cross_edges]}
    _emit(doc)
    return EXIT_YES


def cmd_solve(args) -> int:
    inst, cfg = _load(args)
    res = solve(inst, cfg.n_max)
    _emit({"c": inst.c, "k": inst.k, "answer": "yes" if res.yes else "no",
           "certificate": res.certificate, "optimum": res.optimum})
    return EXIT_YES if res.yes else EXIT_NO


def cmd_approx(args) -> int:
    inst, cfg = _load(args)
    res = approximate_detailed(inst.graph, inst.c, cfg.d, cfg.d_prime, cfg.n_max)
    _emit({"c": inst.c, "hitting_set": res.hitting_set, "size": res.size,
           "phase1_size": res.phase1_size, "k": res.k, "depth": res.depth})
    return EXIT_YES


def cmd_kernelize(args) -> int:
    inst, cfg = _load(args)
    if cfg.mode == "k1t-free":
        out, report = kernelize_k1t(inst, cfg.t, cfg)
    else:
        out, report = kernelize_thetac(inst, cfg)
    if args.output:
        write_instance(out, args.output, comment=f"kernel, verdict {report.verdict}")
    sys.stdout.write(report.to_json(indent=2) + "\n")
    if report.incomplete and "budget" in report.incomplete_reason:
        return EXIT_BUDGET
    return EXIT_NO if report.verdict == "no-forced" else EXIT_YES


def cmd_verify(args) -> int:
    inst, cfg = _load(args)
    S = [int(x) for x in args.set.split(",") if x.strip()] if args.set else []
    ok = verify(inst.graph, inst.c, S, cfg.n_max)
    _emit({"c": inst.c, "set": S, "valid": ok, "within_budget": ok and len(S) <= inst.k})
    return EXIT_YES if ok else EXIT_NO


def cmd_stats(args) -> int:
    inst, _ = _load(args)
    doc = stats(inst.graph)
    doc.update(c=inst.c, k=inst.k)
    _emit(doc)
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thetadel", description="θ_c hitting set tools")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("instance", help="instance file ('p thetac n m c k' format)")
    common.add_argument("--c", type=int, help="override c from the file")
    common.add_argument("--k", type=int, help="override the budget k")
    common.add_argument("--mode", choices=["general", "k1t-free"])
    common.add_argument("--t", type=int, help="star size for k1t-free mode")
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget-n", type=int, help="vertex budget of exact oracles")
    common.add_argument("--strict-bounds", action="store_true", help="enable size cutoffs")
    sub = p.add_subparsers(dest="verb", required=True)
    for name, fn, text in [
        ("detect", cmd_detect, "does the graph contain θ_c as a minor"),
        ("solve", cmd_solve, "exact decision with certificate"),
        ("approx", cmd_approx, "approximate hitting set"),
        ("kernelize", cmd_kernelize, "run the kernelization pipeline"),
        ("verify", cmd_verify, "check a candidate hitting set"),
        ("stats", cmd_stats, "graph summary"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.set_defaults(func=fn)
        if name == "kernelize":
            sp.add_argument("--output", "-o", help="write the kernel instance here")
        if name == "verify":
            sp.add_argument("--set", default="", help="comma separated vertex ids")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ThetaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

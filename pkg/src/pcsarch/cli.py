"""Command-line entry point.

Exit codes: 0 success, 1 input error, 2 no feasible solution, 3 infeasible architecture.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .aco import AcoParams, ConvergenceTrace, run_aco
from .domain import (
    InstanceError,
    dump_architecture,
    read_architecture,
    read_instance,
    total_cost,
    validate_instance,
)
from .feasibility import check
from .refine import LsBudget, local_search
from .tuner import TunerConfig, knee_point, tune

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE_RUN, EXIT_VIOLATION = 0, 1, 2, 3


@dataclass
class RunManifest:
    instance: str
    command: str
    parameters: dict[str, Any]
    seed: int
    runtime_s: float
    result: dict[str, Any] = field(default_factory=dict)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2) + "\n", encoding="utf-8")


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _load(path: str):
    try:
        inst = read_instance(path)
    except OSError as exc:
        _err(f"cannot read {path}: {exc.strerror}")
        return None
    except InstanceError as exc:
        _err(f"{path}: {exc}")
        return None
    issues = validate_instance(inst)
    if issues:
        for issue in issues:
            _err(f"{path}: {issue}")
        return None
    return inst


def _derived(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix)


def cmd_solve(args: argparse.Namespace) -> int:
    inst = _load(args.instance)
    if inst is None:
        return EXIT_INPUT
    try:
        params = AcoParams(alpha=args.alpha, beta=args.beta, rho=args.rho, ants=args.ants,
                           iterations=args.iterations, seed=args.seed, penalty_exponent=args.kappa)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    out = Path(args.out)
    trace_path = Path(args.trace) if args.trace else _derived(out, ".trace.csv")
    manifest_path = Path(args.manifest) if args.manifest else _derived(out, ".manifest.json")

    start = time.perf_counter()
    res = run_aco(inst, params)
    best = res.best
    aco_cost = res.best_cost
    if best is not None and not args.no_local_search:
        best = local_search(best, inst, LsBudget(seed=args.seed))
    runtime = time.perf_counter() - start

    res.trace.write(trace_path)
    summary: dict[str, Any] = {"feasibility_rate": res.feasibility_rate, "constructions": res.constructions}
    if best is not None:
        cost = total_cost(best, inst)
        summary.update(cost=cost, aco_cost=aco_cost, devices=len(best), levels=best.depth())
        out.write_text(dump_architecture(best, inst) + "\n", encoding="utf-8")
    RunManifest(str(args.instance), "solve", asdict(params) | {"local_search": not args.no_local_search},
                args.seed, runtime, summary).write(manifest_path)

    if best is None:
        print(f"no feasible architecture found (W = {res.feasibility_rate:.4f}, runtime {runtime:.2f} s)")
        return EXIT_INFEASIBLE_RUN
    print(f"cost      {summary['cost']:g}")
    print(f"devices   {summary['devices']}")
    print(f"levels    {summary['levels']}")
    print(f"W         {res.feasibility_rate:.4f}")
    print(f"runtime   {runtime:.2f} s")
    return EXIT_OK


def cmd_tune(args: argparse.Namespace) -> int:
    inst = _load(args.instance)
    if inst is None:
        return EXIT_INPUT
    try:
        cfg = TunerConfig(
            population=args.population, generations=args.generations, eval_runs=args.runs,
            eval_iterations=args.eval_iterations, eval_ants=args.eval_ants,
            alpha_bounds=tuple(args.alpha_bounds), beta_bounds=tuple(args.beta_bounds),
            rho_bounds=tuple(args.rho_bounds), seed=args.seed,
        )
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    start = time.perf_counter()
    front = tune(inst, cfg)
    runtime = time.perf_counter() - start

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "beta", "rho", "W", "sigma"])
    for p in front:
        w.writerow([repr(p.alpha), repr(p.beta), repr(p.rho), repr(p.feasibility),
                    repr(math.inf if p.sigma is None else p.sigma)])
    Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    knee = knee_point(front)
    summary = {"front_size": len(front), "knee": {"alpha": knee.alpha, "beta": knee.beta, "rho": knee.rho,
                                                  "W": knee.feasibility, "sigma": knee.sigma}}
    if args.manifest:
        RunManifest(str(args.instance), "tune", asdict(cfg), args.seed, runtime, summary).write(args.manifest)

    if all(p.feasibility == 0 for p in front):
        print("every candidate failed to produce a feasible architecture")
        return EXIT_INFEASIBLE_RUN
    print(f"front size {len(front)}")
    sigma = "undefined" if knee.sigma is None else f"{knee.sigma:g}"
    print(f"suggested  alpha={knee.alpha:.3f} beta={knee.beta:.3f} rho={knee.rho:.3f} "
          f"(W={knee.feasibility:.4f}, sigma={sigma})")
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    inst = _load(args.instance)
    if inst is None:
        return EXIT_INPUT
    try:
        arch = read_architecture(args.architecture)
        report = check(arch, inst)
    except OSError as exc:
        _err(f"cannot read {args.architecture}: {exc.strerror}")
        return EXIT_INPUT
    except InstanceError as exc:
        _err(f"{args.architecture}: {exc}")
        return EXIT_INPUT
    if args.json:
        print(json.dumps(report.to_rows(), indent=2))
    else:
        print(report)
    return EXIT_OK if report.feasible else EXIT_VIOLATION


def aggregate_traces(traces: Sequence[ConvergenceTrace]) -> list[tuple[int, float, float]]:
    """Per-iteration (min, mean) of best-so-far cost across runs."""
    lengths = {len(t) for t in traces}
    if len(lengths) != 1:
        raise ValueError(f"traces have different iteration counts: {sorted(lengths)}")
    rows = []
    for recs in zip(*(t.records for t in traces)):
        values = [r.best_so_far for r in recs]
        mean = math.inf if any(math.isinf(v) for v in values) else math.fsum(values) / len(values)
        rows.append((recs[0].iteration, min(values), mean))
    return rows


def cmd_trace(args: argparse.Namespace) -> int:
    try:
        traces = [ConvergenceTrace.read(p) for p in args.traces]
        rows = aggregate_traces(traces)
    except OSError as exc:
        _err(f"cannot read trace: {exc}")
        return EXIT_INPUT
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iteration", "min_best_so_far", "mean_best_so_far"])
    for it, lo, mean in rows:
        w.writerow([it, repr(lo), repr(mean)])
    if args.out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
        print(f"{len(rows)} iterations aggregated over {len(traces)} runs -> {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    defaults = AcoParams()
    parser = argparse.ArgumentParser(prog="pcsarch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="synthesise an architecture (colony search + local search)")
    p.add_argument("instance")
    p.add_argument("--alpha", type=float, default=defaults.alpha)
    p.add_argument("--beta", type=float, default=defaults.beta)
    p.add_argument("--rho", type=float, default=defaults.rho)
    p.add_argument("--ants", type=int, default=defaults.ants)
    p.add_argument("--iterations", type=int, default=defaults.iterations)
    p.add_argument("--kappa", type=float, default=defaults.penalty_exponent,
                   help="exponent of the saturation penalty")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-local-search", action="store_true")
    p.add_argument("--out", default="solution.json", help="architecture document")
    p.add_argument("--trace", help="convergence trace (default: <out>.trace.csv)")
    p.add_argument("--manifest", help="run manifest (default: <out>.manifest.json)")
    p.set_defaults(func=cmd_solve)

    cfg = TunerConfig()
    p = sub.add_parser("tune", help="Pareto tuning of alpha, beta, rho")
    p.add_argument("instance")
    p.add_argument("--population", type=int, default=cfg.population)
    p.add_argument("--generations", type=int, default=cfg.generations)
    p.add_argument("--runs", type=int, default=cfg.eval_runs, help="colony runs per candidate")
    p.add_argument("--eval-iterations", type=int, default=cfg.eval_iterations)
    p.add_argument("--eval-ants", type=int, default=cfg.eval_ants)
    p.add_argument("--alpha-bounds", type=float, nargs=2, default=cfg.alpha_bounds, metavar=("LO", "HI"))
    p.add_argument("--beta-bounds", type=float, nargs=2, default=cfg.beta_bounds, metavar=("LO", "HI"))
    p.add_argument("--rho-bounds", type=float, nargs=2, default=cfg.rho_bounds, metavar=("LO", "HI"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="pareto.csv")
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("check", help="evaluate every constraint on an architecture document")
    p.add_argument("architecture")
    p.add_argument("instance")
    p.add_argument("--json", action="store_true", help="print the report as JSON rows")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("trace", help="aggregate convergence traces into min/mean best-so-far series")
    p.add_argument("traces", nargs="+")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Convergence series on the case study: N seeded solves, then min/mean aggregation.

Writes one trace per run plus an aggregated CSV with columns
iteration,min_best_so_far,mean_best_so_far ready for any plotting tool.

    python scripts/fig2_convergence.py [--runs 20] [--iterations 100] [--out results/fig2]
"""

import argparse
from pathlib import Path

from pcsarch.cli import main as cli
from pcsarch.domain import bundled_instance, dump_instance


def run(runs: int, iterations: int, out: Path, instance: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    inst_path = out / f"{instance}.json"
    inst_path.write_text(dump_instance(bundled_instance(instance)), encoding="utf-8")
    traces = []
    for seed in range(runs):
        sol = out / f"run{seed:02d}.json"
        code = cli(["solve", str(inst_path), "--seed", str(seed), "--iterations", str(iterations),
                    "--no-local-search", "--out", str(sol)])
        if code not in (0, 2):
            raise SystemExit(f"solve failed for seed {seed} (exit {code})")
        traces.append(str(out / f"run{seed:02d}.trace.csv"))
    agg = out / "convergence.csv"
    cli(["trace", *traces, "--out", str(agg)])
    return agg


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--iterations", type=int, default=100)
    ap.add_argument("--instance", default="case_study", choices=("case_study", "t1"))
    ap.add_argument("--out", type=Path, default=Path("results/fig2"))
    args = ap.parse_args()
    run(args.runs, args.iterations, args.out, args.instance)

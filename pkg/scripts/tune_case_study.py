"""Pareto tuning of (alpha, beta, rho) on a bundled instance.

The default budget is modest; raise --population / --generations for a
fuller front.

    python scripts/tune_case_study.py [--instance case_study] [--out results/pareto.csv]
"""

import argparse
from pathlib import Path

from pcsarch.cli import main as cli
from pcsarch.domain import bundled_instance, dump_instance

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instance", default="case_study", choices=("case_study", "t1"))
    ap.add_argument("--population", type=int, default=8)
    ap.add_argument("--generations", type=int, default=3)
    ap.add_argument("--runs", type=int, default=3)
    ap.add_argument("--eval-iterations", type=int, default=10)
    ap.add_argument("--out", type=Path, default=Path("results/pareto.csv"))
    args = ap.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    inst_path = args.out.with_name(f"{args.instance}.json")
    inst_path.write_text(dump_instance(bundled_instance(args.instance)), encoding="utf-8")
    raise SystemExit(cli([
        "tune", str(inst_path), "--population", str(args.population), "--generations", str(args.generations),
        "--runs", str(args.runs), "--eval-iterations", str(args.eval_iterations), "--out", str(args.out),
        "--manifest", str(args.out.with_suffix(".manifest.json")),
    ]))

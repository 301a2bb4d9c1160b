#!/usr/bin/env python3
"""Run the synthetic benchmark suite and print the aggregate tables.

Examples:
    python scripts/run_benchmarks.py --reps 30 --out results/
    python scripts/run_benchmarks.py --scenarios epidemic tuning-grid --reps 100
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from spharcp.bench import (
    SCENARIO_IDS,
    TUNING_GAMMAS,
    TUNING_LAMBDAS,
    run_bench,
    run_tuning_grid,
)
from spharcp.evaluate import aggregate
from spharcp.io import write_aggregate_csv, write_bench_records, write_locations_csv
from spharcp.types import DetectorConfig


def fmt(value, width=9) -> str:
    if value is None:
        return " " * width
    return f"{value:{width}.4f}"


def summarize(scenario: str, lam, gamma, records) -> dict:
    s = aggregate(records)
    print(
        f"{scenario:<18} lam={lam:<4} gamma={gamma:<6} "
        f"D={fmt(s.mean_hausdorff)} ({fmt(s.sd_hausdorff, 7)}) "
        f"rho={[None if v is None else round(v, 3) for v in s.rho_mean]} "
        f"khat={s.khat_hist}"
    )
    return {
        "scenario": scenario,
        "lambda": lam,
        "gamma": gamma,
        "delta": 5,
        "reps": s.n_records,
        "mean_D": s.mean_hausdorff,
        "sd_D": s.sd_hausdorff,
        "rho_mean_1": s.rho_mean[0] if s.rho_mean else None,
        "rho_sd_1": s.rho_sd[0] if s.rho_sd else None,
        "rho_mean_2": s.rho_mean[1] if len(s.rho_mean) > 1 else None,
        "rho_sd_2": s.rho_sd[1] if len(s.rho_sd) > 1 else None,
        "khat_hist": ";".join(f"{k}:{v}" for k, v in s.khat_hist.items()),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scenarios", nargs="+", default=list(SCENARIO_IDS),
                        choices=SCENARIO_IDS)
    parser.add_argument("--settings", nargs="+", default=["8:2", "8:4", "2:2", "2:4"],
                        help="q:d pairs for the single/double change point scenarios")
    parser.add_argument("--reps", type=int, default=30)
    parser.add_argument("--seed", type=int, default=20250801)
    parser.add_argument("--gamma", type=float, default=300.0)
    parser.add_argument("--lam", type=float, default=0.0)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--out", type=Path, default=Path("results"))
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    detector = DetectorConfig(p=1, L=10, lam=args.lam, gamma=args.gamma, delta=5)
    started = time.perf_counter()

    for scenario in args.scenarios:
        if scenario == "tuning-grid":
            grid = run_tuning_grid(
                8, 2, args.reps, args.seed,
                TUNING_LAMBDAS, TUNING_GAMMAS, 5, args.threads,
            )
            rows = [
                summarize(scenario, lam, gamma, records)
                for (lam, gamma), records in grid.items()
            ]
            config = {"scenario": scenario, "reps": args.reps, "base_seed": args.seed}
            write_bench_records(args.out / "tuning_records.json", config, grid)
            write_aggregate_csv(args.out / "tuning_aggregate.csv", config, rows)
            write_locations_csv(args.out / "tuning_locations.csv", config, grid)
            continue

        rows = []
        for setting in args.settings:
            q, d = setting.split(":")
            records = run_bench(
                scenario, int(q), float(d), args.reps, args.seed, detector, args.threads
            )
            row = summarize(f"{scenario} q={q} d={d}", args.lam, args.gamma, records)
            row["scenario"] = f"{scenario}[q={q},d={d}]"
            rows.append(row)
        config = {
            "scenario": scenario, "reps": args.reps, "base_seed": args.seed,
            "lambda": args.lam, "gamma": args.gamma,
        }
        write_aggregate_csv(args.out / f"{scenario}_aggregate.csv", config, rows)

    print(f"done in {time.perf_counter() - started:.0f}s; tables under {args.out}/")


if __name__ == "__main__":
    main()

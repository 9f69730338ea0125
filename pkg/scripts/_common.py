"""Shared argument handling for the experiment scripts."""

import argparse
import os
import sys

from factor_group.io import format_table
from factor_group.pipeline import PipelineOptions
from factor_group.simlab import SUMMARY_COLUMNS, design_configs, run_replications, summary_rows


def grid_parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--threads", type=int,
                   default=int(os.environ.get("FACTOR_GROUP_THREADS", os.cpu_count() or 1)))
    p.add_argument("--t", type=int, action="append")
    p.add_argument("--n", type=int, action="append")
    p.add_argument("--kappa", type=float, action="append")
    p.add_argument("--folds", type=int, default=20)
    p.add_argument("--paper-grid", action="store_true", dest="exact_grid")
    p.add_argument("--format", choices=["csv", "md"], default="md")
    return p


def run_grid(scenario, args, columns=SUMMARY_COLUMNS):
    options = PipelineOptions(folds=args.folds, exact_grid=args.exact_grid)
    rows = []
    for config in design_configs(scenario, args.seed, args.t, args.n, args.kappa):
        print(f"running {config.scenario.value} T={config.t} N={config.n} kappa={config.kappa}",
              file=sys.stderr, flush=True)
        rows += summary_rows(run_replications(config, args.reps, options, args.threads))
    sys.stdout.write(format_table(columns, rows, args.format, float_fmt=".4f"))

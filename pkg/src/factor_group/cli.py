"""
Command-line entry point.

    factor-group simulate --scenario s1 --t 100 --n 90 --kappa 0.5 --reps 5 --seed 7
    factor-group fit --input panel.csv --r auto --lambda cv --output-dir out/
    factor-group group --input panel.csv
    factor-group ospe --input ff49_daily.csv
    factor-group grid --scenario s1 --reps 50 --seed 1

Exit status: 0 success, 1 usage error, 2 computation error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .errors import FactorGroupError
from .io import (format_table, load_csv_panel, month_range, ospe_rolling, standardize)
from .pipeline import PipelineOptions, fit_pipeline
from .simlab import (SUMMARY_COLUMNS, ScenarioConfig, design_configs, run_replications,
                     summary_rows)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _config_hash(payload: dict) -> str:
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _meta(args, payload: dict) -> dict:
    return {"factor_group": __version__, "command": args.command, "seed": args.seed,
            "config_hash": _config_hash(payload)}


def _options(args) -> PipelineOptions:
    r = None if getattr(args, "r", "auto") in (None, "auto") else int(args.r)
    lam = None if getattr(args, "lam", "cv") in (None, "cv") else float(args.lam)
    return PipelineOptions(r=r, lam=lam, cv_mode=args.cv_mode, folds=args.folds,
                           k_bar=args.k_bar, exact_grid=args.exact_grid)


def _emit(text: str, output: str | None):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _summary_text(args, summaries, payload) -> str:
    rows = [row for s in summaries for row in summary_rows(s)]
    return format_table(SUMMARY_COLUMNS, rows, args.format, _meta(args, payload))


def cmd_simulate(args) -> int:
    config = ScenarioConfig(args.scenario, args.t, args.n, args.kappa, seed=args.seed)
    options = _options(args)
    summary = run_replications(config, args.reps, options, args.threads)
    payload = dict(config=asdict(config), options=asdict(options), reps=args.reps)
    _emit(_summary_text(args, [summary], payload), args.output)
    return 0


def cmd_grid(args) -> int:
    configs = design_configs(args.scenario, args.seed, args.t, args.n, args.kappa)
    if not configs:
        raise UsageError("no (T, N, kappa) design matches the filters")
    options = _options(args)
    summaries = []
    for config in configs:
        logging.info("running %s", config)
        summaries.append(run_replications(config, args.reps, options, args.threads))
    payload = dict(configs=[asdict(c) for c in configs], options=asdict(options), reps=args.reps)
    _emit(_summary_text(args, summaries, payload), args.output)
    return 0


def _load(args):
    panel = load_csv_panel(args.input, args.date_column)
    if args.standardize:
        panel, _ = standardize(panel)
    return panel


def cmd_fit(args) -> int:
    panel = _load(args)
    options = _options(args)
    fit = fit_pipeline(panel, options)
    init = fit.initial
    groups = fit.partition.assignment
    r = init.r
    payload = dict(input=str(args.input), options=asdict(options))
    meta = _meta(args, payload) | {"r": r, "lambda": repr(init.lam), "k_hat": fit.k_hat}
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    bcols = [f"b_{j + 1}" for j in range(r)]
    fcols = [f"f_{j + 1}" for j in range(r)]
    loadings = [dict(series=name, group=g, **dict(zip(bcols, row)))
                for name, g, row in zip(panel.series_names, groups, init.loadings.tolist())]
    scores = [dict(date=label, **dict(zip(fcols, row)))
              for label, row in zip(panel.time_labels, init.scores.tolist())]
    (out / "loadings.csv").write_text(
        format_table(["series", *bcols, "group"], loadings, "csv", meta, float_fmt="r"))
    (out / "scores.csv").write_text(
        format_table(["date", *fcols], scores, "csv", meta, float_fmt="r"))
    (out / "groups.csv").write_text(
        format_table(["series", "group"], [dict(series=s, group=g) for s, g in
                                           zip(panel.series_names, groups)], "csv", meta))
    print(f"r={r} lambda={init.lam:g} K_hat={fit.k_hat} -> {out}/{{loadings,scores,groups}}.csv")
    return 0


def cmd_group(args) -> int:
    panel = _load(args)
    options = _options(args)
    fit = fit_pipeline(panel, options)
    sel = fit.selection
    rows = [dict(k=k, s=s, rho=rho, ic=ic, selected=int(k == sel.k_hat))
            for k, (s, rho, ic) in enumerate(zip(sel.s_values, sel.rho_values, sel.ic_values), 1)]
    payload = dict(input=str(args.input), options=asdict(options))
    meta = _meta(args, payload) | {"r": fit.initial.r, "lambda": repr(fit.initial.lam),
                                   "k_hat": sel.k_hat}
    text = format_table(["k", "s", "rho", "ic", "selected"], rows, args.format, meta)
    text += "\n" + format_table(
        ["series", "group"],
        [dict(series=s, group=g) for s, g in zip(panel.series_names, sel.partition.assignment)],
        args.format)
    _emit(text, args.output)
    return 0


def cmd_ospe(args) -> int:
    panel = load_csv_panel(args.input, args.date_column)
    options = _options(args)
    months = month_range(args.first_month, args.last_month)
    reports = {m: ospe_rolling(panel, args.train_start, args.train_end, months, m, options)
               for m in ("PCA_TW", "PPCA")}
    rows = [dict(month=month, ospe_pca=a, ospe_ppca=b) for month, a, b in
            zip(months, reports["PCA_TW"].ospe, reports["PPCA"].ospe)]
    payload = dict(input=str(args.input), options=asdict(options), months=months,
                   train=[args.train_start, args.train_end])
    meta = _meta(args, payload) | {"scale": reports["PPCA"].scale}
    _emit(format_table(["month", "ospe_pca", "ospe_ppca"], rows, args.format, meta), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int,
                        default=int(os.environ.get("FACTOR_GROUP_THREADS", "1")))
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--k-bar", type=int, default=None, dest="k_bar")
    common.add_argument("--folds", type=int, default=20)
    common.add_argument("--cv-mode", choices=["1", "2"], default="2", dest="cv_mode")
    common.add_argument("--paper-grid", action="store_true", dest="exact_grid",
                        help="use the lambda grid without lambda=0")
    common.add_argument("--format", choices=["csv", "md"], default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="factor-group", description=__doc__.splitlines()[1])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo replications of one design")
    p.add_argument("--scenario", type=str.upper, choices=["S1", "S2"], default="S1")
    p.add_argument("--t", type=int, default=200)
    p.add_argument("--n", type=int, default=150)
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("grid", parents=[common], help="run every (T, N, kappa) design")
    p.add_argument("--scenario", type=str.upper, choices=["S1", "S2"], default="S1")
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--t", type=int, action="append", help="restrict to these T (repeatable)")
    p.add_argument("--n", type=int, action="append", help="restrict to these N (repeatable)")
    p.add_argument("--kappa", type=float, action="append", help="restrict to these kappa")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_grid)

    for name, func, text in (("fit", cmd_fit, "fit PPCA and groups to a CSV panel"),
                             ("group", cmd_group, "group-number report for a CSV panel")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--input", required=True)
        p.add_argument("--date-column", default=0, dest="date_column",
                       type=lambda s: int(s) if s.isdigit() else s)
        p.add_argument("--r", default="auto", help="number of factors or 'auto' (IC2)")
        p.add_argument("--lambda", default="cv", dest="lam", help="penalty or 'cv'")
        p.add_argument("--standardize", action="store_true")
        if name == "fit":
            p.add_argument("--output-dir", default=".", dest="output_dir")
        else:
            p.add_argument("--output", default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("ospe", parents=[common], help="rolling out-of-sample prediction error")
    p.add_argument("--input", required=True)
    p.add_argument("--date-column", default=0, dest="date_column",
                   type=lambda s: int(s) if s.isdigit() else s)
    p.add_argument("--train-start", default="2016-12-01")
    p.add_argument("--train-end", default="2017-11-30")
    p.add_argument("--first-month", default="2017-12")
    p.add_argument("--last-month", default="2018-09")
    p.add_argument("--r", default="auto")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_ospe)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            raise UsageError("a subcommand is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        with np.errstate(all="ignore"):
            return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FactorGroupError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 2


cli_main = main


if __name__ == "__main__":
    sys.exit(main())

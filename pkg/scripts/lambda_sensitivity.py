"""
How the penalty affects the initial common-component MSE, and what each CV
criterion selects, on seeded Scenario 1 draws.

For every replication the script fits PPCA at each fixed lambda and records
the MSE, then runs CV1 and CV2 over the same grid and records the choice.

    python3 scripts/lambda_sensitivity.py --reps 10 --lams 0 0.01 0.05 0.2 1 5
"""

import argparse

import numpy as np

from factor_group.estimators import common_components, oracle_lambda, ppca_fit
from factor_group.io import format_table
from factor_group.simlab import ScenarioConfig, mse_common, replication_rng, simulate
from factor_group.tuning import cv_select_lambda

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--t", type=int, default=200)
    p.add_argument("--n", type=int, default=150)
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--lams", type=float, nargs="+",
                   default=[0.0, 0.005, 0.016, 0.05, 0.2, 1.0, 5.0, 20.0])
    p.add_argument("--folds", type=int, default=20)
    args = p.parse_args()

    cfg = ScenarioConfig("S1", args.t, args.n, args.kappa, seed=args.seed)
    mse = np.zeros((args.reps, len(args.lams)))
    picks = {"CV1": [], "CV2": []}
    for rep in range(args.reps):
        draw = simulate(cfg, replication_rng(cfg.seed, rep))
        for j, lam in enumerate(args.lams):
            fit = ppca_fit(draw.panel, cfg.r, lam)
            mse[rep, j] = mse_common(common_components(fit), draw.common)
        for mode in picks:
            picks[mode].append(cv_select_lambda(draw.panel, cfg.r, args.lams, args.folds, mode).lambda_hat)
    rows = [dict(lam=lam, mse=mse[:, j].mean(), cv1_picks=picks["CV1"].count(lam),
                 cv2_picks=picks["CV2"].count(lam)) for j, lam in enumerate(args.lams)]
    print(f"oracle lambda_1* = {oracle_lambda(draw.true_loadings, cfg.t):.5f}")
    print(format_table(["lam", "mse", "cv1_picks", "cv2_picks"], rows, "md", float_fmt=".5g"))

"""
Common-component MSE of the PPCA and PCA initial estimators over the
Scenario 1 and Scenario 2 designs.

    python3 scripts/run_table1.py --reps 50 --t 200 --n 150 --kappa 0.5
"""

from _common import grid_parser, run_grid

COLUMNS = ("scenario", "t", "n", "kappa", "init", "mse", "n_reps", "n_failed")

if __name__ == "__main__":
    parser = grid_parser(__doc__)
    parser.add_argument("--scenario", choices=["S1", "S2", "BOTH"], type=str.upper, default="BOTH")
    args = parser.parse_args()
    for sc in (["S1", "S2"] if args.scenario == "BOTH" else [args.scenario]):
        run_grid(sc, args, COLUMNS)

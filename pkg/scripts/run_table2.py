"""
Group-number selection, clustering indexes and post-grouping accuracy for
Scenario 1 (three groups), PCA- and PPCA-initialized.

    python3 scripts/run_table2.py --reps 50 --t 150 --n 150 --kappa 0.5
"""

from _common import grid_parser, run_grid

if __name__ == "__main__":
    run_grid("S1", grid_parser(__doc__).parse_args())

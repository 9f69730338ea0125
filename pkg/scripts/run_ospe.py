"""
Monthly out-of-sample prediction error on the daily 49-industry portfolio
returns, December 2017 to September 2018, expanding window.

The data file is not bundled.  Download "49 Industry Portfolios [Daily]" from
the Kenneth R. French data library, keep the value-weighted block, and save
it as a CSV whose first column is the YYYYMMDD date.

    python3 scripts/run_ospe.py path/to/49_Industry_Portfolios_Daily.csv
"""

import argparse
import sys

from factor_group.io import format_table, load_csv_panel, month_range, ospe_rolling
from factor_group.pipeline import PipelineOptions

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("csv")
    p.add_argument("--train-start", default="2016-12-01")
    p.add_argument("--train-end", default="2017-11-30")
    p.add_argument("--first-month", default="2017-12")
    p.add_argument("--last-month", default="2018-09")
    p.add_argument("--folds", type=int, default=20)
    args = p.parse_args()

    panel = load_csv_panel(args.csv)
    months = month_range(args.first_month, args.last_month)
    options = PipelineOptions(folds=args.folds)
    res = {m: ospe_rolling(panel, args.train_start, args.train_end, months, m, options)
           for m in ("PCA_TW", "PPCA")}
    rows = [dict(month=m, ospe_pca=a, ospe_ppca=b, train_rows=n) for m, a, b, n in
            zip(months, res["PCA_TW"].ospe, res["PPCA"].ospe, res["PPCA"].train_rows)]
    sys.stdout.write(format_table(["month", "ospe_pca", "ospe_ppca", "train_rows"], rows, "md",
                                  float_fmt=".4f"))

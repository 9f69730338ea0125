"""
Panel CSV ingestion, standardization, CSV/markdown writers, and the rolling
out-of-sample prediction error (OSPE) evaluation.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyMonth, NoRowsRemaining, ParseError, ZeroVariance
from .pipeline import PipelineOptions, fit_pipeline
from .refit import factor_scores
from .types import Panel, make_panel

log = logging.getLogger(__name__)

MISSING_CODES = (-99.99, -999.0)


def parse_date(text: str) -> dt.date:
    """ISO-8601 (``2017-12-01``) or compact ``20171201``."""
    text = text.strip()
    if len(text) == 8 and text.isdigit():
        return dt.datetime.strptime(text, "%Y%m%d").date()
    return dt.date.fromisoformat(text[:10])


def _is_missing(cell: str) -> bool:
    if cell.strip() == "":
        return True
    try:
        value = float(cell)
    except ValueError:
        return False
    return any(math.isclose(value, code, abs_tol=1e-9) for code in MISSING_CODES)


def load_csv_panel(path, date_column=0) -> Panel:
    """
    Read a panel CSV: one header row, a date column, numeric series columns.

    Lines starting with ``#`` are skipped.  Rows with an empty cell or a
    missing-value code (-99.99, -999) are dropped and the count is logged.
    Rows are returned sorted by date.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        lines = [line for line in fh if not line.lstrip().startswith("#")]
    reader = csv.reader(lines)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise NoRowsRemaining(f"{path} has no header row") from None
    dcol = header.index(date_column) if isinstance(date_column, str) else int(date_column)
    series_cols = [j for j in range(len(header)) if j != dcol]
    dates, rows, dropped = [], [], 0
    for lineno, row in enumerate(reader, start=2):
        if not row or all(c.strip() == "" for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(lineno, "<row>", ",".join(row))
        try:
            date = parse_date(row[dcol])
        except ValueError:
            raise ParseError(lineno, header[dcol], row[dcol]) from None
        if any(_is_missing(row[j]) for j in series_cols):
            dropped += 1
            continue
        values = []
        for j in series_cols:
            try:
                values.append(float(row[j]))
            except ValueError:
                raise ParseError(lineno, header[j], row[j]) from None
        dates.append(date)
        rows.append(values)
    if dropped:
        log.warning("dropped %d row(s) with missing values from %s", dropped, path)
    if not rows:
        raise NoRowsRemaining(f"no complete rows in {path}")
    order = sorted(range(len(dates)), key=dates.__getitem__)
    return make_panel(np.array(rows)[order], [dates[i] for i in order],
                      [header[j] for j in series_cols])


@dataclass(frozen=True, eq=False)
class StandardizationParams:
    means: np.ndarray
    sds: np.ndarray

    def apply(self, values) -> np.ndarray:
        return (np.asarray(values, dtype=float) - self.means) / self.sds

    def inverse(self, values) -> np.ndarray:
        return np.asarray(values, dtype=float) * self.sds + self.means


def standardize(panel: Panel) -> tuple[Panel, StandardizationParams]:
    """Column z-scores with the T-1 sample standard deviation."""
    x = panel.values
    means = x.mean(axis=0)
    sds = x.std(axis=0, ddof=1)
    for j, sd in enumerate(sds):
        if not sd > 1e-14 * max(1.0, abs(means[j])):
            raise ZeroVariance(panel.series_names[j])
    params = StandardizationParams(means, sds)
    return Panel(params.apply(x), panel.time_labels, panel.series_names), params


class OspeMethod(str, enum.Enum):
    PCA_TW = "PCA_TW"  # PCA-initialized grouping, lambda = 0
    PPCA = "PPCA"


@dataclass(frozen=True)
class OspeReport:
    months: tuple
    ospe: tuple
    method: OspeMethod
    train_rows: tuple
    scale: str = "standardized"


def _month_key(value) -> tuple[int, int]:
    if isinstance(value, (dt.date, dt.datetime)):
        return value.year, value.month
    if isinstance(value, tuple):
        return int(value[0]), int(value[1])
    year, month = str(value).split("-")[:2]
    return int(year), int(month)


def month_range(start: str, end: str) -> list[str]:
    y, m = _month_key(start)
    y_end, m_end = _month_key(end)
    out = []
    while (y, m) <= (y_end, m_end):
        out.append(f"{y:04d}-{m:02d}")
        y, m = (y + 1, 1) if m == 12 else (y, m + 1)
    return out


def ospe_rolling(panel: Panel, train_start, train_end, eval_months, method="PPCA",
                 options: PipelineOptions = PipelineOptions()) -> OspeReport:
    """
    Expanding-window monthly OSPE.

    For each evaluation month the pipeline is refit on the standardized
    training window (standardization parameters from that window only), the
    month's rows are standardized with the same parameters, each day's
    factor scores come from regressing the day on the post-grouping
    loadings, and OSPE is the mean squared prediction error over the
    month's days and all series.  The month is then appended to the window.
    """
    method = OspeMethod(method)
    dates = [d if isinstance(d, dt.date) else parse_date(str(d)) for d in panel.time_labels]
    start = parse_date(str(train_start)) if not isinstance(train_start, dt.date) else train_start
    end = parse_date(str(train_end)) if not isinstance(train_end, dt.date) else train_end
    date_arr = np.array(dates)
    train = (date_arr >= start) & (date_arr <= end)
    months_key = np.array([d.year * 12 + d.month for d in dates])
    labels, values, counts = [], [], []
    for month in eval_months:
        y, m = _month_key(month)
        in_month = months_key == y * 12 + m
        if not in_month.any():
            raise EmptyMonth(f"no observations in {y:04d}-{m:02d}")
        if train.any() and date_arr[in_month].min() <= date_arr[train].max():
            raise ValueError(f"evaluation month {y:04d}-{m:02d} overlaps the training window")
        std, params = standardize(panel.rows(train))
        fit = fit_pipeline(std, options, penalized=method is OspeMethod.PPCA)
        b = fit.postgroup.loadings
        x_val = params.apply(panel.values[in_month])
        pred = factor_scores(x_val, b) @ b.T
        values.append(float(np.mean((x_val - pred) ** 2)))
        labels.append(f"{y:04d}-{m:02d}")
        counts.append(int(train.sum()))
        train = train | in_month
    return OspeReport(tuple(labels), tuple(values), method, tuple(counts))


# --- writers -----------------------------------------------------------------

def _fmt(value, float_fmt: str) -> str:
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return str(value)
        return repr(value) if float_fmt == "r" else format(value, float_fmt)
    if isinstance(value, (dt.date, dt.datetime)):
        return value.isoformat()
    if isinstance(value, enum.Enum):
        return str(value.value)
    return str(value)


def format_table(columns, rows, fmt: str = "csv", meta: dict | None = None,
                 float_fmt: str = ".6g") -> str:
    """
    Render rows (dicts) as CSV with ``#`` metadata lines, or as a markdown
    table.  ``float_fmt="r"`` writes floats at full round-trip precision.
    """
    cells = [[_fmt(row[c], float_fmt) for c in columns] for row in rows]
    if fmt == "md":
        widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
        line = lambda items: "| " + " | ".join(s.rjust(w) for s, w in zip(items, widths)) + " |"
        out = [line(columns), "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
        out += [line(r) for r in cells]
        return "\n".join(out) + "\n"
    out = [f"# {k}: {v}" for k, v in (meta or {}).items()]
    out.append(",".join(columns))
    out += [",".join(r) for r in cells]
    return "\n".join(out) + "\n"

"""Cross-validated choice of the fusion penalty lambda."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientRows
from .estimators import ppca_fit
from .grouping import ahc_complete_linkage, loading_distances, select_group_count
from .refit import postgroup_loadings
from .types import Panel

_TIE_RTOL = 1e-12


class CvMode(str, enum.Enum):
    CV1 = "CV1"  # held-out loss of the PPCA loadings
    CV2 = "CV2"  # held-out loss of the post-grouping loadings

    @classmethod
    def parse(cls, value) -> "CvMode":
        if isinstance(value, cls):
            return value
        text = str(value).upper()
        if text in ("1", "2"):
            text = "CV" + text
        return cls(text)


def default_lambda_grid(n: int) -> tuple:
    """Candidates ``{1/b : b = 0.05, 0.10, ..., 1} U {n}``, ascending, deduplicated."""
    if n < 2:
        raise ValueError("n must be >= 2")
    # 1/(0.05 k) written as 20/k so that 20 and n=20 dedupe exactly
    values = {20.0 / k for k in range(1, 21)} | {float(n)}
    return tuple(sorted(values))


def lambda_grid(n: int, exact: bool = False) -> tuple:
    """Library grid: `default_lambda_grid` with lambda = 0 prepended unless ``exact``."""
    grid = default_lambda_grid(n)
    return grid if exact else (0.0,) + grid


@dataclass(frozen=True, eq=False)
class CvReport:
    lambda_hat: float
    grid: tuple
    cv_scores: np.ndarray  # len(grid) x folds
    mode: CvMode
    folds: int

    @property
    def totals(self) -> np.ndarray:
        return self.cv_scores.sum(axis=1)


def time_blocks(t: int, folds: int) -> list[np.ndarray]:
    """Contiguous, nearly equal blocks of row indices."""
    return np.array_split(np.arange(t), folds)


def heldout_loss(x_val: np.ndarray, loadings: np.ndarray) -> float:
    """
    Squared reconstruction error of held-out rows after regressing each row
    on the trained loadings.  Uses a least-squares solve so a rank-deficient
    loading matrix scores poorly instead of aborting the sweep.
    """
    coef, *_ = np.linalg.lstsq(loadings, x_val.T, rcond=None)
    resid = x_val - coef.T @ loadings.T
    return float(np.sum(resid ** 2))


def trained_loadings(train: Panel, r: int, lam: float, mode: CvMode,
                     k_bar: int | None = None, xxt: np.ndarray | None = None) -> np.ndarray:
    fit = ppca_fit(train, r, lam, xxt=xxt)
    if mode is CvMode.CV1:
        return fit.loadings
    path = ahc_complete_linkage(loading_distances(fit.loadings))
    sel = select_group_count(train, fit.scores, path, k_bar)
    return postgroup_loadings(train, fit.scores, sel.partition)


def cv_select_lambda(panel: Panel, r: int, grid=None, folds: int = 20,
                     mode="CV2", k_bar: int | None = None) -> CvReport:
    """
    Block cross-validation of lambda.

    Time rows are cut into ``folds`` contiguous blocks.  Each block is held out
    in turn; loadings are trained on the remaining rows (PPCA loadings for
    CV1, the full grouping pipeline's post-grouping loadings for CV2), held-out
    scores come from cross-sectional regression on those loadings, and the
    fold loss is the squared Frobenius reconstruction error.  The selected
    lambda minimizes the fold-summed loss, smallest lambda on ties (totals
    within ``1e-12 * ||X||_F^2`` of the minimum count as tied).
    """
    mode = CvMode.parse(mode)
    grid = lambda_grid(panel.n) if grid is None else tuple(sorted({float(g) for g in grid}))
    if not grid:
        raise ValueError("lambda grid is empty")
    if not 2 <= folds <= panel.t:
        raise ValueError(f"folds={folds} must lie in 2..T={panel.t}")
    blocks = time_blocks(panel.t, folds)
    scores = np.empty((len(grid), folds))
    x = panel.values
    for f, block in enumerate(blocks):
        keep = np.ones(panel.t, dtype=bool)
        keep[block] = False
        if keep.sum() < r + 1:
            raise InsufficientRows(
                f"fold {f} leaves {int(keep.sum())} training rows for r={r}")
        train = panel.rows(keep)
        xxt = train.values @ train.values.T
        x_val = x[block]
        for g, lam in enumerate(grid):
            b = trained_loadings(train, r, lam, mode, k_bar, xxt)
            scores[g, f] = heldout_loss(x_val, b)
    totals = scores.sum(axis=1)
    # losses within roundoff of the minimum tie; grid ascending keeps the smallest lambda
    slack = _TIE_RTOL * float(np.sum(x ** 2))
    best = int(np.flatnonzero(totals <= totals.min() + slack)[0])
    scores.setflags(write=False)
    return CvReport(grid[best], grid, scores, mode, folds)

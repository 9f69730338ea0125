"""End-to-end estimation: factor count, lambda, initial fit, grouping, refit."""

from __future__ import annotations

from dataclasses import dataclass, field

from .estimators import pca_fit, ppca_fit
from .factor_count import FactorCountReport, ic2_select
from .grouping import (AhcPath, GroupSelectionReport, ahc_complete_linkage,
                       loading_distances, select_group_count)
from .refit import postgroup_fit
from .tuning import CvMode, CvReport, cv_select_lambda, lambda_grid
from .types import FactorFit, Panel, Partition


@dataclass(frozen=True)
class PipelineOptions:
    """
    r=None selects the factor count by IC2; lam=None selects lambda by CV.
    grid=None uses the library grid (lambda=0 prepended) unless exact_grid.
    """

    r: int | None = None
    r_max: int | None = None
    lam: float | None = None
    cv_mode: CvMode = CvMode.CV2
    folds: int = 20
    k_bar: int | None = None
    exact_grid: bool = False
    grid: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "cv_mode", CvMode.parse(self.cv_mode))

    def lambda_grid(self, n: int) -> tuple:
        if self.grid is not None:
            return tuple(self.grid)
        return lambda_grid(n, exact=self.exact_grid)


@dataclass(frozen=True, eq=False)
class GroupedFit:
    initial: FactorFit
    path: AhcPath
    selection: GroupSelectionReport
    postgroup: FactorFit
    factor_count: FactorCountReport | None = None
    cv: CvReport | None = field(default=None)

    @property
    def partition(self) -> Partition:
        return self.selection.partition

    @property
    def k_hat(self) -> int:
        return self.selection.k_hat


def group_from_fit(panel: Panel, initial: FactorFit, k_bar: int | None = None, **extra) -> GroupedFit:
    path = ahc_complete_linkage(loading_distances(initial.loadings))
    sel = select_group_count(panel, initial.scores, path, k_bar)
    post = postgroup_fit(panel, initial.scores, sel.partition, initial.lam)
    return GroupedFit(initial, path, sel, post, **extra)


def choose_r(panel: Panel, options: PipelineOptions) -> tuple[int, FactorCountReport | None]:
    if options.r is not None:
        return int(options.r), None
    report = ic2_select(panel, options.r_max)
    return report.r_hat, report


def fit_pipeline(panel: Panel, options: PipelineOptions = PipelineOptions(),
                 penalized: bool = True, r: int | None = None) -> GroupedFit:
    """
    Full pipeline.  ``penalized=False`` is the PCA-initialized variant
    (lambda fixed at 0, no CV).  Passing ``r`` skips factor-count selection.
    """
    fc = None
    if r is None:
        r, fc = choose_r(panel, options)
    cv = None
    if not penalized:
        initial = pca_fit(panel, r)
    else:
        lam = options.lam
        if lam is None:
            cv = cv_select_lambda(panel, r, options.lambda_grid(panel.n), options.folds,
                                  options.cv_mode, options.k_bar)
            lam = cv.lambda_hat
        initial = ppca_fit(panel, r, lam)
    return group_from_fit(panel, initial, options.k_bar, factor_count=fc, cv=cv)

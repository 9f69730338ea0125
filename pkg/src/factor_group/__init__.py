"""Penalized PCA for factor models with latent loading groups."""

__version__ = "0.1.0"

from .errors import FactorGroupError
from .estimators import (ShrinkOperator, common_components, oracle_lambda, pca_fit,
                         penalized_objective, ppca_fit, shrink_apply)
from .factor_count import FactorCountReport, ic2_select
from .grouping import (AhcPath, GroupSelectionReport, ahc_complete_linkage, goodness_of_fit,
                       loading_distances, select_group_count)
from .pipeline import GroupedFit, PipelineOptions, fit_pipeline
from .refit import factor_scores, postgroup_fit, postgroup_loadings, refit_factors
from .tuning import CvMode, CvReport, cv_select_lambda, lambda_grid
from .types import (CommonComponents, DistanceMatrix, FactorFit, Method, Panel, Partition,
                    make_panel, partition_from_assignment)

__all__ = [
    "AhcPath", "CommonComponents", "CvMode", "CvReport", "DistanceMatrix", "FactorCountReport",
    "FactorFit", "FactorGroupError", "GroupSelectionReport", "GroupedFit", "Method", "Panel",
    "Partition", "PipelineOptions", "ShrinkOperator", "ahc_complete_linkage", "common_components",
    "cv_select_lambda", "factor_scores", "fit_pipeline", "goodness_of_fit", "ic2_select",
    "lambda_grid", "loading_distances", "make_panel", "oracle_lambda", "partition_from_assignment",
    "pca_fit", "penalized_objective", "postgroup_fit", "postgroup_loadings", "ppca_fit",
    "refit_factors", "select_group_count", "shrink_apply",
]

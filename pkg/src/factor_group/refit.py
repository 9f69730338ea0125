"""Post-grouping re-estimation: group-mean loadings and least-squares scores."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, IdentificationError, SingularLoadings
from .types import FactorFit, Method, Panel, Partition

COND_LIMIT = 1e12


def _check_scores(panel: Panel, scores: np.ndarray, tol: float):
    if scores.ndim != 2 or scores.shape[0] != panel.t:
        raise DimensionMismatch(f"scores shape {scores.shape} does not match T={panel.t}")
    gram = scores.T @ scores / panel.t
    if np.max(np.abs(gram - np.eye(scores.shape[1]))) > tol:
        raise IdentificationError("scores do not satisfy F'F/T = I")


def group_means(rows: np.ndarray, partition: Partition) -> np.ndarray:
    """Replace every row by the mean of its group; rows in a group are identical."""
    labels = partition.labels
    sums = np.zeros((partition.k, rows.shape[1]))
    np.add.at(sums, labels, rows)
    means = sums / np.asarray(partition.sizes, dtype=float)[:, None]
    return means[labels]


def postgroup_loadings(panel: Panel, scores, partition: Partition, tol: float = 1e-6) -> np.ndarray:
    """
    Shared loading per group, ``(T |G_k|)^{-1} F' sum_{i in G_k} x_i``,
    broadcast to every member.
    """
    scores = np.asarray(scores, dtype=float)
    _check_scores(panel, scores, tol)
    if partition.n != panel.n:
        raise DimensionMismatch(f"partition has {partition.n} series, panel has {panel.n}")
    per_series = panel.values.T @ scores / panel.t
    return group_means(per_series, partition)


def factor_scores(values, loadings) -> np.ndarray:
    """Row-wise least squares ``f_t = (B'B)^{-1} B' x_t`` for a T x N array."""
    x = np.atleast_2d(np.asarray(values, dtype=float))
    b = np.asarray(loadings, dtype=float)
    if b.ndim != 2 or b.shape[0] != x.shape[1]:
        raise DimensionMismatch(f"loadings shape {b.shape} does not match N={x.shape[1]}")
    btb = b.T @ b
    cond = np.linalg.cond(btb)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularLoadings(float(cond))
    return np.linalg.solve(btb, b.T @ x.T).T


def refit_factors(panel: Panel, loadings) -> np.ndarray:
    """Cross-sectional least squares ``F = X B (B'B)^{-1}``."""
    return factor_scores(panel.values, loadings)


def postgroup_fit(panel: Panel, scores, partition: Partition, lam: float = 0.0) -> FactorFit:
    """Group-mean loadings followed by the factor refit; ``lam`` is carried over."""
    b = postgroup_loadings(panel, scores, partition)
    f = refit_factors(panel, b)
    return FactorFit(f, b, b.shape[1], float(lam), Method.POSTGROUP)

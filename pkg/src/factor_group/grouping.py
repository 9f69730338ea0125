"""
Homogeneity pursuit: l1 loading distances, complete-linkage agglomerative
clustering, and the information criterion for the number of groups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateGroup, DimensionMismatch, ZeroResidual
from .refit import postgroup_loadings
from .types import DistanceMatrix, Panel, Partition, partition_from_assignment


def loading_distances(loadings) -> DistanceMatrix:
    """``d_ij = (1/r) sum_l |b_il - b_jl|``."""
    b = np.asarray(loadings, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    n, r = b.shape
    if n < 2:
        raise DimensionMismatch("need at least two series")
    d = np.zeros((n, n))
    for col in range(r):
        d += np.abs(b[:, col, None] - b[None, :, col])
    d /= r
    # exact symmetry regardless of summation order
    d = np.triu(d, 1)
    return DistanceMatrix(d + d.T)


@dataclass(frozen=True, eq=False)
class AhcPath:
    """
    Full agglomeration path.  ``labels[N - K]`` holds the (uncanonicalized)
    slot labels of the K-group partition; a cluster's slot is its smallest
    member index.
    """

    labels: np.ndarray
    merge_log: tuple

    @property
    def n(self) -> int:
        return self.labels.shape[1]

    def partition(self, k: int) -> Partition:
        if not 1 <= k <= self.n:
            raise ValueError(f"K={k} outside 1..{self.n}")
        return partition_from_assignment(self.labels[self.n - k])

    @cached_property
    def partitions(self) -> tuple:
        """Partitions for K = N, N-1, ..., 1."""
        return tuple(self.partition(k) for k in range(self.n, 0, -1))


def ahc_complete_linkage(d: DistanceMatrix) -> AhcPath:
    """
    Agglomerate N singletons down to one group, each step merging the pair of
    groups with the smallest complete-linkage (maximum) distance.

    Ties go to the lexicographically smallest pair of slots, where a group's
    slot is its smallest member index; the merged group keeps the lower slot.
    """
    dist = np.array(d.d, dtype=float)
    n = dist.shape[0]
    np.fill_diagonal(dist, np.inf)
    slot = np.arange(n)
    labels = np.empty((n, n), dtype=np.intp)
    labels[0] = slot
    log = []
    for step in range(1, n):
        flat = int(np.argmin(dist))  # first occurrence = smallest (i, j)
        i, j = divmod(flat, n)
        if i > j:
            i, j = j, i
        height = float(dist[i, j])
        log.append((step, (i, j), height))
        # complete linkage update
        merged = np.maximum(dist[i], dist[j])
        merged[i] = np.inf
        dist[i] = merged
        dist[:, i] = merged
        dist[j] = np.inf
        dist[:, j] = np.inf
        slot = np.where(slot == j, i, slot)
        labels[step] = slot
    return AhcPath(labels, tuple(log))


def rho_default(min_group_size: int, t: int) -> float:
    """``log(m)/m`` with ``m = min(min_group_size, T)``."""
    m = min(int(min_group_size), int(t))
    if m < 2:
        raise DegenerateGroup(f"min(N_K, T)={m} < 2 gives a non-positive penalty")
    return math.log(m) / m


def _residual_ms(panel: Panel, scores: np.ndarray, loadings: np.ndarray) -> float:
    resid = panel.values - scores @ loadings.T
    return float(np.sum(resid ** 2)) / (panel.t * panel.n)


def goodness_of_fit(panel: Panel, scores, partition: Partition) -> float:
    """``S(K)``: mean squared residual under the post-grouping loadings."""
    scores = np.asarray(scores, dtype=float)
    return _residual_ms(panel, scores, postgroup_loadings(panel, scores, partition))


@dataclass(frozen=True)
class GroupSelectionReport:
    k_hat: int
    ic_values: tuple
    s_values: tuple
    rho_values: tuple
    partition: Partition

    @property
    def k_bar(self) -> int:
        return len(self.ic_values)


def default_k_bar(n: int) -> int:
    return min(15, n)


def select_group_count(panel: Panel, scores, path: AhcPath, k_bar: int | None = None
                       ) -> GroupSelectionReport:
    """
    ``K_hat = argmin_{1<=K<=k_bar} log S(K) + K rho(K)``, with ``rho(K)``
    recomputed from the smallest group of the K-group partition.

    A candidate whose smallest group leaves ``min(N_K, T) < 2`` has no valid
    penalty; it gets IC = +inf and rho = nan and can never be selected.
    """
    n = panel.n
    if k_bar is None:
        k_bar = default_k_bar(n)
    if not 1 <= k_bar <= n:
        raise ValueError(f"k_bar={k_bar} must lie in 1..N={n}")
    if path.n != n:
        raise DimensionMismatch("AHC path and panel disagree on N")
    scores = np.asarray(scores, dtype=float)
    ics, ss, rhos, parts = [], [], [], []
    for k in range(1, k_bar + 1):
        part = path.partition(k)
        s = goodness_of_fit(panel, scores, part)
        try:
            rho = rho_default(part.min_size, panel.t)
        except DegenerateGroup:
            rho = math.nan
        if s <= 0.0:
            raise ZeroResidual(k)
        ic = math.inf if math.isnan(rho) else math.log(s) + k * rho
        ics.append(ic)
        ss.append(s)
        rhos.append(rho)
        parts.append(part)
    best = int(np.argmin(ics))
    return GroupSelectionReport(best + 1, tuple(ics), tuple(ss), tuple(rhos), parts[best])

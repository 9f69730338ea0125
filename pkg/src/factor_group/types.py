"""
Core data containers.

All containers are frozen dataclasses; array fields are copied on
construction and marked read-only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyAssignment, NonFiniteEntry


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


class Method(str, enum.Enum):
    PCA = "PCA"
    PPCA = "PPCA"
    POSTGROUP = "POSTGROUP"


@dataclass(frozen=True, eq=False)
class Panel:
    """T x N observation matrix, rows = time, columns = series."""

    values: np.ndarray
    time_labels: tuple
    series_names: tuple

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DimensionMismatch(f"panel values must be 2-d, got shape {values.shape}")
        t, n = values.shape
        if t < 2 or n < 2:
            raise DimensionMismatch(f"panel needs T >= 2 and N >= 2, got {values.shape}")
        if len(self.time_labels) != t:
            raise DimensionMismatch(f"{len(self.time_labels)} time labels for T={t}")
        if len(self.series_names) != n:
            raise DimensionMismatch(f"{len(self.series_names)} series names for N={n}")
        bad = ~np.isfinite(values)
        if bad.any():
            raise NonFiniteEntry(np.argwhere(bad)[0])
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "time_labels", tuple(self.time_labels))
        object.__setattr__(self, "series_names", tuple(self.series_names))

    @property
    def t(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def rows(self, index) -> "Panel":
        """Sub-panel on a subset of time rows."""
        index = np.asarray(index)
        labels = [self.time_labels[i] for i in np.arange(self.t)[index]]
        return Panel(self.values[index], labels, self.series_names)


def make_panel(values, time_labels=None, series_names=None) -> Panel:
    """Validated Panel; default labels are 0..T-1 and s0..s{N-1}."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise DimensionMismatch(f"panel values must be 2-d, got shape {values.shape}")
    if time_labels is None:
        time_labels = range(values.shape[0])
    if series_names is None:
        series_names = [f"s{i}" for i in range(values.shape[1])]
    return Panel(values, tuple(time_labels), tuple(series_names))


@dataclass(frozen=True, eq=False)
class FactorFit:
    scores: np.ndarray
    loadings: np.ndarray
    r: int
    lam: float
    method: Method
    eigenvalues: np.ndarray | None = None

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float)
        loadings = np.asarray(self.loadings, dtype=float)
        if scores.ndim != 2 or loadings.ndim != 2:
            raise DimensionMismatch("scores and loadings must be 2-d")
        if scores.shape[1] != self.r or loadings.shape[1] != self.r:
            raise DimensionMismatch(
                f"r={self.r} but scores {scores.shape}, loadings {loadings.shape}")
        if not 1 <= self.r <= min(scores.shape[0], loadings.shape[0]):
            raise DimensionMismatch(f"r={self.r} outside 1..min(T, N)")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        object.__setattr__(self, "scores", _frozen(scores))
        object.__setattr__(self, "loadings", _frozen(loadings))
        object.__setattr__(self, "method", Method(self.method))
        if self.eigenvalues is not None:
            object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))


@dataclass(frozen=True)
class Partition:
    """
    Assignment of N series to K disjoint groups, ids canonical 1..K by
    first appearance.  Build with :func:`partition_from_assignment`.
    """

    assignment: tuple
    k: int
    sizes: tuple

    def __post_init__(self):
        if not self.assignment:
            raise EmptyAssignment("assignment is empty")
        if sum(self.sizes) != len(self.assignment) or len(self.sizes) != self.k:
            raise ValueError("sizes inconsistent with assignment")
        if max(self.assignment) != self.k or min(self.assignment) != 1:
            raise ValueError("group ids must span 1..k")

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def labels(self) -> np.ndarray:
        """Zero-based group labels as an int array."""
        return np.asarray(self.assignment, dtype=np.intp) - 1

    def groups(self) -> list[np.ndarray]:
        labels = self.labels
        return [np.flatnonzero(labels == g) for g in range(self.k)]

    @property
    def min_size(self) -> int:
        return min(self.sizes)


def partition_from_assignment(assignment: Sequence) -> Partition:
    """
    Canonical Partition from arbitrary hashable group ids.

    >>> partition_from_assignment([7, 7, 3, 3]).assignment
    (1, 1, 2, 2)
    """
    a = np.asarray(list(assignment))
    if a.size == 0:
        raise EmptyAssignment("assignment is empty")
    _, first, inverse = np.unique(a, return_index=True, return_inverse=True)
    # rank of each unique value by position of its first appearance
    rank = np.empty(first.size, dtype=np.intp)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    canon = rank[inverse.ravel()] + 1
    sizes = np.bincount(canon)[1:]
    return Partition(tuple(int(c) for c in canon), int(first.size),
                     tuple(int(s) for s in sizes))


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise DimensionMismatch(f"distance matrix must be square, got {d.shape}")
        if not np.all(np.isfinite(d)):
            raise NonFiniteEntry(np.argwhere(~np.isfinite(d))[0])
        if np.any(d < 0) or np.any(np.diag(d) != 0) or not np.array_equal(d, d.T):
            raise ValueError("distance matrix must be symmetric, nonnegative, zero diagonal")
        object.__setattr__(self, "d", _frozen(d))

    @property
    def n(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True, eq=False)
class CommonComponents:
    c: np.ndarray = field()

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 2:
            raise DimensionMismatch("common components must be 2-d")
        object.__setattr__(self, "c", _frozen(c))

"""Number of factors via the Bai-Ng IC2 criterion."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .estimators import leading_eigh
from .types import Panel

# V(k) at or below this fraction of mean(X**2) is treated as an exact fit
_ZERO_RTOL = 1e-20


@dataclass(frozen=True)
class FactorCountReport:
    r_hat: int
    criterion_values: tuple

    @property
    def r_max(self) -> int:
        return len(self.criterion_values)


def default_r_max(panel: Panel) -> int:
    return max(1, min(8, min(panel.t, panel.n) - 1))


def ic2_values(panel: Panel, r_max: int) -> list[float]:
    x = panel.values
    t, n = x.shape
    # nested PCA fits share one eigendecomposition
    _, vecs = leading_eigh(x @ x.T, r_max)
    scores = math.sqrt(t) * vecs
    scale = float(np.mean(x ** 2))
    penalty_rate = (n + t) / (n * t) * math.log(min(n, t))
    out = []
    for k in range(1, r_max + 1):
        f = scores[:, :k]
        resid = x - f @ (f.T @ x) / t
        v = float(np.sum(resid ** 2)) / (n * t)
        log_v = -math.inf if v <= _ZERO_RTOL * scale else math.log(v)
        out.append(log_v + k * penalty_rate)
    return out


def ic2_select(panel: Panel, r_max: int | None = None) -> FactorCountReport:
    """
    Minimize ``IC2(k) = log V(k) + k (N+T)/(NT) log min(N, T)`` over
    ``k = 1..r_max``; ties go to the smaller k.  ``V(k) = 0`` maps to -inf.
    """
    if r_max is None:
        r_max = default_r_max(panel)
    if not 1 <= r_max <= min(panel.t, panel.n) - 1:
        raise DimensionMismatch(
            f"r_max={r_max} must lie in 1..min(T, N)-1={min(panel.t, panel.n) - 1}")
    values = ic2_values(panel, r_max)
    r_hat = int(np.argmin(values)) + 1  # first minimum
    return FactorCountReport(r_hat, tuple(values))

"""
PCA and fusion-penalized PCA (PPCA) for approximate factor models.

The fusion penalty on all loading pairs makes the loading step a linear
shrinkage ``B = D^{-1} X' F / T`` with ``D = I + lam * (I - 11'/N)``.
``D^{-1}`` is the identity plus a rank-one term, so neither ``D`` nor its
inverse is ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, EigenFailure, RankDeficient
from .types import CommonComponents, FactorFit, Method, Panel



@dataclass(frozen=True)
class ShrinkOperator:
    """``D^{-1} = lam/((1+lam)N) * 11' + 1/(1+lam) * I`` for panel width ``n``."""

    lam: float
    n: int

    def __post_init__(self):
        if not math.isfinite(self.lam) or self.lam < 0:
            raise ValueError(f"lambda must be finite and >= 0, got {self.lam}")
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def identity_weight(self) -> float:
        return 1.0 / (1.0 + self.lam)

    @property
    def mean_weight(self) -> float:
        return self.lam / ((1.0 + self.lam) * self.n)

    def apply(self, m):
        return shrink_apply(self, m)

    def dense(self) -> np.ndarray:
        """Materialized N x N inverse; for tests and small N only."""
        return (self.mean_weight * np.ones((self.n, self.n))
                + self.identity_weight * np.eye(self.n))


def shrink_apply(op: ShrinkOperator, m) -> np.ndarray:
    """``D^{-1} M`` in O(N m) time."""
    m = np.asarray(m, dtype=float)
    if m.shape[0] != op.n:
        raise DimensionMismatch(f"operator is for N={op.n}, matrix has {m.shape[0]} rows")
    if op.lam == 0:
        return m.copy()
    return op.identity_weight * m + op.mean_weight * m.sum(axis=0, keepdims=True)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    # largest |entry| of each column positive; argmax picks the lowest index on ties
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def leading_eigh(s: np.ndarray, r: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Leading ``r`` eigenpairs of a symmetric matrix, eigenvalues descending,
    eigenvector signs normalized.
    """
    m = s.shape[0]
    if not 1 <= r <= m:
        raise DimensionMismatch(f"cannot take {r} eigenpairs of a {m}x{m} matrix")
    try:
        vals, vecs = scipy.linalg.eigh(s, subset_by_index=[m - r, m - 1])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenFailure(str(exc)) from exc
    vals, vecs = vals[::-1], vecs[:, ::-1]
    return vals, _fix_signs(vecs)


def _scores_from_gram(gram: np.ndarray, r: int, t: int):
    vals, vecs = leading_eigh(gram, r)
    # numerical-rank tolerance: eigenvalues at roundoff level count as zero
    tol = gram.shape[0] * np.finfo(float).eps * max(abs(vals[0]), np.finfo(float).tiny)
    if np.any(vals <= tol):
        raise RankDeficient(f"fewer than {r} positive eigenvalues", vals)
    return math.sqrt(t) * vecs, vals


def _check_r(panel: Panel, r: int):
    if not isinstance(r, (int, np.integer)) or not 1 <= r <= min(panel.t, panel.n):
        raise DimensionMismatch(f"r={r} must be an integer in 1..min(T, N)={min(panel.t, panel.n)}")


def pca_fit(panel: Panel, r: int) -> FactorFit:
    """
    Conventional PCA: scores are sqrt(T) times the leading eigenvectors of
    X X', loadings X' F / T.
    """
    _check_r(panel, r)
    x = panel.values
    scores, vals = _scores_from_gram(x @ x.T, r, panel.t)
    loadings = x.T @ scores / panel.t
    return FactorFit(scores, loadings, int(r), 0.0, Method.PCA, vals)


def ppca_gram(x: np.ndarray, lam: float, xxt: np.ndarray | None = None) -> np.ndarray:
    """``X D^{-1} X'`` via the rank-one split; pass ``xxt`` to reuse X X'."""
    op = ShrinkOperator(lam, x.shape[1])
    if xxt is None:
        xxt = x @ x.T
    if lam == 0:
        return xxt
    s = x.sum(axis=1)
    return op.identity_weight * xxt + op.mean_weight * np.outer(s, s)


def ppca_fit(panel: Panel, r: int, lam: float, xxt: np.ndarray | None = None) -> FactorFit:
    """
    Closed-form penalized PCA.

    Parameters
    ----------
    panel : Panel
    r : int
        Number of factors.
    lam : float
        Fusion penalty in the ``lam = N**2 * lam_tilde`` parameterization.
        Must be finite.
    xxt : ndarray, optional
        Precomputed ``X X'``; lets a caller sweep lambda without redoing
        the T x T product.

    Returns
    -------
    FactorFit
        Scores are sqrt(T) times the leading eigenvectors of
        ``X D^{-1} X'``; loadings are ``D^{-1} X' F / T``.  At ``lam = 0``
        this coincides with :func:`pca_fit`.
    """
    _check_r(panel, r)
    op = ShrinkOperator(float(lam), panel.n)
    x = panel.values
    scores, vals = _scores_from_gram(ppca_gram(x, op.lam, xxt), r, panel.t)
    loadings = shrink_apply(op, x.T @ scores) / panel.t
    return FactorFit(scores, loadings, int(r), op.lam, Method.PPCA, vals)


def penalized_objective(panel: Panel, scores, loadings, lam: float) -> float:
    """``(TN)^{-1} ||X - F B'||_F^2 + (lam/N) tr(B' Pi_N B)``, ``Pi_N = I - 11'/N``."""
    x = panel.values
    t, n = x.shape
    b = np.asarray(loadings)
    resid = x - np.asarray(scores) @ b.T
    centered = b - b.mean(axis=0, keepdims=True)
    return float(np.sum(resid ** 2) / (t * n) + lam / n * np.sum(centered ** 2))


def common_components(fit: FactorFit) -> CommonComponents:
    return CommonComponents(fit.scores @ fit.loadings.T)


def oracle_lambda(true_loadings, t: int) -> float:
    """
    Rate-optimal penalty ``N / (T ||B*||_F^2)`` where ``B*`` is the loading
    matrix with its cross-sectional mean removed.  ``math.inf`` when all
    loading rows coincide.
    """
    b = np.asarray(true_loadings, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    if t < 1:
        raise ValueError("T must be >= 1")
    n = b.shape[0]
    ss = float(np.sum((b - b.mean(axis=0, keepdims=True)) ** 2))
    # roundoff in the mean leaves ~eps-sized residue for identical rows
    if ss <= b.size * (64 * np.finfo(float).eps * np.max(np.abs(b), initial=0.0)) ** 2:
        return math.inf
    return n / (t * ss)

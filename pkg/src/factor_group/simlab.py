"""
Monte-Carlo lab: grouped factor-model DGPs, accuracy and clustering metrics,
and a seeded replication driver.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DimensionMismatch, FactorGroupError, IndivisibleGroups, LengthMismatch, RankDeficient
from .estimators import common_components
from .factor_count import ic2_select
from .pipeline import GroupedFit, PipelineOptions, fit_pipeline
from .types import CommonComponents, Partition, make_panel, partition_from_assignment


class Scenario(str, enum.Enum):
    S1 = "S1"
    S2 = "S2"

    @classmethod
    def parse(cls, value) -> "Scenario":
        return value if isinstance(value, cls) else cls(str(value).upper())


# group loading vectors; theta_i = THETA_SCALE * ||b_i||^2
GROUP_LOADINGS = {
    Scenario.S1: np.array([[2.0, 0.0], [0.0, 2.0], [2.4, 3.2]]),
    Scenario.S2: np.array([[2.0, 0.0], [0.0, 2.0], [1.0, 3.0], [3.0, 1.0]]),
}
THETA_SCALE = {Scenario.S1: 4.0 / 3.0, Scenario.S2: 1.0}
GROUP_THETA = {
    Scenario.S1: (16 / 3, 16 / 3, 64 / 3),
    Scenario.S2: (4.0, 4.0, 10.0, 10.0),
}
# (T values, N values) of the simulation designs
DESIGN_GRID = {
    Scenario.S1: ((200, 150, 100), (150, 120, 90)),
    Scenario.S2: ((150, 100), (200, 160, 120)),
}
DESIGN_KAPPAS = (0.5, 0.8, 1.0)


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario = Scenario.S1
    t: int = 200
    n: int = 150
    kappa: float = 0.5
    ar_coeff: float = 0.2
    band_value: float = 0.02
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario.parse(self.scenario))
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.n % self.k0 != 0:
            raise IndivisibleGroups(f"N={self.n} is not divisible by K0={self.k0}")
        if self.t < 2:
            raise ValueError("T must be >= 2")

    @property
    def k0(self) -> int:
        return GROUP_LOADINGS[self.scenario].shape[0]

    @property
    def r(self) -> int:
        return GROUP_LOADINGS[self.scenario].shape[1]


@dataclass(frozen=True, eq=False)
class SimDraw:
    panel: object
    true_scores: np.ndarray
    true_loadings: np.ndarray
    truth: Partition
    theta: np.ndarray

    @property
    def common(self) -> np.ndarray:
        return self.true_scores @ self.true_loadings.T


def gen_ar1_factors(t: int, r: int, phi: float, rng: np.random.Generator) -> np.ndarray:
    """Independent stationary AR(1) columns with N(0, 1) innovations."""
    if not abs(phi) < 1:
        raise ValueError("|phi| must be < 1")
    v = rng.standard_normal((t, r))
    f = np.empty((t, r))
    f[0] = v[0] / math.sqrt(1.0 - phi * phi)
    for s in range(1, t):
        f[s] = phi * f[s - 1] + v[s]
    return f


def gen_banded(n: int, band_value: float = 0.02) -> np.ndarray:
    """Unit diagonal, ``band_value`` on the first off-diagonals."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = np.eye(n)
    idx = np.arange(n - 1)
    p[idx, idx + 1] = band_value
    p[idx + 1, idx] = band_value
    return p


def simulate(config: ScenarioConfig, rng: np.random.Generator | None = None) -> SimDraw:
    """
    One draw of ``x_ti = b_i' f_t + sqrt(theta_i) e_ti`` with
    ``E = P1 S P2`` and ``S_tj ~ N(0, kappa)``.  Series are ordered by group.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    sc = config.scenario
    groups = GROUP_LOADINGS[sc]
    k0 = config.k0
    size = config.n // k0
    labels = np.repeat(np.arange(k0), size)
    b = groups[labels]
    theta = THETA_SCALE[sc] * np.sum(b ** 2, axis=1)
    assert np.allclose(theta, np.asarray(GROUP_THETA[sc])[labels], rtol=1e-14)

    f = gen_ar1_factors(config.t, config.r, config.ar_coeff, rng)
    s = rng.normal(0.0, math.sqrt(config.kappa), size=(config.t, config.n))
    e = gen_banded(config.t, config.band_value) @ s @ gen_banded(config.n, config.band_value)
    x = f @ b.T + e * np.sqrt(theta)
    panel = make_panel(x)
    return SimDraw(panel, f, b, partition_from_assignment(labels), theta)


def mse_common(estimated, truth) -> float:
    """``(NT)^{-1} ||C_hat - C||_F^2``."""
    c = estimated.c if isinstance(estimated, CommonComponents) else np.asarray(estimated, float)
    truth = np.asarray(truth, dtype=float)
    if c.shape != truth.shape:
        raise DimensionMismatch(f"shapes {c.shape} and {truth.shape} differ")
    return float(np.mean((c - truth) ** 2))


def _left_basis(b: np.ndarray) -> np.ndarray:
    u, s, _ = np.linalg.svd(b, full_matrices=False)
    if s.size == 0 or s[-1] <= max(b.shape) * np.finfo(float).eps * s[0]:
        raise RankDeficient("loading matrix is not of full column rank", s)
    return u


def subspace_distance(b_est, b_true) -> float:
    """
    ``sqrt(1 - tr(Q_est Q_est' Q Q') / r)`` over the left singular bases.

    When the column counts differ (a misestimated factor number), ``r`` is the
    larger of the two so that the distance stays positive.
    """
    b_est = np.asarray(b_est, dtype=float)
    b_true = np.asarray(b_true, dtype=float)
    if b_est.shape[0] != b_true.shape[0]:
        raise DimensionMismatch("loading matrices have different row counts")
    q_est, q = _left_basis(b_est), _left_basis(b_true)
    r = max(q_est.shape[1], q.shape[1])
    overlap = float(np.sum((q_est.T @ q) ** 2))  # tr(QeQe'QQ')
    return math.sqrt(min(1.0, max(0.0, 1.0 - overlap / r)))


def pair_counts(est: Partition, truth: Partition) -> tuple[int, int, int, int]:
    """
    Pair counts (a, b, c, d): together in both, together only in ``est``,
    together only in ``truth``, apart in both.
    """
    if est.n != truth.n:
        raise LengthMismatch(f"partitions of {est.n} and {truth.n} series")
    table = np.zeros((est.k, truth.k), dtype=np.int64)
    np.add.at(table, (est.labels, truth.labels), 1)
    comb2 = lambda v: int(np.sum(v * (v - 1) // 2))
    a = comb2(table)
    same_est = comb2(table.sum(axis=1))
    same_truth = comb2(table.sum(axis=0))
    total = est.n * (est.n - 1) // 2
    return a, same_est - a, same_truth - a, total - same_est - same_truth + a


def clustering_indexes(est: Partition, truth: Partition) -> dict:
    """Rand, adjusted Rand (Hubert-Arabie), Jaccard and purity."""
    a, b, c, d = pair_counts(est, truth)
    total = a + b + c + d
    n = est.n
    if total == 0:
        return dict(rand=1.0, arand=1.0, jaccard=1.0, purity=1.0)
    rand = (a + d) / total
    # Hubert-Arabie form scaled by 2 * total so both terms are integers and the
    # single int/int division is correctly rounded
    pe, pt = a + b, a + c
    num = 2 * total * a - 2 * pe * pt
    den = total * (pe + pt) - 2 * pe * pt
    arand = 1.0 if den == 0 else num / den
    jaccard = 1.0 if a + b + c == 0 else a / (a + b + c)
    table = np.zeros((est.k, truth.k), dtype=np.int64)
    np.add.at(table, (est.labels, truth.labels), 1)
    purity = float(table.max(axis=1).sum()) / n
    return dict(rand=rand, arand=arand, jaccard=jaccard, purity=purity)


@dataclass(frozen=True)
class RouteStats:
    """Grouping metrics of one initial estimator, averaged over replications."""

    mse_initial: float = math.nan
    k_hat_mean: float = math.nan
    freq_under: int = 0
    freq_over: int = 0
    rand: float = math.nan
    arand: float = math.nan
    jaccard: float = math.nan
    purity: float = math.nan
    subspace_dist: float = math.nan
    mse_post: float = math.nan


@dataclass(frozen=True)
class RepSummary:
    config: ScenarioConfig
    n_reps: int
    n_failed: int
    r_correct: int
    ppca: RouteStats
    pca: RouteStats
    lambda_mean: float = math.nan
    failures: tuple = field(default=())

    # flat accessors for the PPCA route
    @property
    def mse_ppca(self) -> float:
        return self.ppca.mse_initial

    @property
    def mse_pca(self) -> float:
        return self.pca.mse_initial

    def __getattr__(self, name):
        if name in RouteStats.__dataclass_fields__:
            return getattr(self.ppca, name)
        raise AttributeError(name)


def replication_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(rep)]))


def _route_metrics(draw: SimDraw, fit: GroupedFit) -> dict:
    out = dict(mse_initial=mse_common(common_components(fit.initial), draw.common),
               k_hat=fit.k_hat,
               subspace_dist=subspace_distance(fit.postgroup.loadings, draw.true_loadings),
               mse_post=mse_common(common_components(fit.postgroup), draw.common))
    out.update(clustering_indexes(fit.partition, draw.truth))
    return out


def run_one(config: ScenarioConfig, rep: int, options: PipelineOptions) -> dict:
    """One replication; returns a flat dict of metrics for both routes."""
    draw = simulate(config, replication_rng(config.seed, rep))
    if options.r is None:
        r = ic2_select(draw.panel, options.r_max).r_hat
    else:
        r = options.r
    ppca = fit_pipeline(draw.panel, options, penalized=True, r=r)
    pca = fit_pipeline(draw.panel, options, penalized=False, r=r)
    return dict(r_hat=r, lam=ppca.initial.lam,
                ppca=_route_metrics(draw, ppca), pca=_route_metrics(draw, pca))


def _safe_run(args):
    config, rep, options = args
    try:
        return run_one(config, rep, options)
    except (FactorGroupError, np.linalg.LinAlgError) as exc:
        return dict(error=f"rep {rep}: {type(exc).__name__}: {exc}")


def _aggregate(rows: list[dict], k0: int) -> RouteStats:
    if not rows:
        return RouteStats()
    mean = lambda key: float(np.mean([row[key] for row in rows]))
    k = [row["k_hat"] for row in rows]
    return RouteStats(
        mse_initial=mean("mse_initial"), k_hat_mean=float(np.mean(k)),
        freq_under=sum(v < k0 for v in k), freq_over=sum(v > k0 for v in k),
        rand=mean("rand"), arand=mean("arand"), jaccard=mean("jaccard"),
        purity=mean("purity"), subspace_dist=mean("subspace_dist"), mse_post=mean("mse_post"))


def run_replications(config: ScenarioConfig, n_reps: int,
                     options: PipelineOptions = PipelineOptions(), threads: int = 1) -> RepSummary:
    """
    Seeded Monte-Carlo replications of simulate -> IC2 -> CV lambda -> PPCA and
    PCA fits -> AHC -> K_hat -> post-grouping refit -> metrics.

    Replication ``i`` draws from ``SeedSequence([config.seed, i])``, so results
    do not depend on ``threads``.  Failed replications are counted and
    excluded from the means.
    """
    if n_reps < 1:
        raise ValueError("n_reps must be >= 1")
    jobs = [(config, rep, options) for rep in range(n_reps)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_safe_run, jobs))
    else:
        results = [_safe_run(job) for job in jobs]
    ok = [res for res in results if "error" not in res]
    failures = tuple(res["error"] for res in results if "error" in res)
    return RepSummary(
        config=config, n_reps=n_reps, n_failed=len(failures),
        r_correct=sum(res["r_hat"] == config.r for res in ok),
        ppca=_aggregate([res["ppca"] for res in ok], config.k0),
        pca=_aggregate([res["pca"] for res in ok], config.k0),
        lambda_mean=float(np.mean([res["lam"] for res in ok])) if ok else math.nan,
        failures=failures)


SUMMARY_COLUMNS = ("scenario", "t", "n", "kappa", "init", "mse", "k_hat_mean", "freq_under",
                   "freq_over", "rand", "arand", "jaccard", "purity", "subspace_dist",
                   "mse_post", "n_reps", "n_failed")


def summary_rows(summary: RepSummary) -> list[dict]:
    """Two table rows (PCA then PPCA initial values) in the summary.csv schema."""
    cfg = summary.config
    rows = []
    for name, route in (("PCA", summary.pca), ("PPCA", summary.ppca)):
        stats = asdict(route)
        rows.append(dict(scenario=cfg.scenario.value, t=cfg.t, n=cfg.n, kappa=cfg.kappa,
                         init=name, mse=stats.pop("mse_initial"), **stats,
                         n_reps=summary.n_reps, n_failed=summary.n_failed))
    return rows


def design_configs(scenario, seed: int = 0, ts=None, ns=None, kappas=None) -> list[ScenarioConfig]:
    """All (T, N, kappa) designs for a scenario, optionally filtered."""
    sc = Scenario.parse(scenario)
    t_vals, n_vals = DESIGN_GRID[sc]
    out = []
    for t in t_vals:
        for n in n_vals:
            for kappa in DESIGN_KAPPAS:
                if ts and t not in ts or ns and n not in ns or kappas and kappa not in kappas:
                    continue
                out.append(ScenarioConfig(sc, t, n, kappa, seed=seed))
    return out


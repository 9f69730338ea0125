import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from factor_group.errors import InsufficientRows
from factor_group.estimators import pca_fit
from factor_group.tuning import (CvMode, cv_select_lambda, default_lambda_grid, heldout_loss,
                                 lambda_grid, time_blocks)
from factor_group.types import make_panel

from conftest import grouped_panel


def test_default_grid_150():
    grid = default_lambda_grid(150)
    assert len(grid) == 21
    assert grid[0] == 1.0 and grid[-2] == 20.0 and grid[-1] == 150.0
    assert grid[1] == pytest.approx(1 / 0.95)
    assert all(a < b for a, b in zip(grid, grid[1:]))


def test_default_grid_dedup():
    assert len(default_lambda_grid(20)) == 20


def test_library_grid_prepends_zero():
    assert lambda_grid(150) == (0.0,) + default_lambda_grid(150)
    assert lambda_grid(150, exact=True) == default_lambda_grid(150)


def test_cv_mode_parse():
    assert CvMode.parse("2") is CvMode.CV2
    assert CvMode.parse("cv1") is CvMode.CV1
    with pytest.raises(ValueError):
        CvMode.parse("3")


def test_time_blocks_contiguous_cover():
    blocks = time_blocks(23, 5)
    np.testing.assert_array_equal(np.concatenate(blocks), np.arange(23))
    assert [len(b) for b in blocks] == [5, 5, 5, 4, 4]


def test_noiseless_ties_pick_smallest(rng):
    panel, *_ = grouped_panel(rng, t=40, sizes=(6, 6, 6))
    report = cv_select_lambda(panel, 2, grid=[0.0, 0.5, 2.0], folds=4)
    assert report.lambda_hat == 0.0
    assert np.all(report.totals < 1e-12 * np.sum(panel.values ** 2))


def test_single_value_grid(rng):
    panel, *_ = grouped_panel(rng, noise=0.5)
    report = cv_select_lambda(panel, 2, grid=[3.0], folds=5, mode="CV1")
    assert report.lambda_hat == 3.0
    assert report.cv_scores.shape == (1, 5)


def test_report_consistency(rng):
    panel, *_ = grouped_panel(rng, t=30, sizes=(5, 5, 5), noise=0.7)
    report = cv_select_lambda(panel, 2, grid=[4.0, 0.0, 1.0], folds=5)
    assert report.grid == (0.0, 1.0, 4.0)
    assert np.all(np.isfinite(report.cv_scores))
    assert report.lambda_hat == report.grid[int(np.argmin(report.totals))]
    assert report.mode is CvMode.CV2


def test_cv1_zero_is_plain_pca_cv(rng):
    panel, *_ = grouped_panel(rng, t=24, sizes=(4, 4, 4), noise=0.7)
    report = cv_select_lambda(panel, 2, grid=[0.0], folds=4, mode="CV1")
    # independent loop: PCA on training rows, regression on held-out rows
    total = 0.0
    for block in np.array_split(np.arange(24), 4):
        keep = np.setdiff1d(np.arange(24), block)
        b = pca_fit(make_panel(panel.values[keep]), 2).loadings
        xv = panel.values[block]
        coef = np.linalg.solve(b.T @ b, b.T @ xv.T)
        total += np.sum((xv - coef.T @ b.T) ** 2)
    assert report.totals[0] == pytest.approx(total, rel=1e-10)


def test_heldout_loss_zero_in_span(rng):
    b = rng.standard_normal((6, 2))
    x = rng.standard_normal((3, 2)) @ b.T
    assert heldout_loss(x, b) < 1e-20


def test_errors(rng):
    panel, *_ = grouped_panel(rng, t=6, noise=0.3)
    with pytest.raises(ValueError):
        cv_select_lambda(panel, 2, grid=[], folds=2)
    with pytest.raises(ValueError):
        cv_select_lambda(panel, 2, folds=7)
    with pytest.raises(InsufficientRows):
        cv_select_lambda(panel, 5, grid=[0.0], folds=2, mode="CV1")


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1))
def test_column_permutation_invariance(seed):
    gen = np.random.default_rng(seed)
    panel, *_ = grouped_panel(gen, t=24, sizes=(4, 4, 4), noise=1.0)
    perm = gen.permutation(12)
    grid = [0.0, 0.3, 3.0]
    a = cv_select_lambda(panel, 2, grid=grid, folds=4, mode="CV1")
    b = cv_select_lambda(make_panel(panel.values[:, perm]), 2, grid=grid, folds=4, mode="CV1")
    assert a.lambda_hat == b.lambda_hat
    np.testing.assert_allclose(a.totals, b.totals, rtol=1e-9)

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from factor_group.errors import DimensionMismatch, IdentificationError, SingularLoadings
from factor_group.estimators import common_components, pca_fit
from factor_group.refit import (factor_scores, group_means, postgroup_fit, postgroup_loadings,
                                refit_factors)
from factor_group.types import Method, make_panel, partition_from_assignment

from conftest import grouped_panel


def orthonormal_scores(gen, t, r):
    return np.linalg.qr(gen.standard_normal((t, r)))[0] * math.sqrt(t)


def test_singletons_give_ols(rng):
    x = rng.standard_normal((30, 6))
    panel = make_panel(x)
    f = orthonormal_scores(rng, 30, 2)
    b = postgroup_loadings(panel, f, partition_from_assignment(range(6)))
    np.testing.assert_allclose(b, x.T @ f / 30, atol=1e-12)


def test_exact_model_recovers_b(rng):
    panel, f, b, labels = grouped_panel(rng, t=40)
    f = orthonormal_scores(rng, 40, 2)
    panel = make_panel(f @ b.T)
    out = postgroup_loadings(panel, f, partition_from_assignment(labels))
    np.testing.assert_allclose(out, b, atol=1e-10)


def test_two_member_group_is_average(rng):
    x = rng.standard_normal((25, 4))
    panel = make_panel(x)
    f = orthonormal_scores(rng, 25, 2)
    single = postgroup_loadings(panel, f, partition_from_assignment(range(4)))
    paired = postgroup_loadings(panel, f, partition_from_assignment([0, 1, 0, 2]))
    np.testing.assert_allclose(paired[0], (single[0] + single[2]) / 2, atol=1e-14)
    np.testing.assert_array_equal(paired[0], paired[2])


def test_scores_must_be_identified(rng):
    panel = make_panel(rng.standard_normal((10, 4)))
    with pytest.raises(IdentificationError):
        postgroup_loadings(panel, rng.standard_normal((10, 2)), partition_from_assignment(range(4)))
    with pytest.raises(DimensionMismatch):
        postgroup_loadings(panel, orthonormal_scores(rng, 9, 2), partition_from_assignment(range(4)))


def test_partition_size_mismatch(rng):
    panel = make_panel(rng.standard_normal((10, 4)))
    with pytest.raises(DimensionMismatch):
        postgroup_loadings(panel, orthonormal_scores(rng, 10, 1), partition_from_assignment(range(3)))


def test_refit_exact(rng):
    f = rng.standard_normal((12, 2))
    b = rng.standard_normal((7, 2))
    np.testing.assert_allclose(refit_factors(make_panel(f @ b.T), b), f, atol=1e-10)


def test_refit_orthonormal_columns(rng):
    n = 16
    b = np.linalg.qr(rng.standard_normal((n, 3)))[0] * math.sqrt(n)
    x = rng.standard_normal((5, n))
    np.testing.assert_allclose(refit_factors(make_panel(x), b), x @ b / n, atol=1e-12)


def test_refit_5x3_normal_equations():
    x = np.array([[1., 2, 0], [0, 1, 3], [2, -1, 1], [1, 1, 1], [-2, 0, 4]])
    b = np.array([[1., 0.5], [0., 1.], [2., -1.]])
    # per-row least squares via a reference solver, frozen
    expected = np.array([[0.66666667, 1.55555556], [1.16666667, -0.11111111],
                         [0.83333333, 0.11111111], [0.83333333, 0.77777778],
                         [0.66666667, -1.77777778]])
    np.testing.assert_allclose(refit_factors(make_panel(x), b), expected, atol=1e-8)


def test_singular_loadings():
    b = np.array([[1.0, 2.0]] * 6)
    with pytest.raises(SingularLoadings) as info:
        factor_scores(np.ones((3, 6)), b)
    assert info.value.cond > 1e12


def test_postgroup_fit_noiseless(rng):
    panel, _, _, labels = grouped_panel(rng, t=30)
    init = pca_fit(panel, 2)
    post = postgroup_fit(panel, init.scores, partition_from_assignment(labels), lam=2.5)
    assert post.method is Method.POSTGROUP and post.lam == 2.5
    np.testing.assert_allclose(common_components(post).c, panel.values, atol=1e-8)


def test_postgroup_singletons_reduce_to_unrestricted(rng):
    x = rng.standard_normal((30, 5))
    panel = make_panel(x)
    f = orthonormal_scores(rng, 30, 2)
    post = postgroup_fit(panel, f, partition_from_assignment(range(5)))
    np.testing.assert_allclose(post.loadings, x.T @ f / 30, atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.lists(st.integers(0, 3), min_size=8, max_size=8))
def test_group_constant_and_least_squares(seed, raw):
    gen = np.random.default_rng(seed)
    x = gen.standard_normal((20, 8))
    panel = make_panel(x)
    f = orthonormal_scores(gen, 20, 2)
    part = partition_from_assignment(raw)
    b = postgroup_loadings(panel, f, part)
    for members in part.groups():
        assert np.all(b[members] == b[members[0]])
        # dense least squares on the stacked group problem
        stacked_f = np.vstack([f] * len(members))
        stacked_x = x[:, members].T.ravel()
        ref = np.linalg.lstsq(stacked_f, stacked_x, rcond=None)[0]
        np.testing.assert_allclose(b[members[0]], ref, atol=1e-10)


@given(st.integers(0, 2**32 - 1))
def test_group_means_rows_identical(seed):
    gen = np.random.default_rng(seed)
    part = partition_from_assignment(gen.integers(0, 3, size=9))
    out = group_means(gen.standard_normal((9, 2)), part)
    for members in part.groups():
        assert len({tuple(row) for row in out[members]}) == 1

import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from factor_group.types import make_panel

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def grouped_panel(rng, t=40, sizes=(5, 5, 5), group_loadings=None, noise=0.0):
    """Panel F B' + noise with group-constant loadings; returns (panel, F, B, labels)."""
    k = len(sizes)
    if group_loadings is None:
        group_loadings = np.array([[2.0, 0.0], [0.0, 2.0], [2.4, 3.2], [3.0, 1.0]])[:k]
    group_loadings = np.asarray(group_loadings, dtype=float)
    labels = np.repeat(np.arange(k), sizes)
    b = group_loadings[labels]
    f = rng.standard_normal((t, b.shape[1]))
    x = f @ b.T + noise * rng.standard_normal((t, b.shape[0]))
    return make_panel(x), f, b, labels


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the line is printed again in the terminal summary."""
    def record(label: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}"
        print(line)
        _CRITERIA.append(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)

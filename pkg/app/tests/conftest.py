"""Shared fixtures: clean settings per test, seeded generators, synthetic cohorts."""

import os

import numpy as np
import pytest

from app.core.config import reset_settings
from app.fit import fit_cohort, synthetic_cohort


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    """Every test starts from default settings, whatever the caller's environment says."""
    for key in list(os.environ):
        if key.upper().startswith("BETAGEO_"):
            monkeypatch.delenv(key, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def separated_records():
    """Two well-separated classes, Beta(2,8) vs Beta(8,2), 50 subjects each."""
    return synthetic_cohort(n_per_class=50, n_samples=200, jitter=0.1, seed=11)


@pytest.fixture(scope="session")
def separated_cohort(separated_records):
    cohort = fit_cohort(separated_records)
    assert not cohort.exclusions
    return cohort


@pytest.fixture(scope="session")
def small_cohort():
    """A quick two-class cohort (10 per class) for tests that only need structure."""
    return fit_cohort(synthetic_cohort(n_per_class=10, n_samples=100, jitter=0.1, seed=3))

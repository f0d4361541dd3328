"""
Unit tests for the special functions (lnΓ, ψ, ψ′, ψ″).

Reference values come from scipy.special.
"""

import numpy as np
import pytest
from scipy import special

from app.core.errors import DomainError
from app.geometry.specfun import digamma, log_gamma, polygamma_pair, tetragamma, trigamma


@pytest.fixture
def grid(rng):
    """1000 points in (0, 100], denser near zero."""
    return np.concatenate([rng.uniform(0.05, 1.0, 300), rng.uniform(1.0, 100.0, 700)])


# ============================================================================
# ORACLE AGREEMENT
# ============================================================================

class TestAgainstScipy:

    def test_log_gamma(self, grid):
        np.testing.assert_allclose(log_gamma(grid), special.gammaln(grid), rtol=1e-12, atol=1e-11)

    def test_digamma(self, grid):
        np.testing.assert_allclose(digamma(grid), special.psi(grid), rtol=1e-12, atol=1e-11)

    def test_trigamma(self, grid):
        np.testing.assert_allclose(trigamma(grid), special.polygamma(1, grid), rtol=1e-12, atol=1e-11)

    def test_tetragamma(self, grid):
        np.testing.assert_allclose(tetragamma(grid), special.polygamma(2, grid), rtol=1e-10, atol=1e-9)

    def test_at_shift_threshold(self):
        z = np.array([9.999999, 10.0, 10.000001])
        np.testing.assert_allclose(digamma(z), special.psi(z), rtol=1e-14)
        np.testing.assert_allclose(trigamma(z), special.polygamma(1, z), rtol=1e-13)

    def test_known_values(self):
        euler_gamma = 0.5772156649015329
        assert digamma(1.0) == pytest.approx(-euler_gamma, abs=1e-14)
        assert trigamma(1.0) == pytest.approx(np.pi ** 2 / 6, abs=1e-13)
        assert log_gamma(5.0) == pytest.approx(np.log(24.0), abs=1e-13)
        assert tetragamma(1.0) == pytest.approx(-2 * 1.2020569031595942, abs=1e-12)


# ============================================================================
# IDENTITIES
# ============================================================================

class TestRecurrence:

    def test_digamma_recurrence(self, grid):
        np.testing.assert_allclose(digamma(grid + 1) - digamma(grid), 1 / grid, rtol=1e-12, atol=1e-11)

    def test_trigamma_recurrence(self, grid):
        np.testing.assert_allclose(trigamma(grid + 1) - trigamma(grid), -1 / grid ** 2, rtol=1e-12, atol=1e-11)

    def test_tetragamma_recurrence(self, grid):
        np.testing.assert_allclose(tetragamma(grid + 1) - tetragamma(grid), 2 / grid ** 3, rtol=1e-11, atol=1e-11)

    def test_signs(self, grid):
        assert np.all(trigamma(grid) > 0)
        assert np.all(tetragamma(grid) < 0)


class TestFiniteDifferences:

    h = 1e-4

    @pytest.fixture
    def xs(self, rng):
        return rng.uniform(0.5, 50.0, 500)

    def test_digamma_derivative_is_trigamma(self, xs):
        fd = (digamma(xs + self.h) - digamma(xs - self.h)) / (2 * self.h)
        np.testing.assert_allclose(fd, trigamma(xs), rtol=100 * self.h ** 2)

    def test_trigamma_derivative_is_tetragamma(self, xs):
        fd = (trigamma(xs + self.h) - trigamma(xs - self.h)) / (2 * self.h)
        np.testing.assert_allclose(fd, tetragamma(xs), rtol=100 * self.h ** 2)


class TestSubadditivity:

    def test_ratio_is_subadditive(self):
        xs = np.geomspace(1e-2, 1e2, 100)
        gx, gy = np.meshgrid(xs, xs, indexing="ij")
        F = lambda z: trigamma(z) / tetragamma(z)
        gap = F(gx) + F(gy) - F(gx + gy)
        assert np.all(gap >= 0)


# ============================================================================
# DOMAIN AND SHAPES
# ============================================================================

class TestDomain:

    @pytest.mark.parametrize("fn", [log_gamma, digamma, trigamma, tetragamma, polygamma_pair])
    @pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, float("nan"), 1e-310])
    def test_rejects_non_positive(self, fn, bad):
        with pytest.raises(DomainError):
            fn(bad)

    def test_rejects_array_with_one_bad_entry(self):
        with pytest.raises(DomainError):
            digamma(np.array([1.0, 2.0, 0.0]))

    def test_domain_error_is_value_error(self):
        with pytest.raises(ValueError):
            trigamma(-3.0)


class TestShapes:

    def test_scalar_in_scalar_out(self):
        assert isinstance(digamma(2.5), float)
        assert isinstance(trigamma(2), float)

    def test_array_shape_preserved(self):
        z = np.linspace(0.5, 5.0, 12).reshape(3, 4)
        assert digamma(z).shape == (3, 4)
        assert tetragamma(z).shape == (3, 4)

    def test_polygamma_pair_matches_single_functions(self, grid):
        d1, d2 = polygamma_pair(grid)
        np.testing.assert_array_equal(d1, trigamma(grid))
        np.testing.assert_array_equal(d2, tetragamma(grid))

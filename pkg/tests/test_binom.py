"""Binomial primitives: exact values, boundary rules, and bulk identities.

Reference values are frozen from direct evaluation of the closed forms
C(n,k) p^k (1-p)^(n-k) with exact integer binomial coefficients.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binmix.binom import (
    INT_TOL,
    binom_cdf,
    binom_cdf_strict,
    binom_pmf,
    is_integral,
    log_pmf_matrix,
    pmf_matrix,
)


def _pmf_exact(k: int, n: int, p: float) -> float:
    return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)


class TestPmf:
    def test_degenerate_point_mass_at_zero(self):
        assert binom_pmf(0, 10, 0.0) == 1.0
        assert binom_pmf(1, 10, 0.0) == 0.0

    def test_degenerate_point_mass_at_one(self):
        assert binom_pmf(10, 10, 1.0) == 1.0
        assert binom_pmf(9, 10, 1.0) == 0.0

    def test_closed_form_value(self):
        # C(20,2) * 0.1^2 * 0.9^18
        got = binom_pmf(2, 20, 0.1)
        assert got == pytest.approx(_pmf_exact(2, 20, 0.1), abs=1e-12)
        assert got == pytest.approx(0.285179807, abs=1e-9)

    @pytest.mark.parametrize("k", [-1, -7, 6, 100])
    def test_zero_off_support(self, k):
        assert binom_pmf(k, 5, 0.5) == 0.0

    def test_matrix_agrees_with_scalar(self):
        p = np.array([0.0, 0.2, 0.5, 0.9, 1.0])
        mat = pmf_matrix(12, p)
        for i, pi in enumerate(p):
            for k in range(13):
                assert mat[i, k] == pytest.approx(binom_pmf(k, 12, pi), abs=1e-14)

    def test_log_matrix_shape(self):
        assert log_pmf_matrix(7, np.linspace(0, 1, 5)).shape == (5, 8)


class TestCdf:
    def test_full_support(self):
        assert binom_cdf(20, 20, 0.3) == 1.0
        assert binom_cdf(25.5, 20, 0.3) == 1.0

    def test_below_support(self):
        assert binom_cdf(-0.5, 20, 0.3) == 0.0

    def test_fractional_threshold_value(self):
        # floor(2.7) = 2, so the sum runs over k = 0, 1, 2
        want = sum(_pmf_exact(k, 20, 0.1) for k in range(3))
        got = binom_cdf(2.7, 20, 0.1)
        assert got == pytest.approx(want, abs=1e-12)
        assert got == pytest.approx(0.676927, abs=1e-6)

    def test_nondecreasing_in_t(self):
        ts = np.linspace(-1, 21, 200)
        vals = [binom_cdf(t, 20, 0.35) for t in ts]
        assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_nonincreasing_in_p(self):
        ps = np.linspace(0, 1, 100)
        vals = [binom_cdf(7, 20, p) for p in ps]
        assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))


class TestStrictCdf:
    """P{X < t} equals P{X <= t-1} at integers, P{X <= t} elsewhere."""

    def test_integer_threshold_drops_atom(self):
        assert binom_cdf_strict(2, 20, 0.1) == pytest.approx(
            binom_cdf(1, 20, 0.1), abs=1e-15)

    def test_fractional_threshold_keeps_weak_cdf(self):
        assert binom_cdf_strict(2.5, 20, 0.1) == pytest.approx(
            binom_cdf(2.5, 20, 0.1), abs=1e-15)

    def test_nothing_below_zero(self):
        assert binom_cdf_strict(0, 20, 0.5) == 0.0

    def test_near_integer_within_tolerance(self):
        # thresholds arrive through floating arithmetic; 2 +/- 1e-10
        # must be treated as the integer 2
        for t in (2.0 + 1e-10, 2.0 - 1e-10):
            assert binom_cdf_strict(t, 20, 0.1) == pytest.approx(
                binom_cdf(1, 20, 0.1), abs=1e-12)

    def test_clearly_fractional_is_not_snapped(self):
        assert binom_cdf_strict(2.0 + 1e-6, 20, 0.1) == pytest.approx(
            binom_cdf(2, 20, 0.1), abs=1e-15)

    def test_is_integral_helper(self):
        assert is_integral(3.0)
        assert is_integral(3.0 + 0.5 * INT_TOL)
        assert not is_integral(3.0 + 1e-6)


class TestBulkIdentities:
    @given(n=st.integers(1, 150), p=st.floats(0, 1, allow_nan=False))
    @settings(deadline=None)
    def test_normalization(self, n, p):
        total = sum(binom_pmf(k, n, p) for k in range(n + 1))
        assert total == pytest.approx(1.0, abs=1e-12)

    @given(n=st.integers(1, 80), p=st.floats(0, 1, allow_nan=False),
           data=st.data())
    @settings(deadline=None)
    def test_strict_plus_atom_is_weak(self, n, p, data):
        k = data.draw(st.integers(0, n))
        lhs = binom_cdf_strict(k, n, p) + binom_pmf(k, n, p)
        assert lhs == pytest.approx(binom_cdf(k, n, p), abs=1e-12)

    @given(n=st.integers(1, 80), p=st.floats(0.01, 0.99),
           t=st.floats(-1, 81))
    @settings(deadline=None)
    def test_strict_never_exceeds_weak(self, n, p, t):
        assert binom_cdf_strict(t, n, p) <= binom_cdf(t, n, p) + 1e-15

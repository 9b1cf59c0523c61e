"""Tests for the in-package nonnegative least-squares kernel."""

import itertools

import numpy as np
import pytest

from alpnsocp._nnls import nnls
from alpnsocp.model import NumericalFailureError


def assert_kkt(a, b, x, rnorm):
    """Check the full optimality system for min ||a @ x - b|| with x >= 0.

    The problem is convex, so stationarity on the support plus a
    nonpositive gradient on the zero coordinates certifies a global
    minimizer.
    """
    assert float(np.min(x, initial=0.0)) >= 0.0
    resid = b - a @ x
    assert abs(float(np.linalg.norm(resid)) - rnorm) <= 1e-12 * (1.0 + rnorm)
    if a.size == 0:
        return
    g = a.T @ resid
    tol = 1e-8 * np.linalg.norm(a, axis=0) * (
        1.0 + np.linalg.norm(b) + np.linalg.norm(a @ x)
    )
    on = x > 0.0
    assert np.all(np.abs(g[on]) <= tol[on])
    assert np.all(g[~on] <= tol[~on])


def brute_force_nnls(a, b):
    """Reference optimum by enumerating supports (small n only)."""
    m, n = a.shape
    best_x = np.zeros(n)
    best = float(np.linalg.norm(b))
    for r in range(1, n + 1):
        for idx in itertools.combinations(range(n), r):
            z, *_ = np.linalg.lstsq(a[:, list(idx)], b, rcond=None)
            if np.any(z < 0.0):
                continue
            rnorm = float(np.linalg.norm(a[:, list(idx)] @ z - b))
            if rnorm < best - 1e-14:
                best = rnorm
                best_x = np.zeros(n)
                best_x[list(idx)] = z
    return best_x, best


def stress_system(seed, index, b_scale):
    """Regenerate one system from a seeded stress sweep."""
    rng = np.random.Generator(np.random.Philox(seed))
    for _ in range(index + 1):
        m = int(rng.integers(1, 7))
        n = int(rng.integers(1, 10))
        a = rng.standard_normal((m, n))
        b = rng.standard_normal(m) * b_scale
    return a, b


class TestInputValidation:
    def test_rejects_non_matrix(self):
        with pytest.raises(ValueError, match="2-d"):
            nnls(np.zeros(3), np.zeros(3))

    def test_rejects_mismatched_rhs(self):
        with pytest.raises(ValueError, match="shape"):
            nnls(np.zeros((2, 3)), np.zeros(3))

    def test_maxiter_exhaustion_raises(self):
        a = np.array([[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(NumericalFailureError):
            nnls(a, np.array([1.0, 1.0]), maxiter=0)


class TestEdgeCases:
    def test_zero_columns(self):
        b = np.array([3.0, -4.0])
        x, rnorm = nnls(np.zeros((2, 0)), b)
        assert x.shape == (0,)
        assert rnorm == pytest.approx(5.0, abs=1e-12)

    def test_zero_rows(self):
        x, rnorm = nnls(np.zeros((0, 3)), np.zeros(0))
        assert np.array_equal(x, np.zeros(3))
        assert rnorm == 0.0

    def test_all_gradients_negative_returns_zero(self):
        a = np.array([[1.0, 2.0], [0.0, 1.0]])
        b = np.array([-1.0, -2.0])
        x, rnorm = nnls(a, b)
        assert np.array_equal(x, np.zeros(2))
        assert rnorm == pytest.approx(np.sqrt(5.0), abs=1e-12)


class TestExactFit:
    def test_recovers_nonnegative_combination(self):
        for seed in range(1, 21):
            rng = np.random.Generator(np.random.Philox(seed))
            m = int(rng.integers(3, 9))
            n = int(rng.integers(1, m + 1))
            a = rng.standard_normal((m, n))
            x_true = rng.uniform(0.5, 2.0, size=n)
            x, rnorm = nnls(a, a @ x_true)
            assert rnorm <= 1e-10 * (1.0 + np.linalg.norm(a @ x_true)), seed
            assert np.linalg.norm(x - x_true) <= 1e-8 * (1.0 + np.linalg.norm(x_true))

    def test_matches_plain_least_squares_when_unconstrained_solution_is_positive(self):
        rng = np.random.Generator(np.random.Philox(5))
        a = rng.standard_normal((8, 3))
        z = rng.uniform(1.0, 3.0, size=3)
        b = a @ z + 0.01 * rng.standard_normal(8)
        expect, *_ = np.linalg.lstsq(a, b, rcond=None)
        x, _ = nnls(a, b)
        assert np.allclose(x, expect, rtol=0, atol=1e-10)


class TestKktProperties:
    def test_random_rectangular_systems(self):
        rng = np.random.Generator(np.random.Philox(2718))
        for trial in range(400):
            m = int(rng.integers(1, 7))
            n = int(rng.integers(1, 10))
            a = rng.standard_normal((m, n))
            b = rng.standard_normal(m) * 3.0
            x, rnorm = nnls(a, b)
            assert_kkt(a, b, x, rnorm)

    def test_duplicate_and_dependent_columns(self):
        rng = np.random.Generator(np.random.Philox(31415))
        for trial in range(200):
            m = int(rng.integers(2, 6))
            base = rng.standard_normal((m, 3))
            dup = base[:, rng.integers(0, 3)]
            mix = base @ rng.standard_normal(3)
            a = np.column_stack([base, dup, mix])
            b = rng.standard_normal(m) * 2.0
            x, rnorm = nnls(a, b)
            assert_kkt(a, b, x, rnorm)

    def test_badly_scaled_columns(self):
        rng = np.random.Generator(np.random.Philox(777))
        for trial in range(200):
            m = int(rng.integers(2, 7))
            n = int(rng.integers(2, 8))
            a = rng.standard_normal((m, n))
            a *= 10.0 ** rng.integers(-3, 4, size=n)
            b = rng.standard_normal(m) * 10.0 ** rng.integers(-2, 3)
            x, rnorm = nnls(a, b)
            assert_kkt(a, b, x, rnorm)


class TestAgainstBruteForce:
    def test_small_systems_reach_the_global_optimum(self):
        rng = np.random.Generator(np.random.Philox(424242))
        for trial in range(150):
            m = int(rng.integers(1, 6))
            n = int(rng.integers(1, 6))
            a = rng.standard_normal((m, n))
            b = rng.standard_normal(m) * 2.0
            x, rnorm = nnls(a, b)
            _, best = brute_force_nnls(a, b)
            assert rnorm <= best + 1e-10 * (1.0 + best), trial


class TestRegressions:
    def test_roundoff_cycle_system_converges(self):
        # A 6x9 system whose naive pivot loop stalls in an add/drop cycle
        # at the roundoff floor unless the stop tolerance tracks the size
        # of the reconstructed iterate.
        a, b = stress_system(99, 656, 3.0)
        assert a.shape == (6, 9)
        x, rnorm = nnls(a, b)
        assert_kkt(a, b, x, rnorm)

    def test_blocking_coordinate_is_pinned_to_zero(self):
        # A 6x6 system where the min-ratio step leaves the blocking
        # coordinate at a denormal positive value instead of zero; without
        # explicit pinning no column leaves the passive set and the inner
        # loop exhausts on a non-least-squares iterate.
        a, b = stress_system(99, 8890, 3.0)
        assert a.shape == (6, 6)
        x, rnorm = nnls(a, b)
        assert_kkt(a, b, x, rnorm)

    def test_single_column_swap_reaches_optimum(self):
        # A 2x2 system where the pivot loop must drop its first column and
        # finish on the other one; the optimum uses only the second column.
        rng = np.random.Generator(np.random.Philox(7))
        for _ in range(534):
            m = int(rng.integers(1, 7))
            n = int(rng.integers(1, 8))
            a = rng.standard_normal((m, n))
            b = rng.standard_normal(m) * 2.0
        assert a.shape == (2, 2)
        x, rnorm = nnls(a, b)
        assert_kkt(a, b, x, rnorm)
        _, best = brute_force_nnls(a, b)
        assert rnorm == pytest.approx(best, abs=1e-12)

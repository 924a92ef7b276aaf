"""Probability-kernel unit tests: prior, conditionals, sampling model."""

import itertools

import numpy as np
import pytest

from dfalloc.kernels import (
    DropColumnSignal,
    binary_symptom_prob,
    harmonic_number,
    ibp_conditional,
    log_likelihood,
    log_prior_A,
    row_log_likelihood,
    ternary_symptom_probs,
)
from _util import random_obs, random_state


class TestLogPriorA:
    def test_empty_matrix(self):
        A = np.zeros((4, 0), dtype=np.int8)
        assert log_prior_A(A, 1.0) == pytest.approx(-harmonic_number(4))

    def test_single_column_single_one(self):
        # n=1, K=1: mass = m e^{-m} for the lone feature count
        A = np.ones((1, 1), dtype=np.int8)
        assert log_prior_A(A, 2.0) == pytest.approx(np.log(2.0) - 2.0)

    def test_column_permutation_invariance(self):
        rng = np.random.default_rng(0)
        A = (rng.random((6, 3)) < 0.6).astype(np.int8)
        A[0] = 1  # ensure no empty column
        perm = [2, 0, 1]
        assert log_prior_A(A, 1.5) == pytest.approx(log_prior_A(A[:, perm], 1.5))

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(1)
        A = (rng.random((6, 3)) < 0.6).astype(np.int8)
        A[0] = 1
        rows = rng.permutation(6)
        assert log_prior_A(A, 0.7) == pytest.approx(log_prior_A(A[rows], 0.7))

    def test_sums_to_one_over_small_support(self):
        # n=2, K in {0,1,2}: enumerate all matrices in lexicographic-free
        # form and check the exchangeable masses sum to 1. Columns are
        # unordered, so each multiset of nonzero columns is counted once
        # with multiplicity K!/prod(multiplicities!) handled by enumerating
        # ordered tuples and dividing by K!.
        n, m = 2, 1.3
        cols = [(0, 1), (1, 0), (1, 1)]
        total = np.exp(log_prior_A(np.zeros((n, 0), dtype=np.int8), m))
        for K in range(1, 11):
            for combo in itertools.product(cols, repeat=K):
                A = np.array(combo, dtype=np.int8).T
                total += np.exp(log_prior_A(A, m))
        # truncated at K=10; the tail is tiny for m=1.3, n=2
        assert total == pytest.approx(1.0, abs=1e-3)

    def test_rejects_zero_column(self):
        A = np.array([[1, 0], [1, 0]], dtype=np.int8)
        with pytest.raises(ValueError):
            log_prior_A(A, 1.0)

    def test_rejects_nonpositive_mass(self):
        with pytest.raises(ValueError):
            log_prior_A(np.ones((2, 1), dtype=np.int8), 0.0)


class TestIbpConditional:
    def test_values(self):
        assert ibp_conditional(3, 10) == pytest.approx(0.3)
        assert ibp_conditional(9, 10) == pytest.approx(0.9)

    def test_zero_count_signals_drop(self):
        with pytest.raises(DropColumnSignal):
            ibp_conditional(0, 10)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            ibp_conditional(10, 10)


class TestBinarySymptomProb:
    def test_matches_logistic(self):
        alpha = np.array([1, 0, 1])
        beta = np.array([1, 1, 0])
        w = np.array([2.0, 3.0, 4.0])
        s = 2.0 + 0.5
        assert binary_symptom_prob(alpha, beta, w, 0.5) == pytest.approx(
            1 / (1 + np.exp(-s)))

    def test_no_active_disease_reduces_to_offset(self):
        alpha = np.zeros(2)
        prob = binary_symptom_prob(alpha, np.ones(2), np.ones(2), -1.0)
        assert prob == pytest.approx(1 / (1 + np.exp(1.0)))

    def test_extreme_offsets_stay_in_unit_interval(self):
        for zeta in (-700.0, 700.0):
            prob = binary_symptom_prob(np.zeros(1), np.zeros(1), np.ones(1), zeta)
            assert 0.0 <= prob <= 1.0
            assert np.isfinite(prob)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            binary_symptom_prob(np.ones(2), np.ones(3), np.ones(3), 0.0)


class TestTernarySymptomProbs:
    def test_normalization_and_symmetry(self):
        alpha = np.array([1.0, 1.0])
        gamma = np.array([-1, 1])
        probs = ternary_symptom_probs(alpha, gamma, np.array([2.0, 9.0]),
                                      np.array([9.0, 2.0]), 0.0, 0.0)
        assert sum(probs) == pytest.approx(1.0, abs=1e-14)
        assert probs[0] == pytest.approx(probs[2])  # matched s- and s+

    def test_all_zero_gamma_gives_offset_only(self):
        probs = ternary_symptom_probs(np.ones(2), np.zeros(2, dtype=int),
                                      np.ones(2), np.ones(2), 0.0, 0.0)
        assert probs == pytest.approx((1 / 3, 1 / 3, 1 / 3))

    def test_large_scores_no_overflow(self):
        probs = ternary_symptom_probs(np.ones(1), np.array([1]),
                                      np.ones(1), np.array([690.0]),
                                      0.0, 0.0)
        assert np.isfinite(probs).all()
        assert probs[2] == pytest.approx(1.0)


class TestLikelihood:
    def test_row_log_likelihood_matches_direct_product(self):
        state = random_state(n=6, p=4, q=4, K=3, seed=2)
        obs = random_obs(n=6, p=4, q=4, seed=2)
        for i in range(6):
            direct = 0.0
            for j in range(4):
                prob = binary_symptom_prob(state.A[i], state.B[j],
                                           state.W[j], state.zeta[j])
                direct += np.log(prob if obs.Z[i, j] else 1 - prob)
            for l in range(4):
                probs = ternary_symptom_probs(
                    state.A[i], state.C[l], state.Wneg[l], state.Wpos[l],
                    state.eta_neg[l], state.eta_pos[l])
                direct += np.log(probs[obs.Y[i, l] + 1])
            assert row_log_likelihood(state, obs, i) == pytest.approx(direct)

    def test_total_is_sum_of_rows(self):
        state = random_state(n=5, p=3, q=2, K=2, seed=3)
        obs = random_obs(n=5, p=3, q=2, seed=3)
        rows = sum(row_log_likelihood(state, obs, i) for i in range(5))
        assert log_likelihood(state, obs) == pytest.approx(rows)

    def test_dimension_mismatch(self):
        state = random_state(n=5, p=3, q=2, K=2)
        obs = random_obs(n=4, p=3, q=2)
        with pytest.raises(ValueError):
            log_likelihood(state, obs)

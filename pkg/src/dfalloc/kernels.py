"""Pure probability kernels: allocation prior, conditionals and the sampling model.

Everything here is side-effect free and evaluated in log space; the raw
exponential forms overflow for the offset/weight magnitudes allowed by the
vague priors.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from .model import AllocationState, ObservationSet


class DropColumnSignal(ValueError):
    """Raised when a conditional is requested for a column that must be dropped."""


def harmonic_number(n: int) -> float:
    return float(np.sum(1.0 / np.arange(1, n + 1)))


def log_prior_A(A: np.ndarray, m: float) -> float:
    """Log prior mass of a binary allocation matrix with unbounded columns.

    A is n x K with no all-zero columns; m is the mass parameter. The value
    depends only on the multiset of column sums, so it is invariant under
    column permutation and row permutation.
    """
    if m <= 0:
        raise ValueError("m must be positive")
    A = np.asarray(A)
    n, K = A.shape if A.ndim == 2 else (A.shape[0], 0)
    if n < 1:
        raise ValueError("A must have at least one row")
    out = -m * harmonic_number(n)
    if K == 0:
        return out
    r = A.sum(axis=0)
    if (r == 0).any():
        raise ValueError("all-zero column has zero prior mass (drop it first)")
    out += K * np.log(m) - gammaln(K + 1)
    out += float(np.sum(gammaln(r) + gammaln(n - r + 1) - gammaln(n + 1)))
    return out


def ibp_conditional(r_minus: int, n: int) -> float:
    """Prior conditional probability that a patient has an existing disease.

    ``r_minus`` is the column sum excluding the patient's own row. A zero
    count signals that the column must be dropped instead of resampled.
    """
    if r_minus == 0:
        raise DropColumnSignal("drop-column: no other patient has this disease")
    if not 0 < r_minus <= n - 1:
        raise ValueError(f"r_minus={r_minus} outside (0, n-1] for n={n}")
    return r_minus / n


def _log1pexp(s):
    """log(1 + exp(s)), stable for |s| up to ~745."""
    s = np.asarray(s, dtype=np.float64)
    return np.maximum(s, 0.0) + np.log1p(np.exp(-np.abs(s)))


def binary_symptom_prob(alpha_i, beta_j, W_j, zeta_j: float) -> float:
    """Probability of observing a binary symptom, logistic in the active weights."""
    alpha_i = np.asarray(alpha_i, dtype=np.float64)
    beta_j = np.asarray(beta_j, dtype=np.float64)
    W_j = np.asarray(W_j, dtype=np.float64)
    if not alpha_i.shape == beta_j.shape == W_j.shape:
        raise ValueError("alpha, beta and weights must share one length")
    s = float(alpha_i @ (W_j * beta_j) + zeta_j)
    # exp(s)/(1+exp(s)) = exp(s - log1pexp(s))
    return float(np.exp(s - _log1pexp(s)))


def ternary_symptom_probs(alpha_i, gamma_l, Wneg_l, Wpos_l,
                          eta_neg: float, eta_pos: float) -> tuple[float, float, float]:
    """Category probabilities (low, normal, high) of a ternary symptom."""
    alpha_i = np.asarray(alpha_i, dtype=np.float64)
    gamma_l = np.asarray(gamma_l)
    Wneg_l = np.asarray(Wneg_l, dtype=np.float64)
    Wpos_l = np.asarray(Wpos_l, dtype=np.float64)
    if not alpha_i.shape == gamma_l.shape == Wneg_l.shape == Wpos_l.shape:
        raise ValueError("alpha, gamma and weights must share one length")
    s_neg = float(alpha_i @ (Wneg_l * (gamma_l == -1)) + eta_neg)
    s_pos = float(alpha_i @ (Wpos_l * (gamma_l == +1)) + eta_pos)
    mx = max(s_neg, 0.0, s_pos)
    e = np.exp(np.array([s_neg - mx, -mx, s_pos - mx]))
    probs = e / e.sum()
    return float(probs[0]), float(probs[1]), float(probs[2])


def row_log_likelihood(state: AllocationState, obs: ObservationSet, i: int) -> float:
    """Log likelihood contribution of patient i's row of Z and Y."""
    a = state.A[i].astype(np.float64)
    out = 0.0
    if state.p:
        s = (state.W * state.B) @ a + state.zeta  # length p
        out += float(np.sum(obs.Z[i] * s - _log1pexp(s)))
    if state.q:
        s_neg = (state.Wneg * (state.C == -1)) @ a + state.eta_neg
        s_pos = (state.Wpos * (state.C == +1)) @ a + state.eta_pos
        mx = np.maximum(np.maximum(s_neg, 0.0), s_pos)
        lse = mx + np.log(np.exp(s_neg - mx) + np.exp(-mx) + np.exp(s_pos - mx))
        y = obs.Y[i]
        out += float(np.sum(np.where(y == -1, s_neg, np.where(y == 1, s_pos, 0.0)) - lse))
    return out


def log_likelihood(state: AllocationState, obs: ObservationSet) -> float:
    """Total log likelihood of the observation set under the current state."""
    if state.n != obs.n or state.p != obs.p or state.q != obs.q:
        raise ValueError("state dimensions do not match observations")
    return float(sum(row_log_likelihood(state, obs, i) for i in range(obs.n)))

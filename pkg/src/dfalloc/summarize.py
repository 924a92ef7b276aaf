"""Posterior summarization: MAP number of diseases, permutation-matched point
estimates, conditional posterior means, recovery metrics and exports."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import ObservationSet
from .sampler import Chain


@dataclass
class FittedSummary:
    K_hat: int
    K0: int
    A_hat: np.ndarray  # n x K_hat, {0,1}
    B_hat: np.ndarray  # p x K_hat, {0,1}
    C_hat: np.ndarray  # q x K_hat, {-1,0,1}
    edge_probs: np.ndarray  # (p+q) x K_hat inclusion probabilities
    prevalence: np.ndarray  # K_hat patient counts
    patient_probs: np.ndarray  # n x K_hat
    weight_means: np.ndarray  # p x K_hat
    weight_neg_means: np.ndarray  # q x K_hat
    weight_pos_means: np.ndarray  # q x K_hat
    offset_means: dict  # zeta / eta_neg / eta_pos -> arrays
    K_pmf: dict  # K -> posterior probability
    fixed_A: np.ndarray  # K_hat bools
    fixed_B: np.ndarray  # p x K_hat bools
    fixed_C: np.ndarray  # q x K_hat bools
    disease_names: list[str] = field(default_factory=list)
    symptom_names: list[str] = field(default_factory=list)
    patient_ids: list[str] = field(default_factory=list)
    # observed symptom codes, carried along for the diagnosis service
    Z: np.ndarray | None = None
    Y: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.A_hat.shape[0]

    @property
    def p(self) -> int:
        return self.B_hat.shape[0]

    @property
    def q(self) -> int:
        return self.C_hat.shape[0]


def map_K(chain: Chain) -> tuple[int, dict]:
    """Posterior mode of the number of diseases; ties break toward smaller K.

    Returns the mode and the full posterior mass function over K.
    """
    if len(chain) == 0:
        raise ValueError("empty chain")
    counts = Counter(chain.Ks)
    total = len(chain.Ks)
    pmf = {k: counts[k] / total for k in sorted(counts)}
    best = max(counts.values())
    k_hat = min(k for k, c in counts.items() if c == best)
    return k_hat, pmf


def _column_cost(A: np.ndarray, A2: np.ndarray) -> np.ndarray:
    """Pairwise column Hamming counts: cost[a, b] = H(A[:, a], A2[:, b])."""
    A = np.asarray(A, dtype=np.int64)
    A2 = np.asarray(A2, dtype=np.int64)
    r1 = A.sum(axis=0)
    r2 = A2.sum(axis=0)
    return r1[:, None] + r2[None, :] - 2 * (A.T @ A2)


def perm_hamming_distance(A: np.ndarray, A2: np.ndarray) -> tuple[int, np.ndarray]:
    """Minimum Hamming distance over column permutations of A2.

    Solved as an exact minimum-cost assignment on the pairwise column
    distances. Returns (distance, perm) with A2[:, perm] aligned to A.
    """
    A = np.asarray(A)
    A2 = np.asarray(A2)
    if A.shape != A2.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {A2.shape}")
    if A.shape[1] == 0:
        return 0, np.empty(0, dtype=np.int64)
    cost = _column_cost(A, A2)
    rows, cols = linear_sum_assignment(cost)
    return int(cost[rows, cols].sum()), cols.astype(np.int64)


def best_subset_match(A_ref: np.ndarray, A_wide: np.ndarray) -> tuple[int, np.ndarray]:
    """Match each column of A_ref to a distinct column of the wider matrix
    A_wide, minimizing total column Hamming cost. Used when the number of
    diseases is overestimated and only the best subset is compared."""
    if A_wide.shape[1] < A_ref.shape[1]:
        raise ValueError("A_wide must have at least as many columns as A_ref")
    cost = _column_cost(A_ref, A_wide)
    rows, cols = linear_sum_assignment(cost)
    order = np.argsort(rows)
    return int(cost[rows, cols].sum()), cols[order].astype(np.int64)


def _qualifying(chain: Chain, K_hat: int) -> list[int]:
    idx = [t for t, K in enumerate(chain.Ks) if K == K_hat]
    if not idx:
        raise ValueError(f"no snapshot with K = {K_hat}")
    return idx


def least_squares_A(chain: Chain, K_hat: int) -> tuple[np.ndarray, int]:
    """Snapshot A minimizing the Monte Carlo average permuted Hamming distance
    to all other snapshots with K = K_hat; ties break to the earliest."""
    idx = _qualifying(chain, K_hat)
    mats = [chain.snapshots[t].A for t in idx]
    S = len(mats)
    dist = np.zeros((S, S))
    for a in range(S):
        for b in range(a + 1, S):
            d, _ = perm_hamming_distance(mats[a], mats[b])
            dist[a, b] = dist[b, a] = d
    means = dist.mean(axis=1)
    best = int(np.argmin(means))  # argmin returns the first (earliest) minimum
    return mats[best].copy(), idx[best]


def _align_perm(A_hat: np.ndarray, A_t: np.ndarray, K0: int) -> np.ndarray:
    """Permutation aligning snapshot columns to A_hat, keeping the leading
    known-disease columns in place (they are identical across snapshots)."""
    K = A_hat.shape[1]
    perm = np.arange(K, dtype=np.int64)
    if K > K0:
        cost = _column_cost(A_hat[:, K0:], A_t[:, K0:])
        rows, cols = linear_sum_assignment(cost)
        perm[K0:] = K0 + cols
    return perm


def align_and_average(chain: Chain, A_hat: np.ndarray) -> dict:
    """Permutation-align every snapshot with K = K_hat to A_hat and average.

    Returns marginal frequencies for A/B/C, conditional means for weights and
    offsets, and the thresholded point estimates B_hat and C_hat.
    """
    K_hat = A_hat.shape[1]
    idx = _qualifying(chain, K_hat)
    K0 = chain.K0
    first = chain.snapshots[idx[0]]
    p, q = first.p, first.q
    n = first.n
    A_sum = np.zeros((n, K_hat))
    B_sum = np.zeros((p, K_hat))
    C_cat = np.zeros((q, K_hat, 3))  # frequencies of -1, 0, +1
    W_sum = np.zeros((p, K_hat))
    Wn_sum = np.zeros((q, K_hat))
    Wp_sum = np.zeros((q, K_hat))
    zeta_sum = np.zeros(p)
    etan_sum = np.zeros(q)
    etap_sum = np.zeros(q)
    for t in idx:
        snap = chain.snapshots[t]
        perm = _align_perm(A_hat, snap.A, K0)
        A_sum += snap.A[:, perm]
        B_sum += snap.B[:, perm]
        C = snap.C[:, perm]
        for c, slot in ((-1, 0), (0, 1), (1, 2)):
            C_cat[:, :, slot] += C == c
        W_sum += snap.W[:, perm]
        Wn_sum += snap.Wneg[:, perm]
        Wp_sum += snap.Wpos[:, perm]
        zeta_sum += snap.zeta
        etan_sum += snap.eta_neg
        etap_sum += snap.eta_pos
    S = len(idx)
    A_marg = A_sum / S
    B_marg = B_sum / S
    C_freq = C_cat / S
    B_hat = (B_marg >= 0.5).astype(np.int8)
    C_hat = (np.argmax(C_freq, axis=2) - 1).astype(np.int8)
    edge_probs = np.vstack([B_marg, 1.0 - C_freq[:, :, 1]]) if p + q else np.zeros((0, K_hat))
    ref = chain.snapshots[idx[0]]
    return {
        "patient_probs": A_marg,
        "B_marginals": B_marg,
        "C_frequencies": C_freq,
        "B_hat": B_hat,
        "C_hat": C_hat,
        "edge_probs": edge_probs,
        "weight_means": W_sum / S,
        "weight_neg_means": Wn_sum / S,
        "weight_pos_means": Wp_sum / S,
        "offset_means": {
            "zeta": zeta_sum / S,
            "eta_neg": etan_sum / S,
            "eta_pos": etap_sum / S,
        },
        "fixed_A": ref.fixed_A.copy(),
        "fixed_B": ref.fixed_B.copy(),
        "fixed_C": ref.fixed_C.copy(),
        "snapshot_count": S,
    }


def build_summary(chain: Chain, obs: ObservationSet | None = None) -> FittedSummary:
    """Full posterior summary: MAP K, least-squares A, aligned means."""
    K_hat, pmf = map_K(chain)
    A_hat, _ = least_squares_A(chain, K_hat)
    parts = align_and_average(chain, A_hat)
    names = list(chain.disease_names)
    names += [f"latent-{i + 1}" for i in range(K_hat - chain.K0)]
    summary = FittedSummary(
        K_hat=K_hat, K0=chain.K0, A_hat=A_hat,
        B_hat=parts["B_hat"], C_hat=parts["C_hat"],
        edge_probs=parts["edge_probs"],
        prevalence=A_hat.sum(axis=0).astype(np.int64),
        patient_probs=parts["patient_probs"],
        weight_means=parts["weight_means"],
        weight_neg_means=parts["weight_neg_means"],
        weight_pos_means=parts["weight_pos_means"],
        offset_means=parts["offset_means"],
        K_pmf=pmf,
        fixed_A=parts["fixed_A"], fixed_B=parts["fixed_B"],
        fixed_C=parts["fixed_C"],
        disease_names=names,
        symptom_names=list(obs.symptom_names) if obs is not None else [],
        patient_ids=list(obs.patient_ids) if obs is not None else [],
        Z=obs.Z.copy() if obs is not None else None,
        Y=obs.Y.copy() if obs is not None else None,
    )
    if not summary.symptom_names:
        summary.symptom_names = [f"z{j+1}" for j in range(summary.p)] + [
            f"y{l+1}" for l in range(summary.q)]
    if not summary.patient_ids:
        summary.patient_ids = [f"patient-{i+1}" for i in range(summary.n)]
    return summary


# ---------------------------------------------------------------------------
# Recovery metrics against a known truth.

def misallocation_rate(A_hat: np.ndarray, A_true: np.ndarray,
                       fixed_A: np.ndarray | None = None) -> float:
    """Permuted Hamming distance over n times the number of free columns."""
    dist, _ = perm_hamming_distance(A_hat, A_true)
    n, K = A_hat.shape
    K_free = K if fixed_A is None else int(K - np.count_nonzero(fixed_A))
    if K_free == 0:
        return 0.0
    return dist / (n * K_free)


def _masked_error(est: np.ndarray, true_aligned: np.ndarray,
                  fixed: np.ndarray | None) -> float:
    diff = est != true_aligned
    if fixed is not None:
        free = ~np.asarray(fixed, dtype=bool)
        total = int(free.sum())
        if total == 0:
            return 0.0
        return float(diff[free].sum() / total)
    return float(diff.mean())


def error_rate_B(B_hat: np.ndarray, B_true: np.ndarray, perm: np.ndarray,
                 fixed_B: np.ndarray | None = None) -> float:
    """Disagreement rate over free entries, with the A-matching permutation
    applied to the truth's columns."""
    return _masked_error(B_hat, np.asarray(B_true)[:, perm], fixed_B)


def error_rate_C(C_hat: np.ndarray, C_true: np.ndarray, perm: np.ndarray,
                 fixed_C: np.ndarray | None = None) -> float:
    return _masked_error(C_hat, np.asarray(C_true)[:, perm], fixed_C)


def evaluate_against_truth(summary: FittedSummary, A_true, B_true, C_true) -> dict:
    """Scenario-style metrics. When K_hat exceeds the truth's K, comparisons
    use the best-matching subset of estimated columns."""
    A_true = np.asarray(A_true)
    K_true = A_true.shape[1]
    result = {"K_hat": summary.K_hat, "K_true": K_true}
    if summary.K_hat == K_true:
        dist, perm = perm_hamming_distance(summary.A_hat, A_true)
        result["misallocation_rate"] = misallocation_rate(
            summary.A_hat, A_true, summary.fixed_A)
        result["error_rate_B"] = error_rate_B(
            summary.B_hat, B_true, perm, summary.fixed_B)
        result["error_rate_C"] = error_rate_C(
            summary.C_hat, C_true, perm, summary.fixed_C)
        result["best_subset"] = False
    elif summary.K_hat > K_true:
        # pick, for each true column, the closest distinct estimated column
        _, cols = best_subset_match(A_true, summary.A_hat)
        A_sub = summary.A_hat[:, cols]
        n = A_true.shape[0]
        fixed_sub = summary.fixed_A[cols]
        K_free = K_true - int(np.count_nonzero(fixed_sub))
        result["misallocation_rate"] = (
            float((A_sub != A_true).sum() / (n * K_free)) if K_free else 0.0)
        result["error_rate_B"] = _masked_error(
            summary.B_hat[:, cols], np.asarray(B_true), summary.fixed_B[:, cols])
        result["error_rate_C"] = _masked_error(
            summary.C_hat[:, cols], np.asarray(C_true), summary.fixed_C[:, cols])
        result["best_subset"] = True
    else:
        # underestimated K: compare over the best subset of true columns
        _, cols = best_subset_match(summary.A_hat, A_true)
        n = A_true.shape[0]
        K_free = summary.K_hat - int(np.count_nonzero(summary.fixed_A))
        A_sub = np.asarray(A_true)[:, cols]
        result["misallocation_rate"] = (
            float((summary.A_hat != A_sub).sum() / (n * K_free)) if K_free else 0.0)
        result["error_rate_B"] = _masked_error(
            summary.B_hat, np.asarray(B_true)[:, cols], summary.fixed_B)
        result["error_rate_C"] = _masked_error(
            summary.C_hat, np.asarray(C_true)[:, cols], summary.fixed_C)
        result["best_subset"] = True
    return result


# ---------------------------------------------------------------------------
# Exports.

def export_cmf(summary: FittedSummary) -> dict:
    """Nonnegative factorization view: split weight-bearing symptom-disease
    matrices with disjoint supports for the suppressing and enhancing sides."""
    Cneg = (summary.C_hat == -1)
    Cpos = (summary.C_hat == +1)
    D_minus = (summary.weight_neg_means * Cneg).T  # K_hat x q
    D_plus = (summary.weight_pos_means * Cpos).T  # K_hat x q
    D_binary = (summary.weight_means * summary.B_hat).T  # K_hat x p
    return {
        "A_hat": summary.A_hat.copy(),
        "D_minus": D_minus,
        "D_plus": D_plus,
        "D_binary": D_binary,
    }


def export_network(summary: FittedSummary, include_patient_edges: bool = False) -> dict:
    """Tripartite network document: disease and symptom nodes plus
    sign-labeled symptom-disease edges weighted by inclusion probability."""
    p, q = summary.p, summary.q
    diseases = []
    for k in range(summary.K_hat):
        diseases.append({
            "id": f"disease:{k}",
            "name": summary.disease_names[k],
            "known": bool(k < summary.K0),
            "prevalence": int(summary.prevalence[k]),
        })
    symptoms = []
    for s, name in enumerate(summary.symptom_names):
        symptoms.append({
            "id": f"symptom:{s}",
            "name": name,
            "kind": "binary" if s < p else "ternary",
        })
    edges = []
    for k in range(summary.K_hat):
        for j in range(p):
            prob = float(summary.edge_probs[j, k])
            if prob <= 0.0 or summary.B_hat[j, k] == 0:
                continue
            edges.append({
                "symptom": f"symptom:{j}",
                "disease": f"disease:{k}",
                "sign": "binary",
                "known": bool(summary.fixed_B[j, k]),
                "weight": prob,
            })
        for l in range(q):
            prob = float(summary.edge_probs[p + l, k])
            c = int(summary.C_hat[l, k])
            if prob <= 0.0 or c == 0:
                continue
            edges.append({
                "symptom": f"symptom:{p + l}",
                "disease": f"disease:{k}",
                "sign": "suppress" if c == -1 else "enhance",
                "known": bool(summary.fixed_C[l, k]),
                "weight": prob,
            })
    doc = {
        "schema": "dfa-network/1",
        "diseases": diseases,
        "symptoms": symptoms,
        "edges": edges,
    }
    if include_patient_edges:
        patient_edges = []
        for i in range(summary.n):
            for k in range(summary.K_hat):
                if summary.A_hat[i, k]:
                    patient_edges.append({
                        "patient": summary.patient_ids[i],
                        "disease": f"disease:{k}",
                        "probability": float(summary.patient_probs[i, k]),
                    })
        doc["patient_edges"] = patient_edges
    return doc

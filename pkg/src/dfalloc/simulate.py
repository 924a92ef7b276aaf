"""Synthetic benchmark generators with ground truth attached.

Scenario 1 draws the allocation truth from the model itself (well specified);
scenario 2 generates thresholded latent-factor data (misspecified). A third
generator produces an EHR-flavored dataset with four pinned known diseases
for exercising the full pipeline.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .model import AllocationState, ObservationSet, PriorKnowledge


@dataclass
class SimulationResult:
    obs: ObservationSet
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    prior: PriorKnowledge
    truth_state: AllocationState | None = None
    meta: dict = field(default_factory=dict)


def draw_ibp(n: int, m: float, rng: np.random.Generator) -> np.ndarray:
    """One draw of a binary allocation matrix from the sequential buffet scheme."""
    cols: list[np.ndarray] = []
    for i in range(n):
        for col in cols:
            r = col[:i].sum()
            if rng.random() < r / (i + 1):
                col[i] = 1
        for _ in range(rng.poisson(m / (i + 1))):
            col = np.zeros(n, dtype=np.int8)
            col[i] = 1
            cols.append(col)
    if not cols:
        return np.zeros((n, 0), dtype=np.int8)
    A = np.column_stack(cols)
    return A[:, A.sum(axis=0) > 0]


def _block_sd_matrices(p: int, q: int, K: int, rng: np.random.Generator,
                       flip_frac: float = 0.10) -> tuple[np.ndarray, np.ndarray]:
    """Block-diagonal symptom-disease truth with a fraction of the zero
    entries flipped to active values."""
    B = np.zeros((p, K), dtype=np.int8)
    C = np.zeros((q, K), dtype=np.int8)
    block = p // K
    for k in range(K):
        B[block * k: block * (k + 1), k] = 1
        # alternating sign by disease: -1 for the first, +1 for the second, ...
        C[block * k: block * (k + 1), k] = -((-1) ** (k + 1))
    for M, values in ((B, np.array([1], dtype=np.int8)),
                      (C, np.array([-1, 1], dtype=np.int8))):
        zeros = np.argwhere(M == 0)
        n_flip = int(round(flip_frac * len(zeros)))
        picks = rng.choice(len(zeros), size=n_flip, replace=False)
        for idx in picks:
            r, c = zeros[idx]
            M[r, c] = rng.choice(values)
    return B, C


def _sample_observations(state: AllocationState, rng: np.random.Generator,
                         patient_ids=None, symptom_names=None) -> ObservationSet:
    """Draw Z and Y from the sampling model at the given truth state."""
    A = state.A.astype(np.float64)
    n, p, q = state.n, state.p, state.q
    SZ = A @ (state.W * state.B).T + state.zeta
    prob = 1.0 / (1.0 + np.exp(-SZ))
    Z = (rng.random((n, p)) < prob).astype(np.int8)
    SN = A @ (state.Wneg * (state.C == -1)).T + state.eta_neg
    SP = A @ (state.Wpos * (state.C == +1)).T + state.eta_pos
    mx = np.maximum(np.maximum(SN, 0.0), SP)
    en = np.exp(SN - mx)
    e0 = np.exp(-mx)
    ep = np.exp(SP - mx)
    tot = en + e0 + ep
    u = rng.random((n, q)) * tot
    Y = np.where(u < en, -1, np.where(u < en + e0, 0, 1)).astype(np.int8)
    return ObservationSet(Z=Z, Y=Y, symptom_names=symptom_names,
                          patient_ids=patient_ids)


def _truth_state(A, B, C, rng, weight_mean=10.0, offset_mean=-2.0,
                 offset_sd=0.5) -> AllocationState:
    """Truth parameters for data generation: weights uniform around the prior
    mean but bounded away from zero (so every planted link is detectable),
    offsets negative (symptoms rare at baseline, as in screening data)."""
    n, K = A.shape
    p = B.shape[0]
    q = C.shape[0]
    return AllocationState(
        A=A, B=B, C=C,
        W=rng.uniform(0.3 * weight_mean, 1.7 * weight_mean, (p, K)),
        Wneg=rng.uniform(0.3 * weight_mean, 1.7 * weight_mean, (q, K)),
        Wpos=rng.uniform(0.3 * weight_mean, 1.7 * weight_mean, (q, K)),
        zeta=rng.normal(offset_mean, offset_sd, p),
        eta_neg=rng.normal(offset_mean, offset_sd, q),
        eta_pos=rng.normal(offset_mean, offset_sd, q),
        rho=0.5, pi=np.array([1 / 3, 1 / 3, 1 / 3]),
    )


def _conditioned_ibp(n: int, m: float, K_true: int, min_prevalence: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Redraw from the buffet prior until the truth is displayable: exactly
    K_true diseases, each affecting at least min_prevalence patients (a
    disease affecting one or two patients is not statistically recoverable)."""
    while True:
        A = draw_ibp(n, m, rng)
        if A.shape[1] == K_true and A.sum(axis=0).min() >= min_prevalence:
            return A


def simulate_scenario1(seed: int, n: int = 300, p: int = 24, q: int = 24,
                       K_true: int = 6, m: float = 1.0,
                       min_prevalence: int = 10) -> SimulationResult:
    """Well-specified benchmark: allocation truth from the buffet prior
    (redrawn until it has K_true identifiable columns), block symptom
    structure with 10% of zero entries flipped, observations from the
    sampling model.

    Known-disease information mirrors the benchmark setup: disease 1 is fully
    known (A, B and C columns pinned), disease 2 has known symptom links only
    (B and C pinned, A free).
    """
    rng = np.random.default_rng(seed)
    A = _conditioned_ibp(n, m, K_true, min_prevalence, rng)
    # order columns by first active patient for a stable display order
    order = np.argsort([np.argmax(col) for col in A.T], kind="stable")
    A = A[:, order]
    B, C = _block_sd_matrices(p, q, K_true, rng)
    state = _truth_state(A, B, C, rng)
    obs = _sample_observations(state, rng)
    prior = PriorKnowledge(
        K0=2,
        pinned_A=[A[:, 0].copy(), None],
        pinned_B=[B[:, 0].copy(), B[:, 1].copy()],
        pinned_C=[C[:, 0].copy(), C[:, 1].copy()],
        disease_names=["known-1", "known-2"],
    )
    return SimulationResult(obs=obs, A=A, B=B, C=C, prior=prior,
                            truth_state=state,
                            meta={"scenario": 1, "seed": seed, "m": m})


def simulate_scenario2(seed: int, t: float = 3.0, n: int = 300, p: int = 24,
                       q: int = 24, K_true: int = 6, m: float = 1.0,
                       min_prevalence: int = 10) -> SimulationResult:
    """Misspecified benchmark: thresholded linear latent-factor data over the
    same allocation truth; no known diseases."""
    if t <= 0:
        raise ValueError("threshold t must be positive")
    rng = np.random.default_rng(seed)
    A = _conditioned_ibp(n, m, K_true, min_prevalence, rng)
    B, C = _block_sd_matrices(p, q, K_true, rng)
    Phi = A * rng.uniform(0, 4, (n, K_true))
    Lz = B * rng.uniform(0, 4, (p, K_true))
    Ly = C * rng.uniform(0, 4, (q, K_true))
    Zt = Phi @ Lz.T + rng.standard_normal((n, p))
    Yt = Phi @ Ly.T + rng.standard_normal((n, q))
    Z = (Zt > t).astype(np.int8)
    Y = np.where(Yt > t, 1, np.where(Yt < -t, -1, 0)).astype(np.int8)
    obs = ObservationSet(Z=Z, Y=Y)
    return SimulationResult(obs=obs, A=A, B=B, C=C, prior=PriorKnowledge(),
                            meta={"scenario": 2, "seed": seed, "t": t, "m": m})


EHR_BINARY_ITEMS = ["alt", "ast", "total_bilirubin", "total_cholesterol",
                    "triglycerides", "ldl", "hdl", "systolic", "platelets",
                    "pct", "monocytes", "basophils"]
EHR_TERNARY_ITEMS = ["glucose", "creatinine", "bun", "diastolic",
                     "hemoglobin", "erythrocytes", "hematocrit", "leukocytes",
                     "heart_rate", "uric_acid", "lymphocytes", "mcv"]


def simulate_ehr_like(seed: int = 2016, n: int = 200,
                      K_true: int = 8) -> SimulationResult:
    """EHR-flavored synthetic dataset with four pinned known diseases.

    Disease 1 (diabetes-like) pins its diagnosis column of A plus a single
    elevated-glucose entry of C; diseases 2-4 (kidney-, hypertension- and
    liver-like) pin full B/C columns with their indicator symptoms but leave
    their A columns free.
    """
    p = len(EHR_BINARY_ITEMS)
    q = len(EHR_TERNARY_ITEMS)
    rng = np.random.default_rng(seed)
    while True:
        A = draw_ibp(n, 2.0, rng)
        if A.shape[1] == K_true:
            break
    B = (rng.random((p, K_true)) < 0.15).astype(np.int8)
    C = np.where(rng.random((q, K_true)) < 0.15,
                 rng.choice(np.array([-1, 1], dtype=np.int8), (q, K_true)),
                 0).astype(np.int8)
    bidx = {name: j for j, name in enumerate(EHR_BINARY_ITEMS)}
    tidx = {name: l for l, name in enumerate(EHR_TERNARY_ITEMS)}
    # disease 1: diabetes-like, elevated glucose
    C[:, 0] = 0
    C[tidx["glucose"], 0] = 1
    B[:, 0] = 0
    # disease 2: kidney-like, elevated creatinine and BUN
    B[:, 1] = 0
    C[:, 1] = 0
    C[tidx["creatinine"], 1] = 1
    C[tidx["bun"], 1] = 1
    # disease 3: hypertension-like, elevated blood pressures
    B[:, 2] = 0
    C[:, 2] = 0
    B[bidx["systolic"], 2] = 1
    C[tidx["diastolic"], 2] = 1
    # disease 4: liver-like, abnormal TB/AST/ALT
    B[:, 3] = 0
    C[:, 3] = 0
    for item in ("alt", "ast", "total_bilirubin"):
        B[bidx[item], 3] = 1
    state = _truth_state(A, B, C, rng, offset_sd=0.0)
    names = EHR_BINARY_ITEMS + EHR_TERNARY_ITEMS
    obs = _sample_observations(state, rng, symptom_names=names)
    diagnosed = [obs.patient_ids[i] for i in range(n) if A[i, 0] == 1]
    prior = PriorKnowledge(
        K0=4,
        pinned_A=[A[:, 0].copy(), None, None, None],
        pinned_B=[None, B[:, 1].copy(), B[:, 2].copy(), B[:, 3].copy()],
        pinned_C=[C[:, 0].copy(), C[:, 1].copy(), C[:, 2].copy(), C[:, 3].copy()],
        pinned_B_mask=[None, np.ones(p, bool), np.ones(p, bool), np.ones(p, bool)],
        pinned_C_mask=[_only(tidx["glucose"], q), np.ones(q, bool),
                       np.ones(q, bool), np.ones(q, bool)],
        disease_names=["diabetes", "kidney-disease", "hypertension",
                       "liver-disease"],
    )
    return SimulationResult(obs=obs, A=A, B=B, C=C, prior=prior,
                            truth_state=state,
                            meta={"scenario": "ehr", "seed": seed,
                                  "diagnosed": diagnosed})


def _only(index: int, length: int) -> np.ndarray:
    mask = np.zeros(length, dtype=bool)
    mask[index] = True
    return mask


# ---------------------------------------------------------------------------
# File emission in the formats the ingestion layer reads.

def _coded_ranges(obs: ObservationSet) -> dict:
    items = []
    for j in range(obs.p):
        items.append({"name": obs.symptom_names[j], "kind": "binary",
                      "lower": -0.5, "upper": 0.5})
    for l in range(obs.q):
        items.append({"name": obs.symptom_names[obs.p + l], "kind": "ternary",
                      "lower": -0.5, "upper": 0.5})
    return {"items": items}


def _prior_document(sim: SimulationResult) -> dict:
    obs = sim.obs
    diseases = []
    for k in range(sim.prior.K0):
        d: dict = {"name": sim.prior.disease_names[k]}
        if sim.prior.pinned_A[k] is not None:
            d["patients"] = [obs.patient_ids[i] for i in range(obs.n)
                             if sim.prior.pinned_A[k][i] == 1]
        symptoms = {}
        full_b = full_c = False
        if sim.prior.pinned_B[k] is not None:
            mask = sim.prior.pinned_B_mask[k]
            mask = np.ones(obs.p, bool) if mask is None else mask
            full_b = bool(mask.all())
            for j in range(obs.p):
                if mask[j] and sim.prior.pinned_B[k][j] != 0:
                    symptoms[obs.symptom_names[j]] = int(sim.prior.pinned_B[k][j])
        if sim.prior.pinned_C[k] is not None:
            mask = sim.prior.pinned_C_mask[k]
            mask = np.ones(obs.q, bool) if mask is None else mask
            full_c = bool(mask.all())
            for l in range(obs.q):
                if mask[l] and sim.prior.pinned_C[k][l] != 0:
                    symptoms[obs.symptom_names[obs.p + l]] = int(sim.prior.pinned_C[k][l])
        if symptoms:
            d["symptoms"] = symptoms
        if full_b and full_c:
            d["pin_remaining_zero"] = True
        diseases.append(d)
    return {"diseases": diseases}


def write_simulation(sim: SimulationResult, outdir: str) -> dict:
    """Write data.csv, ranges.json, prior.json and truth.json; returns paths."""
    os.makedirs(outdir, exist_ok=True)
    obs = sim.obs
    paths = {name: os.path.join(outdir, fname) for name, fname in (
        ("data", "data.csv"), ("ranges", "ranges.json"),
        ("prior", "prior.json"), ("truth", "truth.json"))}
    with open(paths["data"], "w") as f:
        f.write("patient_id," + ",".join(obs.symptom_names) + "\n")
        for i in range(obs.n):
            codes = [str(int(v)) for v in obs.Z[i]] + [str(int(v)) for v in obs.Y[i]]
            f.write(obs.patient_ids[i] + "," + ",".join(codes) + "\n")
    with open(paths["ranges"], "w") as f:
        json.dump(_coded_ranges(obs), f, indent=1)
    with open(paths["prior"], "w") as f:
        json.dump(_prior_document(sim), f, indent=1)
    with open(paths["truth"], "w") as f:
        json.dump({
            "A": sim.A.tolist(), "B": sim.B.tolist(), "C": sim.C.tolist(),
            "K": int(sim.A.shape[1]), "meta": sim.meta,
        }, f)
    return paths


def read_truth(path: str) -> dict:
    with open(path) as f:
        doc = json.load(f)
    return {
        "A": np.array(doc["A"], dtype=np.int8),
        "B": np.array(doc["B"], dtype=np.int8),
        "C": np.array(doc["C"], dtype=np.int8),
        "K": doc["K"],
        "meta": doc.get("meta", {}),
    }

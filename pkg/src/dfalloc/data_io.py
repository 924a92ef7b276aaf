"""Ingestion and persistence: reference-range discretization, prior-knowledge
documents, line-delimited chain files and summary documents.

File formats
------------
Raw measurements: CSV with a header row, one patient per row, patient id in
the first column.

Reference ranges: JSON ``{"items": [{"name", "kind": "binary"|"ternary",
"lower", "upper", "inclusive": true}]}``; binary items may omit one bound.

Prior knowledge: JSON ``{"diseases": [{"name", "patients": [ids],
"symptoms": {"name": -1|0|1}, "pin_remaining_zero": bool}]}``. ``patients``
pins the disease's A column; ``symptoms`` pins individual B/C entries;
``pin_remaining_zero`` pins every unnamed symptom entry of that disease to 0.

Chains: one JSON record per line; the header record carries schema, dims,
seed and config, each following record is one snapshot. Floats survive the
round trip bit-exactly (shortest-repr JSON encoding).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .model import AllocationState, ModelConfig, ObservationSet, PriorKnowledge
from .sampler import Chain, SamplerConfig

CHAIN_SCHEMA = "dfa-chain/1"
SUMMARY_SCHEMA = "dfa-summary/1"


class SchemaError(ValueError):
    """Document does not match the expected schema or dimensions."""


@dataclass
class ReferenceRange:
    name: str
    kind: str  # "binary" | "ternary"
    lower: float | None = None
    upper: float | None = None
    inclusive: bool = True  # boundary values count as within range

    def __post_init__(self):
        if self.kind not in ("binary", "ternary"):
            raise SchemaError(f"unknown item kind {self.kind!r}")
        if self.kind == "ternary" and (self.lower is None or self.upper is None):
            raise SchemaError(f"ternary item {self.name!r} needs both bounds")
        if self.lower is None and self.upper is None:
            raise SchemaError(f"item {self.name!r} needs at least one bound")
        if self.lower is not None and self.upper is not None and not self.lower < self.upper:
            raise SchemaError(f"item {self.name!r}: lower must be below upper")

    def code(self, values: np.ndarray) -> np.ndarray:
        """Map raw values to symptom codes."""
        lo = -np.inf if self.lower is None else self.lower
        hi = np.inf if self.upper is None else self.upper
        if self.inclusive:
            below = values < lo
            above = values > hi
        else:
            below = values <= lo
            above = values >= hi
        if self.kind == "ternary":
            return (above.astype(np.int8) - below.astype(np.int8))
        return (below | above).astype(np.int8)


def load_ranges(doc: dict | str) -> list[ReferenceRange]:
    if isinstance(doc, str):
        with open(doc) as f:
            doc = json.load(f)
    items = doc.get("items")
    if not isinstance(items, list):
        raise SchemaError("ranges document must carry an 'items' list")
    return [ReferenceRange(**item) for item in items]


def discretize(raw_table: pd.DataFrame | str, ranges: list[ReferenceRange]) -> ObservationSet:
    """Turn raw measurements into the binary/ternary symptom matrices.

    Binary items come first (columns of Z, in range order), ternary items
    follow (columns of Y). Missing or non-numeric cells are rejected.
    """
    if isinstance(raw_table, str):
        raw_table = pd.read_csv(raw_table, dtype={0: str})
    id_col = raw_table.columns[0]
    patient_ids = [str(v) for v in raw_table[id_col]]
    binary = [r for r in ranges if r.kind == "binary"]
    ternary = [r for r in ranges if r.kind == "ternary"]
    cols = {}
    for r in binary + ternary:
        if r.name not in raw_table.columns:
            raise SchemaError(f"data is missing column {r.name!r}")
        values = pd.to_numeric(raw_table[r.name], errors="coerce").to_numpy(dtype=np.float64)
        if np.isnan(values).any():
            bad = int(np.isnan(values).argmax())
            raise SchemaError(
                f"column {r.name!r} has a missing or non-numeric value "
                f"for patient {patient_ids[bad]!r}")
        cols[r.name] = r.code(values)
    n = len(patient_ids)
    Z = (np.column_stack([cols[r.name] for r in binary])
         if binary else np.zeros((n, 0), dtype=np.int8))
    Y = (np.column_stack([cols[r.name] for r in ternary])
         if ternary else np.zeros((n, 0), dtype=np.int8))
    names = [r.name for r in binary] + [r.name for r in ternary]
    return ObservationSet(Z=Z, Y=Y, symptom_names=names, patient_ids=patient_ids)


def load_prior_knowledge(doc: dict | str, obs: ObservationSet,
                         n_binary: int | None = None) -> PriorKnowledge:
    """Parse a prior-knowledge document against the observation set's
    patient ids and symptom names."""
    if isinstance(doc, str):
        with open(doc) as f:
            doc = json.load(f)
    diseases = doc.get("diseases", [])
    p = obs.p if n_binary is None else n_binary
    q = obs.q
    name_to_idx = {name: s for s, name in enumerate(obs.symptom_names)}
    id_to_idx = {pid: i for i, pid in enumerate(obs.patient_ids)}
    K0 = len(diseases)
    pk = PriorKnowledge(K0=K0, disease_names=[d["name"] for d in diseases])
    for k, d in enumerate(diseases):
        if "patients" in d and d["patients"] is not None:
            col = np.zeros(obs.n, dtype=np.int8)
            for pid in d["patients"]:
                if str(pid) not in id_to_idx:
                    raise SchemaError(f"unknown patient id {pid!r} in disease {d['name']!r}")
                col[id_to_idx[str(pid)]] = 1
            pk.pinned_A[k] = col
        b_col = np.zeros(p, dtype=np.int8)
        c_col = np.zeros(q, dtype=np.int8)
        b_mask = np.zeros(p, dtype=bool)
        c_mask = np.zeros(q, dtype=bool)
        for sym, value in (d.get("symptoms") or {}).items():
            if sym not in name_to_idx:
                raise SchemaError(f"unknown symptom {sym!r} in disease {d['name']!r}")
            s = name_to_idx[sym]
            if s < p:
                if value not in (0, 1):
                    raise SchemaError(f"binary symptom {sym!r} must pin 0 or 1")
                b_col[s] = value
                b_mask[s] = True
            else:
                if value not in (-1, 0, 1):
                    raise SchemaError(f"ternary symptom {sym!r} must pin -1, 0 or +1")
                c_col[s - p] = value
                c_mask[s - p] = True
        if d.get("pin_remaining_zero"):
            b_mask[:] = True
            c_mask[:] = True
        if b_mask.any():
            pk.pinned_B[k] = b_col
            pk.pinned_B_mask[k] = b_mask
        if c_mask.any():
            pk.pinned_C[k] = c_col
            pk.pinned_C_mask[k] = c_mask
    return pk


# ---------------------------------------------------------------------------
# Chain serialization.

def _mat(x) -> list:
    return np.asarray(x).tolist()


def _state_record(snap: AllocationState, it: int, ll: float, K: int) -> dict:
    rec = {
        "iter": it, "K": K, "loglik": ll,
        "A": _mat(snap.A), "B": _mat(snap.B), "C": _mat(snap.C),
        "W": _mat(snap.W), "Wneg": _mat(snap.Wneg), "Wpos": _mat(snap.Wpos),
        "zeta": _mat(snap.zeta), "eta_neg": _mat(snap.eta_neg),
        "eta_pos": _mat(snap.eta_pos),
        "rho": snap.rho, "pi": _mat(snap.pi),
        "lam": snap.lam, "sigma2": snap.sigma2,
    }
    if snap.rho_j is not None:
        rec["rho_j"] = _mat(snap.rho_j)
    return rec


def write_chain(chain: Chain, stream) -> None:
    """Write one header record plus one record per snapshot, JSON per line."""
    close = False
    if isinstance(stream, str):
        stream = open(stream, "w")
        close = True
    try:
        mc = chain.model_config
        sc = chain.sampler_config
        pinned = {}
        if chain.snapshots:
            ref = chain.snapshots[0]
            pinned = {
                "fixed_A": _mat(ref.fixed_A[:chain.K0].astype(int)),
                "fixed_B": _mat(ref.fixed_B[:, :chain.K0].astype(int)),
                "fixed_C": _mat(ref.fixed_C[:, :chain.K0].astype(int)),
                "pinned_A": _mat(ref.A[:, :chain.K0]),
                "pinned_B": _mat(ref.B[:, :chain.K0]),
                "pinned_C": _mat(ref.C[:, :chain.K0]),
            }
        header = {
            "schema": CHAIN_SCHEMA,
            "n": chain.n, "p": chain.p, "q": chain.q, "K0": chain.K0,
            "seed": chain.seed,
            "overflow_count": chain.overflow_count,
            "disease_names": chain.disease_names,
            "model_config": {
                "m": mc.m, "tau": mc.tau, "tau_w": mc.tau_w,
                "a_rho": mc.a_rho, "b_rho": mc.b_rho, "phi": list(mc.phi),
                "K_cap": mc.K_cap, "hierarchical_rho": mc.hierarchical_rho,
                "a_sigma": mc.a_sigma, "b_sigma": mc.b_sigma,
            },
            "sampler_config": {
                "iterations": sc.iterations, "burn_in": sc.burn_in,
                "thin": sc.thin, "seed": sc.seed,
                "rw_step_offset": sc.rw_step_offset,
                "rw_step_logweight": sc.rw_step_logweight,
                "birth_cap_per_row": sc.birth_cap_per_row,
            },
            "pinned": pinned,
        }
        stream.write(json.dumps(header) + "\n")
        for snap, it, ll, K in zip(chain.snapshots, chain.iters,
                                   chain.logliks, chain.Ks):
            stream.write(json.dumps(_state_record(snap, it, ll, K)) + "\n")
    finally:
        if close:
            stream.close()


def read_chain(stream) -> Chain:
    """Inverse of write_chain; validates header schema and dimensions."""
    close = False
    if isinstance(stream, str):
        stream = open(stream)
        close = True
    try:
        lines = [line for line in stream if line.strip()]
    finally:
        if close:
            stream.close()
    if not lines:
        raise SchemaError("empty chain file (no header)")
    header = json.loads(lines[0])
    if header.get("schema") != CHAIN_SCHEMA:
        raise SchemaError(f"unexpected chain schema {header.get('schema')!r}")
    n, p, q, K0 = header["n"], header["p"], header["q"], header["K0"]
    mc = ModelConfig(**{**header["model_config"],
                        "phi": tuple(header["model_config"]["phi"])})
    sc = SamplerConfig(**header["sampler_config"])
    pinned = header.get("pinned") or {}
    chain = Chain(snapshots=[], logliks=[], Ks=[], iters=[],
                  seed=header["seed"], model_config=mc, sampler_config=sc,
                  n=n, p=p, q=q, K0=K0,
                  overflow_count=header.get("overflow_count", 0),
                  disease_names=header.get("disease_names", []))
    for line in lines[1:]:
        rec = json.loads(line)
        K = rec["K"]
        if len(rec["A"]) != n:
            raise SchemaError("snapshot row count disagrees with header n")
        if any(len(row) != K for row in rec["A"]):
            raise SchemaError("snapshot K disagrees with matrix width")
        A = np.array(rec["A"], dtype=np.int8).reshape(n, K)
        fixed_A = np.zeros(K, dtype=bool)
        fixed_B = np.zeros((p, K), dtype=bool)
        fixed_C = np.zeros((q, K), dtype=bool)
        if pinned and K0:
            fixed_A[:K0] = np.array(pinned["fixed_A"], dtype=bool)
            fixed_B[:, :K0] = np.array(pinned["fixed_B"], dtype=bool).reshape(p, K0)
            fixed_C[:, :K0] = np.array(pinned["fixed_C"], dtype=bool).reshape(q, K0)
        snap = AllocationState(
            A=A,
            B=np.array(rec["B"], dtype=np.int8).reshape(p, K),
            C=np.array(rec["C"], dtype=np.int8).reshape(q, K),
            W=np.array(rec["W"], dtype=np.float64).reshape(p, K),
            Wneg=np.array(rec["Wneg"], dtype=np.float64).reshape(q, K),
            Wpos=np.array(rec["Wpos"], dtype=np.float64).reshape(q, K),
            zeta=np.array(rec["zeta"], dtype=np.float64),
            eta_neg=np.array(rec["eta_neg"], dtype=np.float64),
            eta_pos=np.array(rec["eta_pos"], dtype=np.float64),
            rho=rec["rho"], pi=np.array(rec["pi"], dtype=np.float64),
            K0=K0, fixed_A=fixed_A, fixed_B=fixed_B, fixed_C=fixed_C,
            rho_j=(np.array(rec["rho_j"], dtype=np.float64)
                   if "rho_j" in rec else None),
            lam=rec.get("lam", 0.0), sigma2=rec.get("sigma2", 1.0),
        )
        if snap.zeta.shape[0] != p or snap.eta_neg.shape[0] != q:
            raise SchemaError("snapshot offset lengths disagree with header")
        chain.snapshots.append(snap)
        chain.logliks.append(rec["loglik"])
        chain.Ks.append(rec["K"])
        chain.iters.append(rec["iter"])
    return chain


# ---------------------------------------------------------------------------
# Summary serialization.

def write_summary(summary, stream) -> None:
    from .summarize import FittedSummary  # noqa: F401 (documented schema owner)

    doc = {
        "schema": SUMMARY_SCHEMA,
        "K_hat": summary.K_hat, "K0": summary.K0,
        "A_hat": _mat(summary.A_hat), "B_hat": _mat(summary.B_hat),
        "C_hat": _mat(summary.C_hat),
        "edge_probs": _mat(summary.edge_probs),
        "prevalence": _mat(summary.prevalence),
        "patient_probs": _mat(summary.patient_probs),
        "weight_means": _mat(summary.weight_means),
        "weight_neg_means": _mat(summary.weight_neg_means),
        "weight_pos_means": _mat(summary.weight_pos_means),
        "offset_means": {k: _mat(v) for k, v in summary.offset_means.items()},
        "K_pmf": {str(k): v for k, v in summary.K_pmf.items()},
        "fixed_A": _mat(summary.fixed_A.astype(int)),
        "fixed_B": _mat(summary.fixed_B.astype(int)),
        "fixed_C": _mat(summary.fixed_C.astype(int)),
        "disease_names": summary.disease_names,
        "symptom_names": summary.symptom_names,
        "patient_ids": summary.patient_ids,
        "Z": None if summary.Z is None else _mat(summary.Z),
        "Y": None if summary.Y is None else _mat(summary.Y),
    }
    close = False
    if isinstance(stream, str):
        stream = open(stream, "w")
        close = True
    try:
        json.dump(doc, stream)
    finally:
        if close:
            stream.close()


def read_summary(stream):
    from .summarize import FittedSummary

    close = False
    if isinstance(stream, str):
        stream = open(stream)
        close = True
    try:
        doc = json.load(stream)
    finally:
        if close:
            stream.close()
    if doc.get("schema") != SUMMARY_SCHEMA:
        raise SchemaError(f"unexpected summary schema {doc.get('schema')!r}")
    K = doc["K_hat"]
    n = len(doc["A_hat"])
    p = len(doc["B_hat"])
    q = len(doc["C_hat"])

    def arr(key, dtype, shape):
        return np.array(doc[key], dtype=dtype).reshape(shape)

    return FittedSummary(
        K_hat=K, K0=doc["K0"],
        A_hat=arr("A_hat", np.int8, (n, K)),
        B_hat=arr("B_hat", np.int8, (p, K)),
        C_hat=arr("C_hat", np.int8, (q, K)),
        edge_probs=arr("edge_probs", np.float64, (p + q, K)),
        prevalence=np.array(doc["prevalence"], dtype=np.int64),
        patient_probs=arr("patient_probs", np.float64, (n, K)),
        weight_means=arr("weight_means", np.float64, (p, K)),
        weight_neg_means=arr("weight_neg_means", np.float64, (q, K)),
        weight_pos_means=arr("weight_pos_means", np.float64, (q, K)),
        offset_means={k: np.array(v, dtype=np.float64)
                      for k, v in doc["offset_means"].items()},
        K_pmf={int(k): v for k, v in doc["K_pmf"].items()},
        fixed_A=arr("fixed_A", bool, (K,)),
        fixed_B=arr("fixed_B", bool, (p, K)),
        fixed_C=arr("fixed_C", bool, (q, K)),
        disease_names=doc["disease_names"],
        symptom_names=doc["symptom_names"],
        patient_ids=doc["patient_ids"],
        Z=None if doc["Z"] is None else np.array(doc["Z"], dtype=np.int8).reshape(n, p),
        Y=None if doc["Y"] is None else np.array(doc["Y"], dtype=np.int8).reshape(n, q),
    )

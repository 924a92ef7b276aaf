"""Read-only HTTP JSON API over a fitted summary.

Backs the diagnosis-recommendation UI: patient lists, per-patient disease
probabilities with triggering symptoms, disease metadata and the network
export. All responses are derived once from the loaded summary and never
mutate.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .summarize import FittedSummary, export_network


def _disease_symptoms(summary: FittedSummary, k: int) -> list[dict]:
    """Symptoms linked to disease k in the point estimate, with inclusion
    probabilities; suppress/enhance gives the ternary direction."""
    out = []
    p = summary.p
    for j in range(p):
        if summary.B_hat[j, k] == 1:
            out.append({
                "name": summary.symptom_names[j],
                "kind": "binary",
                "sign": "binary",
                "edge_prob": float(summary.edge_probs[j, k]),
                "known": bool(summary.fixed_B[j, k]),
            })
    for l in range(summary.q):
        c = int(summary.C_hat[l, k])
        if c != 0:
            out.append({
                "name": summary.symptom_names[p + l],
                "kind": "ternary",
                "sign": "suppress" if c == -1 else "enhance",
                "edge_prob": float(summary.edge_probs[p + l, k]),
                "known": bool(summary.fixed_C[l, k]),
            })
    return out


def create_app(summary: FittedSummary) -> FastAPI:
    app = FastAPI(title="dfalloc service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET"],
        allow_headers=["*"],
    )
    index = {pid: i for i, pid in enumerate(summary.patient_ids)}
    disease_docs = [
        {
            "name": summary.disease_names[k],
            "known": k < summary.K0,
            "pinned_diagnoses": bool(summary.fixed_A[k]),
            "prevalence": int(summary.prevalence[k]),
            "symptoms": _disease_symptoms(summary, k),
        }
        for k in range(summary.K_hat)
    ]
    network_doc = export_network(summary)

    def observed_codes(i: int) -> list[dict]:
        codes = []
        if summary.Z is not None:
            for j in range(summary.p):
                codes.append({"name": summary.symptom_names[j],
                              "kind": "binary", "code": int(summary.Z[i, j])})
            for l in range(summary.q):
                codes.append({"name": summary.symptom_names[summary.p + l],
                              "kind": "ternary", "code": int(summary.Y[i, l])})
        return codes

    @app.get("/api/patients")
    def patients():
        return {"patients": list(summary.patient_ids)}

    @app.get("/api/patients/{patient_id}")
    def patient(patient_id: str):
        i = index.get(patient_id)
        if i is None:
            return JSONResponse(status_code=404,
                                content={"error": "unknown patient"})
        probs = summary.patient_probs[i]
        return {
            "id": patient_id,
            "diseases": [
                {
                    "name": summary.disease_names[k],
                    "known": k < summary.K0,
                    "probability": float(probs[k]),
                    "allocated": bool(summary.A_hat[i, k]),
                    "triggering_symptoms": disease_docs[k]["symptoms"],
                }
                for k in range(summary.K_hat)
            ],
            "symptoms": observed_codes(i),
        }

    @app.get("/api/diseases")
    def diseases():
        return {"diseases": disease_docs}

    @app.get("/api/network")
    def network():
        return network_doc

    return app


def serve(summary: FittedSummary, port: int = 8000, host: str = "127.0.0.1"):
    """Run the API with uvicorn; blocks until interrupted."""
    import uvicorn

    uvicorn.run(create_app(summary), host=host, port=port, log_level="warning")

"""End-to-end pipeline on an EHR-flavoured dataset, driven through the CLI.

Walks the same path a real analysis would take, using files on disk and the
command-line entry points instead of in-process calls:

  1. emit a synthetic lab-panel dataset with four partially known diseases
     (data.csv, ranges.json, prior.json)
  2. fit the model (chain.jsonl)
  3. summarize the chain into point estimates and an exportable disease
     network (summary.json, network.json)
  4. peek at what the HTTP service would show for one diagnosed patient

Run:  python3 demos/ehr_pipeline.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from dfalloc.cli import main
from dfalloc.data_io import read_summary
from dfalloc.service import create_app
from dfalloc.simulate import simulate_ehr_like

work = Path(tempfile.mkdtemp(prefix="dfalloc-demo-"))
sim_dir = work / "sim"
chain = work / "chain.jsonl"
summary_path = work / "summary.json"
network_path = work / "network.json"

# 1. simulate ------------------------------------------------------------------
assert main(["simulate", "--scenario", "ehr", "--seed", "4",
             "--out", str(sim_dir)]) == 0
print(f"wrote {sorted(p.name for p in sim_dir.iterdir())} under {sim_dir}")

# 2. fit ------------------------------------------------------------------------
assert main(["fit", "--data", str(sim_dir / "data.csv"),
             "--ranges", str(sim_dir / "ranges.json"),
             "--prior", str(sim_dir / "prior.json"),
             "--out", str(chain),
             "--iters", "2000", "--m", "2.0", "--seed", "4"]) == 0

# 3. summarize -------------------------------------------------------------------
assert main(["summarize", "--chain", str(chain), "--out", str(summary_path),
             "--network", str(network_path),
             "--data", str(sim_dir / "data.csv"),
             "--ranges", str(sim_dir / "ranges.json")]) == 0
summary = read_summary(str(summary_path))
print(f"K_hat = {summary.K_hat} "
      f"({summary.K0} known diseases + {summary.K_hat - summary.K0} discovered)")

network = json.loads(network_path.read_text())
print(f"network: {len(network['diseases'])} diseases, "
      f"{len(network['edges'])} disease-symptom edges")

# 4. inspect one patient through the service API ---------------------------------
client = TestClient(create_app(summary))
diagnosed = simulate_ehr_like(4).meta["diagnosed"][0]
doc = client.get(f"/api/patients/{diagnosed}").json()
print(f"\npatient {diagnosed}:")
for d in doc["diseases"]:
    if d["probability"] < 0.1:
        continue
    tag = "known" if d["known"] else "discovered"
    trig = ", ".join(s["name"] for s in d["triggering_symptoms"][:4])
    via = f"  via {trig}" if trig else ""
    print(f"  {d['name']:<14} ({tag})  p={d['probability']:.2f}{via}")

"""Recovering planted diseases from well-specified synthetic data.

Generates a benchmark dataset whose ground truth is drawn from the model
itself (six diseases, two of them partially known a priori), runs the
trans-dimensional sampler, and checks how well the posterior point estimates
recover the planted structure.

Run:  python3 demos/scenario1_recovery.py
"""

from dfalloc import (
    ModelConfig,
    SamplerConfig,
    build_summary,
    evaluate_against_truth,
    run_mcmc,
    simulate_scenario1,
)

SEED = 1

# --- generate the benchmark -------------------------------------------------
# 300 patients, 24 binary + 24 ternary symptoms, 6 planted diseases. Disease 1
# is fully known (diagnoses and symptom links pinned); disease 2 has known
# symptom links but unknown diagnoses.
sim = simulate_scenario1(SEED)
print(f"data: n={sim.obs.n}, p={sim.obs.p}, q={sim.obs.q}, "
      f"true K={sim.A.shape[1]}")
print(f"true disease prevalences: {sorted(int(v) for v in sim.A.sum(axis=0))}")

# --- fit ---------------------------------------------------------------------
# 5000 sweeps, first half burn-in, keep every 5th state afterwards.
config = SamplerConfig(iterations=5000, burn_in=2500, thin=5, seed=SEED)
chain = run_mcmc(sim.obs, sim.prior, ModelConfig(m=1.0), config)
print(f"chain: {len(chain)} snapshots, "
      f"posterior K values {sorted(set(chain.Ks))}")

# --- summarize and score ------------------------------------------------------
summary = build_summary(chain, sim.obs)
print(f"posterior mode K_hat = {summary.K_hat}")
print("posterior over K:", {k: round(v, 3) for k, v in summary.K_pmf.items()})

metrics = evaluate_against_truth(summary, sim.A, sim.B, sim.C)
print(f"misallocation rate: {100 * metrics['misallocation_rate']:.1f}%")
print(f"B error rate:       {100 * metrics['error_rate_B']:.1f}%")
print(f"C error rate:       {100 * metrics['error_rate_C']:.1f}%")

# The pinned disease keeps its diagnoses at probability exactly one.
assert (summary.patient_probs[:, 0] == sim.prior.pinned_A[0]).all()
print("pinned disease 1 diagnoses reproduced exactly")

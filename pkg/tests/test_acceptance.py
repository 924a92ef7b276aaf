"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (bypassing capture) with its pinned
tolerances, then asserts.
"""

import io
import itertools
import json
import sys

import numpy as np
import pytest
from scipy import stats

from dfalloc import _sweep
from dfalloc.cli import main as cli_main
from dfalloc.data_io import read_chain, read_summary, write_chain
from dfalloc.kernels import (
    binary_symptom_prob,
    row_log_likelihood,
    ternary_symptom_probs,
)
from dfalloc.model import ModelConfig, ObservationSet, PriorKnowledge
from dfalloc.sampler import (
    Chain,
    SamplerConfig,
    _Packed,
    initial_state,
    propose_new_diseases,
    run_mcmc,
)
from dfalloc.simulate import simulate_scenario1, simulate_scenario2
from dfalloc.summarize import (
    build_summary,
    evaluate_against_truth,
    least_squares_A,
    perm_hamming_distance,
)
from _util import random_A, random_obs, random_state


# One human-readable line per criterion; also collected so conftest can echo
# them after pytest releases its output capture.
REPORT_LINES: list[str] = []


def report(name: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}: {name}"
    if detail:
        line += f" — {detail}"
    REPORT_LINES.append(line)
    print(line, file=sys.__stderr__, flush=True)
    assert ok, line


# ---------------------------------------------------------------------------
# Criterion: kernel normalization.

def test_kernel_normalization():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100_000):
        K = int(rng.integers(1, 5))
        alpha = (rng.random(K) < 0.5).astype(float)
        gamma = rng.integers(-1, 2, K)
        probs = ternary_symptom_probs(
            alpha, gamma, rng.exponential(10, K), rng.exponential(10, K),
            rng.normal(0, 50), rng.normal(0, 50))
        worst = max(worst, abs(sum(probs) - 1.0))
    ok = worst <= 1e-12
    # binary side: no overflow for |s| <= 700
    for s in np.linspace(-700, 700, 2001):
        prob = binary_symptom_prob(np.ones(1), np.ones(1), np.array([abs(s)]),
                                   s - abs(s))
        if not (0.0 <= prob <= 1.0 and np.isfinite(prob)):
            ok = False
            break
    report("kernel normalization (ternary sums within 1e-12 over 1e5 calls; "
           "binary finite in (0,1) for |s|<=700)", ok,
           f"max |sum-1| = {worst:.2e}")


# ---------------------------------------------------------------------------
# Criterion: summarization correctness vs brute force.

def test_summarization_brute_force_equivalence():
    rng = np.random.default_rng(1)
    ok = True
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        K = int(rng.integers(1, 7))
        A = random_A(rng, n, K)
        A2 = random_A(rng, n, K)
        d, _ = perm_hamming_distance(A, A2)
        brute = min(int((A != A2[:, perm]).sum())
                    for perm in itertools.permutations(range(K)))
        if d != brute:
            ok = False
            break
    # least-squares selection vs brute force on chains of <= 10 snapshots
    for trial in range(20):
        S = int(rng.integers(2, 11))
        snaps = [random_state(n=6, p=2, q=2, K=3, seed=1000 + 100 * trial + s)
                 for s in range(S)]
        chain = Chain(snapshots=snaps, logliks=[0.0] * S, Ks=[3] * S,
                      iters=list(range(S)), seed=0,
                      model_config=ModelConfig(),
                      sampler_config=SamplerConfig(iterations=10),
                      n=6, p=2, q=2, K0=0)
        A_hat, idx = least_squares_A(chain, 3)
        means = []
        for a in range(S):
            tot = sum(perm_hamming_distance(snaps[a].A, snaps[b].A)[0]
                      for b in range(S))
            means.append(tot / S)
        if idx != int(np.argmin(means)):
            ok = False
            break
    report("summarization (assignment distance == brute force on 1000 pairs; "
           "least-squares estimate == brute force on chains <= 10)", ok)


# ---------------------------------------------------------------------------
# Criterion: exact-conditional oracle on a frozen-dimension toy model.

def _packed(state, obs, seed):
    packed = _Packed(state, obs, 10)
    _sweep.seed_rng(seed)
    return packed


def test_exact_conditional_oracle():
    n, p, q, K = 4, 2, 2, 2
    m = 1.0
    state = random_state(n=n, p=p, q=q, K=K, seed=5, weight_scale=1.5)
    obs = random_obs(n=n, p=p, q=q, seed=5)
    ndraws = 1_000_000
    worst = 0.0
    ok = True

    # alpha coordinates: prior (r_-i + m)/(n + m), likelihood from row i
    for (i, k) in [(0, 0), (1, 1), (3, 0)]:
        weights = []
        for a in (0, 1):
            st = state.copy()
            st.A[i, k] = a
            r_minus = int(state.A[:, k].sum() - state.A[i, k])
            pr1 = (r_minus + m) / (n + m)
            prior = pr1 if a == 1 else 1.0 - pr1
            weights.append(prior * np.exp(row_log_likelihood(st, obs, i)))
        oracle = weights[1] / sum(weights)
        packed = _packed(state, obs, 100 + i + 10 * k)
        ones = _sweep.tally_A_updates(
            packed.Z, packed.Y, packed.A, packed.B, packed.C,
            packed.W, packed.Wn, packed.Wp, packed.SZ, packed.SN, packed.SP,
            packed.fixedA, packed.fixedB, packed.fixedC, packed.kact,
            packed.K0, i, k, m, ndraws)
        tv = abs(ones / ndraws - oracle)
        worst = max(worst, tv)

    # beta coordinates: Bernoulli(rho) prior, likelihood over all patients
    for (j, k) in [(0, 0), (1, 1)]:
        weights = []
        for b in (0, 1):
            st = state.copy()
            st.B[j, k] = b
            prior = state.rho if b == 1 else 1.0 - state.rho
            ll = sum(row_log_likelihood(st, obs, i) for i in range(n))
            weights.append(prior * np.exp(ll))
        oracle = weights[1] / sum(weights)
        packed = _packed(state, obs, 200 + j + 10 * k)
        ones = _sweep.tally_B_updates(packed.Z, packed.A, packed.B, packed.W,
                                      packed.SZ, packed.fixedB, j, k,
                                      state.rho, ndraws)
        tv = abs(ones / ndraws - oracle)
        worst = max(worst, tv)

    # gamma coordinates: categorical(pi) prior
    for (l, k) in [(0, 0), (1, 1)]:
        weights = []
        for c in (-1, 0, 1):
            st = state.copy()
            st.C[l, k] = c
            ll = sum(row_log_likelihood(st, obs, i) for i in range(n))
            weights.append(state.pi[c + 1] * np.exp(ll))
        oracle = np.array(weights) / sum(weights)
        packed = _packed(state, obs, 300 + l + 10 * k)
        counts = _sweep.tally_C_updates(packed.Y, packed.A, packed.C,
                                        packed.Wn, packed.Wp, packed.SN,
                                        packed.SP, packed.fixedC, l, k,
                                        np.ascontiguousarray(state.pi), ndraws)
        tv = 0.5 * np.abs(counts / ndraws - oracle).sum()
        worst = max(worst, tv)

    ok = worst <= 0.02
    report("exact-conditional oracle (frozen K=2, n=4, p=q=2: empirical "
           "alpha/beta/gamma conditionals within 0.02 TV of brute force "
           "over 1e6 updates each)", ok, f"worst TV = {worst:.4f}")


# ---------------------------------------------------------------------------
# Criterion: prior reproduction with no data.

def test_prior_reproduction():
    n, m = 20, 1.0
    obs = ObservationSet(Z=np.zeros((n, 0)), Y=np.zeros((n, 0)))
    cfg = SamplerConfig(iterations=21_000, burn_in=1000, thin=1, seed=11)
    chain = run_mcmc(obs, None, ModelConfig(m=m), cfg)
    Ks = np.array(chain.Ks, dtype=float)
    Hn = sum(1.0 / i for i in range(1, n + 1))
    # batch-means standard error for the correlated chain
    nbatch = 100
    batches = Ks[: (len(Ks) // nbatch) * nbatch].reshape(nbatch, -1).mean(axis=1)
    se = batches.std(ddof=1) / np.sqrt(nbatch)
    mean_ok = abs(Ks.mean() - m * Hn) <= 3 * se

    # new-disease counts per row are Poisson(m/n): with no data every birth
    # proposal is accepted, so repeated proposals tally the count law
    n2, m2 = 10, 30.0
    obs2 = ObservationSet(Z=np.zeros((n2, 0)), Y=np.zeros((n2, 0)))
    base = initial_state(obs2, None, ModelConfig(m=m2),
                         np.random.default_rng(0))
    rate = m2 / n2
    draws = np.empty(20_000, dtype=np.int64)
    _sweep.seed_rng(7_000_000)  # one stream across all proposals
    for s in range(draws.size):
        out = propose_new_diseases(base, obs2, i=0, seed=None, m=m2)
        draws[s] = out.K - base.K
    kmax = 9
    observed = np.bincount(np.minimum(draws, kmax), minlength=kmax + 1)
    probs = stats.poisson.pmf(np.arange(kmax), rate)
    probs = np.append(probs, 1.0 - probs.sum())  # tail bin
    chi2, pval = stats.chisquare(observed, probs * draws.size)
    gof_ok = pval >= 0.01

    report("prior reproduction (p=q=0: |mean K - m*H_n| <= 3 MC SE; per-row "
           "birth counts Poisson(m/n) at the 1% level)",
           mean_ok and gof_ok,
           f"mean K {Ks.mean():.3f} vs {m * Hn:.3f} (SE {se:.3f}); "
           f"GoF p = {pval:.3f}")


# ---------------------------------------------------------------------------
# Criterion: determinism.

def test_determinism():
    sim = simulate_scenario1(21)
    cfg = SamplerConfig(iterations=300, burn_in=100, thin=5, seed=21)
    files = []
    for _ in range(2):
        chain = run_mcmc(sim.obs, sim.prior, ModelConfig(), cfg)
        buf = io.StringIO()
        write_chain(chain, buf)
        files.append(buf.getvalue())
    report("determinism (identical seed and inputs give bit-identical chain "
           "files across two runs)", files[0] == files[1])


# ---------------------------------------------------------------------------
# Criterion: Scenario I recovery over 50 seeded repeats.

def test_scenario1_recovery():
    repeats = 50
    k_hits = 0
    mis, err_b, err_c = [], [], []
    k_hats = []
    for seed in range(1, repeats + 1):
        sim = simulate_scenario1(seed)
        cfg = SamplerConfig(iterations=5000, burn_in=2500, thin=5, seed=seed)
        chain = run_mcmc(sim.obs, sim.prior, ModelConfig(m=1.0), cfg)
        summary = build_summary(chain, sim.obs)
        res = evaluate_against_truth(summary, sim.A, sim.B, sim.C)
        k_hats.append(res["K_hat"])
        if res["K_hat"] == 6:
            k_hits += 1
            mis.append(res["misallocation_rate"])
            err_b.append(res["error_rate_B"])
            err_c.append(res["error_rate_C"])
        print(f"  scenario-1 repeat {seed}/{repeats}: K_hat={res['K_hat']}",
              file=sys.__stderr__, flush=True)
    rate = k_hits / repeats
    ok = (rate >= 0.88
          and np.mean(mis) <= 0.06
          and np.mean(err_b) <= 0.03
          and np.mean(err_c) <= 0.04)
    report("scenario I recovery (50 repeats, T=5000/burn 2500/thin 5: "
           "K_hat=6 in >=88%, mean misallocation <=6%, B error <=3%, "
           "C error <=4%)", ok,
           f"K_hat=6 in {100 * rate:.0f}%; mean mis {100 * np.mean(mis):.2f}%, "
           f"B {100 * np.mean(err_b):.2f}%, C {100 * np.mean(err_c):.2f}%; "
           f"K_hats={sorted(set(k_hats))}")


# ---------------------------------------------------------------------------
# Criterion: Scenario II robustness under misspecification (t = 3).

def test_scenario2_robustness():
    repeats = 10
    dks, err_b, err_c = [], [], []
    for seed in range(1, repeats + 1):
        sim = simulate_scenario2(seed, t=3.0)
        cfg = SamplerConfig(iterations=5000, burn_in=2500, thin=5, seed=seed)
        chain = run_mcmc(sim.obs, sim.prior, ModelConfig(m=1.0), cfg)
        summary = build_summary(chain, sim.obs)
        res = evaluate_against_truth(summary, sim.A, sim.B, sim.C)
        dks.append(res["K_hat"] - 6)
        err_b.append(res["error_rate_B"])
        err_c.append(res["error_rate_C"])
        print(f"  scenario-2 repeat {seed}/{repeats}: K_hat={res['K_hat']}",
              file=sys.__stderr__, flush=True)
    # "overestimates by 1-3" is a tendency claim: no repeat may
    # underestimate, the mean excess must sit in [1, 3], and at least 80% of
    # repeats must land in the 0-3 band individually.
    in_band = np.mean([0 <= dk <= 3 for dk in dks])
    ok = (all(dk >= 0 for dk in dks)
          and 1.0 <= np.mean(dks) <= 3.0
          and in_band >= 0.8
          and np.mean(err_b) <= 0.15
          and np.mean(err_c) <= 0.15)
    report("scenario II robustness (t=3, 10 repeats: K never underestimated, "
           "mean excess in [1,3], >=80% of repeats within 0-3 excess; "
           "best-subset B and C errors <=15% mean)",
           ok,
           f"K excess={dks}; mean B {100 * np.mean(err_b):.1f}%, "
           f"C {100 * np.mean(err_c):.1f}%")


# ---------------------------------------------------------------------------
# Criterion: synthetic EHR-like pipeline end to end (stand-in for the
# non-public case-study dataset).

def _validate_network(doc) -> bool:
    if doc.get("schema") != "dfa-network/1":
        return False
    for key in ("diseases", "symptoms", "edges"):
        if not isinstance(doc.get(key), list):
            return False
    disease_ids = set()
    for d in doc["diseases"]:
        if not (isinstance(d.get("id"), str) and isinstance(d.get("name"), str)
                and isinstance(d.get("known"), bool)
                and isinstance(d.get("prevalence"), int)):
            return False
        disease_ids.add(d["id"])
    symptom_ids = set()
    for s in doc["symptoms"]:
        if not (isinstance(s.get("id"), str)
                and s.get("kind") in ("binary", "ternary")):
            return False
        symptom_ids.add(s["id"])
    for e in doc["edges"]:
        if e.get("disease") not in disease_ids:
            return False
        if e.get("symptom") not in symptom_ids:
            return False
        if e.get("sign") not in ("binary", "suppress", "enhance"):
            return False
        if not (isinstance(e.get("weight"), float) and 0 < e["weight"] <= 1):
            return False
        if not isinstance(e.get("known"), bool):
            return False
    return True


def test_ehr_like_pipeline(tmp_path):
    from fastapi.testclient import TestClient

    from dfalloc.service import create_app

    sim_dir = tmp_path / "sim"
    chain_path = tmp_path / "chain.jsonl"
    summary_path = tmp_path / "summary.json"
    network_path = tmp_path / "network.json"
    steps_ok = (
        cli_main(["simulate", "--scenario", "ehr", "--seed", "4",
                  "--out", str(sim_dir)]) == 0
        and cli_main(["fit", "--data", str(sim_dir / "data.csv"),
                      "--ranges", str(sim_dir / "ranges.json"),
                      "--prior", str(sim_dir / "prior.json"),
                      "--out", str(chain_path), "--iters", "1000",
                      "--seed", "4", "--m", "2.0"]) == 0
        and cli_main(["summarize", "--chain", str(chain_path),
                      "--out", str(summary_path),
                      "--network", str(network_path),
                      "--data", str(sim_dir / "data.csv"),
                      "--ranges", str(sim_dir / "ranges.json")]) == 0
    )
    pinned_ok = False
    service_ok = False
    network_ok = False
    if steps_ok:
        chain = read_chain(str(chain_path))
        first = chain.snapshots[0]
        pinned_ok = all(
            (s.A[:, 0] == first.A[:, 0]).all()
            and (s.B[:, :4][s.fixed_B[:, :4]]
                 == first.B[:, :4][first.fixed_B[:, :4]]).all()
            and (s.C[:, :4][s.fixed_C[:, :4]]
                 == first.C[:, :4][first.fixed_C[:, :4]]).all()
            for s in chain.snapshots)
        summary = read_summary(str(summary_path))
        client = TestClient(create_app(summary))
        pats = client.get("/api/patients").json()["patients"]
        detail = client.get(f"/api/patients/{pats[0]}")
        service_ok = (detail.status_code == 200
                      and client.get("/api/patients/zzz").status_code == 404
                      and client.get("/api/diseases").status_code == 200
                      and client.get("/api/network").status_code == 200)
        network_ok = _validate_network(json.loads(network_path.read_text()))
    ok = steps_ok and pinned_ok and service_ok and network_ok
    report("EHR-like pipeline (K0=4 pinned diseases: simulate -> fit -> "
           "summarize -> serve runs end to end; pinned columns bit-identical "
           "across the chain; network export validates)", ok,
           f"steps={steps_ok} pinned={pinned_ok} service={service_ok} "
           f"network={network_ok}")

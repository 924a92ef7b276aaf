"""Trans-dimensional MCMC over the allocation state.

The sweep itself is compiled (see ``_sweep``); this module owns configuration,
initialization, the chain container and thin Python wrappers around the
single-site kernels for direct use in tests and notebooks.

RNG discipline: the chain seed is expanded with ``numpy.random.SeedSequence``
into one stream for initialization (PCG64 at the Python level) and one stream
for the sweeps (numba's MT19937, seeded once). All in-sweep draws come from
the numba stream in a fixed order, so a chain is bit-reproducible from its
seed alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _sweep
from .kernels import log_likelihood
from .model import AllocationState, ModelConfig, ObservationSet, PriorKnowledge


@dataclass
class SamplerConfig:
    iterations: int = 5000
    burn_in: int | None = None  # default: iterations // 2
    thin: int = 5
    seed: int = 0
    rw_step_offset: float = 0.5
    rw_step_logweight: float = 0.5
    birth_cap_per_row: int = 0  # 0 = unlimited below K_cap

    def __post_init__(self):
        if self.burn_in is None:
            self.burn_in = self.iterations // 2
        if not self.iterations > self.burn_in >= 0:
            raise ValueError("need iterations > burn_in >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.rw_step_offset <= 0 or self.rw_step_logweight <= 0:
            raise ValueError("step sizes must be positive")


@dataclass
class Chain:
    snapshots: list[AllocationState]
    logliks: list[float]
    Ks: list[int]
    iters: list[int]
    seed: int
    model_config: ModelConfig
    sampler_config: SamplerConfig
    n: int
    p: int
    q: int
    K0: int
    overflow_count: int = 0
    disease_names: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.snapshots)


class _Packed:
    """Capacity-padded working arrays for the compiled kernels."""

    def __init__(self, state: AllocationState, obs: ObservationSet, K_cap: int):
        n, p, q, K = state.n, state.p, state.q, state.K
        if K > K_cap:
            raise ValueError(f"K={K} exceeds K_cap={K_cap}")
        self.Z = np.ascontiguousarray(obs.Z, dtype=np.int8)
        self.Y = np.ascontiguousarray(obs.Y, dtype=np.int8)
        self.A = np.zeros((n, K_cap), dtype=np.int8)
        self.B = np.zeros((p, K_cap), dtype=np.int8)
        self.C = np.zeros((q, K_cap), dtype=np.int8)
        self.W = np.ones((p, K_cap), dtype=np.float64)
        self.Wn = np.ones((q, K_cap), dtype=np.float64)
        self.Wp = np.ones((q, K_cap), dtype=np.float64)
        self.fixedA = np.zeros(K_cap, dtype=np.bool_)
        self.fixedB = np.zeros((p, K_cap), dtype=np.bool_)
        self.fixedC = np.zeros((q, K_cap), dtype=np.bool_)
        self.A[:, :K] = state.A
        self.B[:, :K] = state.B
        self.C[:, :K] = state.C
        self.W[:, :K] = state.W
        self.Wn[:, :K] = state.Wneg
        self.Wp[:, :K] = state.Wpos
        self.fixedA[:K] = state.fixed_A
        self.fixedB[:, :K] = state.fixed_B
        self.fixedC[:, :K] = state.fixed_C
        self.zeta = state.zeta.astype(np.float64).copy()
        self.etan = state.eta_neg.astype(np.float64).copy()
        self.etap = state.eta_pos.astype(np.float64).copy()
        self.SZ = np.zeros((n, p), dtype=np.float64)
        self.SN = np.zeros((n, q), dtype=np.float64)
        self.SP = np.zeros((n, q), dtype=np.float64)
        self.kact = np.array([K, 0], dtype=np.int64)
        self.K0 = state.K0
        self.rho_box = np.array([state.rho], dtype=np.float64)
        self.pi = state.pi.astype(np.float64).copy()
        p_len = max(p, 1)
        if state.rho_j is not None:
            from scipy.stats import norm

            self.rho_vec = state.rho_j.astype(np.float64).copy()
            self.lam_vec = norm.ppf(np.clip(self.rho_vec, 1e-15, 1 - 1e-15))
        else:
            self.rho_vec = np.full(p, 0.5, dtype=np.float64)
            self.lam_vec = np.zeros(p, dtype=np.float64)
        del p_len
        self.lam_box = np.array([state.lam], dtype=np.float64)
        self.sig2_box = np.array([state.sigma2], dtype=np.float64)
        self.refresh_linpred()

    def refresh_linpred(self):
        _sweep.recompute_linpred(self.A, self.B, self.C, self.W, self.Wn,
                                 self.Wp, self.zeta, self.etan, self.etap,
                                 int(self.kact[0]), self.SZ, self.SN, self.SP)

    def unpack(self, hierarchical: bool = False) -> AllocationState:
        K = int(self.kact[0])
        state = AllocationState(
            A=self.A[:, :K].copy(), B=self.B[:, :K].copy(), C=self.C[:, :K].copy(),
            W=self.W[:, :K].copy(), Wneg=self.Wn[:, :K].copy(),
            Wpos=self.Wp[:, :K].copy(),
            zeta=self.zeta.copy(), eta_neg=self.etan.copy(),
            eta_pos=self.etap.copy(),
            rho=float(np.mean(self.rho_vec)) if hierarchical else float(self.rho_box[0]),
            pi=self.pi.copy(), K0=self.K0,
            fixed_A=self.fixedA[:K].copy(), fixed_B=self.fixedB[:, :K].copy(),
            fixed_C=self.fixedC[:, :K].copy(),
            rho_j=self.rho_vec.copy() if hierarchical else None,
            lam=float(self.lam_box[0]), sigma2=float(self.sig2_box[0]),
        )
        return state


def initial_state(obs: ObservationSet, prior: PriorKnowledge | None,
                  config: ModelConfig, rng: np.random.Generator) -> AllocationState:
    """Starting point: the K0 known-disease columns only, symptom-side and
    weight parameters drawn from their priors, offsets at zero."""
    prior = prior or PriorKnowledge()
    n, p, q = obs.n, obs.p, obs.q
    K0 = prior.K0
    rho = float(rng.beta(config.a_rho, config.b_rho))
    pi = rng.dirichlet(config.phi)
    A = np.zeros((n, K0), dtype=np.int8)
    B = np.zeros((p, K0), dtype=np.int8)
    C = np.zeros((q, K0), dtype=np.int8)
    fixed_A = np.zeros(K0, dtype=bool)
    fixed_B = np.zeros((p, K0), dtype=bool)
    fixed_C = np.zeros((q, K0), dtype=bool)
    for k in range(K0):
        if prior.pinned_A[k] is not None:
            col = np.asarray(prior.pinned_A[k], dtype=np.int8)
            if col.shape != (n,):
                raise ValueError(f"pinned A column {k} has wrong length")
            A[:, k] = col
            fixed_A[k] = True
        if prior.pinned_B[k] is not None:
            col = np.asarray(prior.pinned_B[k], dtype=np.int8)
            mask = prior.pinned_B_mask[k]
            mask = np.ones(p, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
            B[mask, k] = col[mask]
            fixed_B[mask, k] = True
        if prior.pinned_C[k] is not None:
            col = np.asarray(prior.pinned_C[k], dtype=np.int8)
            mask = prior.pinned_C_mask[k]
            mask = np.ones(q, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
            C[mask, k] = col[mask]
            fixed_C[mask, k] = True
    free_B = ~fixed_B
    B[free_B] = (rng.random((p, K0)) < rho)[free_B]
    free_C = ~fixed_C
    draws = rng.choice(np.array([-1, 0, 1], dtype=np.int8), size=(q, K0), p=pi)
    C[free_C] = draws[free_C]
    state = AllocationState(
        A=A, B=B, C=C,
        W=rng.exponential(config.tau_w, size=(p, K0)),
        Wneg=rng.exponential(config.tau_w, size=(q, K0)),
        Wpos=rng.exponential(config.tau_w, size=(q, K0)),
        zeta=np.zeros(p), eta_neg=np.zeros(q), eta_pos=np.zeros(q),
        rho=rho, pi=pi, K0=K0,
        fixed_A=fixed_A, fixed_B=fixed_B, fixed_C=fixed_C,
        rho_j=np.full(p, 0.5) if config.hierarchical_rho else None,
        lam=0.0, sigma2=1.0,
    )
    return state


def run_mcmc(obs: ObservationSet, prior_knowledge: PriorKnowledge | None,
             model_config: ModelConfig, sampler_config: SamplerConfig) -> Chain:
    """Run the full sampler and return the thinned post-burn-in chain."""
    prior = prior_knowledge or PriorKnowledge()
    ss = np.random.SeedSequence(sampler_config.seed)
    init_seed, sweep_seed = ss.generate_state(2)
    rng = np.random.Generator(np.random.PCG64(init_seed))
    state = initial_state(obs, prior, model_config, rng)
    packed = _Packed(state, obs, model_config.K_cap)
    _sweep.seed_rng(int(sweep_seed))

    phi = np.asarray(model_config.phi, dtype=np.float64)
    hier = model_config.hierarchical_rho
    chain = Chain(
        snapshots=[], logliks=[], Ks=[], iters=[],
        seed=sampler_config.seed, model_config=model_config,
        sampler_config=sampler_config, n=obs.n, p=obs.p, q=obs.q,
        K0=prior.K0, disease_names=list(prior.disease_names),
    )
    T = sampler_config.iterations
    burn = sampler_config.burn_in
    thin = sampler_config.thin
    for t in range(1, T + 1):
        _sweep.sweep(
            packed.Z, packed.Y, packed.A, packed.B, packed.C,
            packed.W, packed.Wn, packed.Wp,
            packed.zeta, packed.etan, packed.etap,
            packed.SZ, packed.SN, packed.SP,
            packed.fixedA, packed.fixedB, packed.fixedC,
            packed.kact, packed.K0,
            model_config.m, model_config.tau, model_config.weight_rate,
            model_config.a_rho, model_config.b_rho, phi,
            packed.rho_box, packed.pi,
            packed.lam_vec, packed.rho_vec, packed.lam_box, packed.sig2_box,
            hier, model_config.a_sigma, model_config.b_sigma,
            sampler_config.rw_step_offset, sampler_config.rw_step_logweight,
            model_config.K_cap, sampler_config.birth_cap_per_row,
            True,
        )
        if t > burn and (t - burn) % thin == 0:
            snap = packed.unpack(hierarchical=hier)
            snap.validate(model_config.K_cap)
            ll = log_likelihood(snap, obs)
            if not np.isfinite(ll):
                raise RuntimeError(
                    f"non-finite log likelihood at iteration {t} "
                    f"(K={snap.K}); state dump: zeta={snap.zeta!r}, "
                    f"eta_neg={snap.eta_neg!r}, eta_pos={snap.eta_pos!r}")
            chain.snapshots.append(snap)
            chain.logliks.append(ll)
            chain.Ks.append(snap.K)
            chain.iters.append(t)
    chain.overflow_count = int(packed.kact[1])
    return chain


# ---------------------------------------------------------------------------
# Single-operation wrappers. Each reseeds the compiled RNG when a seed is
# given, applies one kernel and returns a fresh state.

def _packed_for(state, obs, K_cap, seed):
    packed = _Packed(state, obs, K_cap)
    if seed is not None:
        _sweep.seed_rng(int(seed))
    return packed


def gibbs_update_A_row(state: AllocationState, obs: ObservationSet, i: int,
                       seed: int | None = None, *, m: float = 1.0,
                       K_cap: int = 50) -> AllocationState:
    packed = _packed_for(state, obs, K_cap, seed)
    _sweep.update_A_row(packed.Z, packed.Y, packed.A, packed.B, packed.C,
                        packed.W, packed.Wn, packed.Wp,
                        packed.SZ, packed.SN, packed.SP,
                        packed.fixedA, packed.fixedB, packed.fixedC,
                        packed.kact, packed.K0, i, m, True)
    return packed.unpack(hierarchical=state.rho_j is not None)


def propose_new_diseases(state: AllocationState, obs: ObservationSet, i: int,
                         seed: int | None = None, *, m: float = 1.0,
                         weight_rate: float = 0.1, K_cap: int = 50,
                         birth_cap: int = 0) -> AllocationState:
    packed = _packed_for(state, obs, K_cap, seed)
    use_hier = state.rho_j is not None
    _sweep.propose_births(packed.Z, packed.Y, packed.A, packed.B, packed.C,
                          packed.W, packed.Wn, packed.Wp,
                          packed.SZ, packed.SN, packed.SP,
                          packed.kact, i, m, float(packed.rho_box[0]),
                          packed.rho_vec, use_hier, packed.pi, weight_rate,
                          K_cap, birth_cap)
    return packed.unpack(hierarchical=use_hier)


def gibbs_update_B_entry(state: AllocationState, obs: ObservationSet, j: int,
                         k: int, seed: int | None = None, *,
                         K_cap: int = 50) -> AllocationState:
    packed = _packed_for(state, obs, K_cap, seed)
    rho_j = state.rho_j[j] if state.rho_j is not None else state.rho
    _sweep.update_B_entry(packed.Z, packed.A, packed.B, packed.W, packed.SZ,
                          packed.fixedB, j, k, rho_j)
    return packed.unpack(hierarchical=state.rho_j is not None)


def gibbs_update_C_entry(state: AllocationState, obs: ObservationSet, l: int,
                         k: int, seed: int | None = None, *,
                         K_cap: int = 50) -> AllocationState:
    packed = _packed_for(state, obs, K_cap, seed)
    _sweep.update_C_entry(packed.Y, packed.A, packed.C, packed.Wn, packed.Wp,
                          packed.SN, packed.SP, packed.fixedC, l, k, packed.pi)
    return packed.unpack(hierarchical=state.rho_j is not None)


def mh_update_weight(state: AllocationState, obs: ObservationSet,
                     which: tuple[str, int, int], seed: int | None = None, *,
                     weight_rate: float = 0.1, step: float = 0.5,
                     K_cap: int = 50) -> AllocationState:
    kind, idx, k = which
    packed = _packed_for(state, obs, K_cap, seed)
    if kind == "w":
        _sweep.update_W_entry(packed.Z, packed.A, packed.B, packed.W,
                              packed.SZ, idx, k, weight_rate, step)
    elif kind == "wneg":
        _sweep.update_Wneg_entry(packed.Y, packed.A, packed.C, packed.Wn,
                                 packed.SN, packed.SP, idx, k, weight_rate, step)
    elif kind == "wpos":
        _sweep.update_Wpos_entry(packed.Y, packed.A, packed.C, packed.Wp,
                                 packed.SN, packed.SP, idx, k, weight_rate, step)
    else:
        raise ValueError(f"unknown weight coordinate kind {kind!r}")
    return packed.unpack(hierarchical=state.rho_j is not None)


def mh_update_offset(state: AllocationState, obs: ObservationSet,
                     which: tuple[str, int], seed: int | None = None, *,
                     tau: float = 100.0, step: float = 0.5,
                     K_cap: int = 50) -> AllocationState:
    kind, idx = which
    packed = _packed_for(state, obs, K_cap, seed)
    if kind == "zeta":
        _sweep.update_zeta(packed.Z, packed.SZ, packed.zeta, idx, tau, step)
    elif kind == "eta_neg":
        _sweep.update_eta_neg(packed.Y, packed.SN, packed.SP, packed.etan,
                              idx, tau, step)
    elif kind == "eta_pos":
        _sweep.update_eta_pos(packed.Y, packed.SN, packed.SP, packed.etap,
                              idx, tau, step)
    else:
        raise ValueError(f"unknown offset coordinate kind {kind!r}")
    return packed.unpack(hierarchical=state.rho_j is not None)


def update_rho(state: AllocationState, seed: int | None = None, *,
               a_rho: float = 1.0, b_rho: float = 1.0) -> AllocationState:
    if seed is not None:
        _sweep.seed_rng(int(seed))
    out = state.copy()
    out.rho = float(_sweep.draw_rho(
        np.ascontiguousarray(state.B), np.ascontiguousarray(state.fixed_B),
        state.K, a_rho, b_rho))
    return out


def update_pi(state: AllocationState, seed: int | None = None, *,
              phi: tuple[float, float, float] = (1.0, 1.0, 1.0)) -> AllocationState:
    if seed is not None:
        _sweep.seed_rng(int(seed))
    out = state.copy()
    pi_out = np.empty(3, dtype=np.float64)
    _sweep.draw_pi(np.ascontiguousarray(state.C),
                   np.ascontiguousarray(state.fixed_C), state.K,
                   np.asarray(phi, dtype=np.float64), pi_out)
    out.pi = pi_out
    return out


def update_hierarchical_rho(state: AllocationState, seed: int | None = None, *,
                            a_sigma: float = 1.0, b_sigma: float = 1.0,
                            step: float = 0.5) -> AllocationState:
    """No-op when the state does not carry per-symptom inclusion probabilities."""
    if state.rho_j is None:
        return state.copy()
    if seed is not None:
        _sweep.seed_rng(int(seed))
    from scipy.stats import norm

    out = state.copy()
    lam_vec = norm.ppf(np.clip(out.rho_j, 1e-15, 1 - 1e-15))
    rho_vec = out.rho_j.copy()
    lam_box = np.array([out.lam])
    sig2_box = np.array([out.sigma2])
    _sweep.update_hier_rho(np.ascontiguousarray(out.B),
                           np.ascontiguousarray(out.fixed_B), out.K,
                           lam_vec, rho_vec, lam_box, sig2_box,
                           a_sigma, b_sigma, step)
    out.rho_j = rho_vec
    out.lam = float(lam_box[0])
    out.sigma2 = float(sig2_box[0])
    out.rho = float(np.mean(rho_vec))
    return out

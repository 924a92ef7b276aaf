"""Domain types: observations, latent allocation state, configuration, prior knowledge."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_K_CAP = 50


def _as_int8_matrix(x, allowed, name):
    arr = np.asarray(x, dtype=np.int8)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d matrix, got shape {arr.shape}")
    if arr.size and not np.isin(arr, allowed).all():
        raise ValueError(f"{name} entries must be in {sorted(allowed)}")
    return arr


@dataclass
class ObservationSet:
    """Binary (Z) and ternary (Y) patient-symptom matrices.

    Z is n x p with entries in {0,1}; Y is n x q with entries in {-1,0,+1}.
    symptom_names lists the p binary names followed by the q ternary names.
    """

    Z: np.ndarray
    Y: np.ndarray
    symptom_names: list[str] | None = None
    patient_ids: list[str] | None = None

    def __post_init__(self):
        self.Z = _as_int8_matrix(self.Z, [0, 1], "Z")
        self.Y = _as_int8_matrix(self.Y, [-1, 0, 1], "Y")
        if self.Z.shape[0] != self.Y.shape[0]:
            raise ValueError("Z and Y must have the same number of rows")
        if self.n < 1:
            raise ValueError("need at least one patient")
        # p = q = 0 is allowed: a no-data chain samples from the prior
        if self.symptom_names is None:
            self.symptom_names = [f"z{j+1}" for j in range(self.p)] + [
                f"y{l+1}" for l in range(self.q)
            ]
        if len(self.symptom_names) != self.p + self.q:
            raise ValueError("symptom_names must have p+q entries")
        if self.patient_ids is None:
            self.patient_ids = [f"patient-{i+1}" for i in range(self.n)]
        if len(self.patient_ids) != self.n:
            raise ValueError("patient_ids must have n entries")

    @property
    def n(self) -> int:
        return self.Z.shape[0]

    @property
    def p(self) -> int:
        return self.Z.shape[1]

    @property
    def q(self) -> int:
        return self.Y.shape[1]


@dataclass
class ModelConfig:
    """Hyperparameters of the allocation model.

    Weight priors are Gamma(1, rate) i.e. exponential; ``tau_w`` is the prior
    standard deviation, so the rate is 1/tau_w (variance tau_w**2).
    """

    m: float = 1.0
    tau: float = 100.0
    tau_w: float = 10.0
    a_rho: float = 1.0
    b_rho: float = 1.0
    phi: tuple[float, float, float] = (1.0, 1.0, 1.0)
    K_cap: int = DEFAULT_K_CAP
    hierarchical_rho: bool = False
    a_sigma: float = 1.0
    b_sigma: float = 1.0

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("m must be positive")
        if self.tau <= 0 or self.tau_w <= 0:
            raise ValueError("tau and tau_w must be positive")
        if self.a_rho <= 0 or self.b_rho <= 0:
            raise ValueError("a_rho and b_rho must be positive")
        if len(self.phi) != 3 or any(f <= 0 for f in self.phi):
            raise ValueError("phi must be three positive values")
        if self.K_cap < 1:
            raise ValueError("K_cap must be at least 1")
        if self.a_sigma <= 0 or self.b_sigma <= 0:
            raise ValueError("a_sigma and b_sigma must be positive")

    @property
    def weight_rate(self) -> float:
        return 1.0 / self.tau_w


@dataclass
class PriorKnowledge:
    """Pinned leading columns of A/B/C encoding known diseases.

    ``pinned_A`` holds one column per known disease or None when only the
    symptom side of a disease is known (its A column then stays free).
    ``pinned_B`` / ``pinned_C`` give, per disease, an explicit full column or
    None, with optional per-entry masks for partially pinned columns.
    """

    K0: int = 0
    pinned_A: list[np.ndarray | None] = field(default_factory=list)
    pinned_B: list[np.ndarray | None] = field(default_factory=list)
    pinned_C: list[np.ndarray | None] = field(default_factory=list)
    pinned_B_mask: list[np.ndarray | None] = field(default_factory=list)
    pinned_C_mask: list[np.ndarray | None] = field(default_factory=list)
    disease_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        for attr in ("pinned_A", "pinned_B", "pinned_C",
                     "pinned_B_mask", "pinned_C_mask"):
            lst = getattr(self, attr)
            if not lst:
                setattr(self, attr, [None] * self.K0)
            elif len(lst) != self.K0:
                raise ValueError(f"{attr} must have K0 entries")
        if not self.disease_names:
            self.disease_names = [f"known-{k+1}" for k in range(self.K0)]
        if len(self.disease_names) != self.K0:
            raise ValueError("disease_names must have K0 entries")
        if len(set(self.disease_names)) != self.K0:
            raise ValueError("duplicate disease name")


@dataclass
class AllocationState:
    """Full latent state: allocation matrices, weights, offsets, hyperparameters.

    Matrices carry exactly K columns; the first K0 columns are the pinned
    diseases. ``fixed_A`` flags columns of A held at prior knowledge;
    ``fixed_B``/``fixed_C`` flag individual pinned entries.
    """

    A: np.ndarray  # n x K, {0,1}
    B: np.ndarray  # p x K, {0,1}
    C: np.ndarray  # q x K, {-1,0,1}
    W: np.ndarray  # p x K, > 0
    Wneg: np.ndarray  # q x K, > 0
    Wpos: np.ndarray  # q x K, > 0
    zeta: np.ndarray  # p
    eta_neg: np.ndarray  # q
    eta_pos: np.ndarray  # q
    rho: float
    pi: np.ndarray  # 3 probabilities for C entries (-1, 0, +1)
    K0: int = 0
    fixed_A: np.ndarray | None = None  # K bools
    fixed_B: np.ndarray | None = None  # p x K bools
    fixed_C: np.ndarray | None = None  # q x K bools
    # hierarchical-inclusion variant: per-symptom rho_j = Phi(lam_j)
    rho_j: np.ndarray | None = None  # p
    lam: float = 0.0
    sigma2: float = 1.0

    def __post_init__(self):
        self.A = _as_int8_matrix(self.A, [0, 1], "A")
        self.B = _as_int8_matrix(self.B, [0, 1], "B")
        self.C = _as_int8_matrix(self.C, [-1, 0, 1], "C")
        for name in ("W", "Wneg", "Wpos", "zeta", "eta_neg", "eta_pos", "pi"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        K = self.K
        if self.fixed_A is None:
            self.fixed_A = np.zeros(K, dtype=bool)
        if self.fixed_B is None:
            self.fixed_B = np.zeros(self.B.shape, dtype=bool)
        if self.fixed_C is None:
            self.fixed_C = np.zeros(self.C.shape, dtype=bool)
        self.fixed_A = np.asarray(self.fixed_A, dtype=bool)
        self.fixed_B = np.asarray(self.fixed_B, dtype=bool)
        self.fixed_C = np.asarray(self.fixed_C, dtype=bool)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.B.shape[0]

    @property
    def q(self) -> int:
        return self.C.shape[0]

    @property
    def K(self) -> int:
        return self.A.shape[1]

    def validate(self, K_cap: int = DEFAULT_K_CAP) -> None:
        """Check the structural invariants; raise ValueError on violation."""
        K = self.K
        for mat, name in ((self.B, "B"), (self.C, "C"), (self.W, "W"),
                          (self.Wneg, "Wneg"), (self.Wpos, "Wpos"),
                          (self.fixed_B, "fixed_B"), (self.fixed_C, "fixed_C")):
            if mat.shape[1] != K:
                raise ValueError(f"{name} has {mat.shape[1]} columns, expected {K}")
        if K > K_cap:
            raise ValueError(f"K={K} exceeds K_cap={K_cap}")
        if self.K0 > K:
            raise ValueError("K0 exceeds K")
        col_sums = self.A.sum(axis=0)
        free = ~self.fixed_A
        free[: self.K0] = False  # leading known-disease columns may be empty
        if K and (col_sums[free[:K]] == 0).any():
            raise ValueError("unpinned column of A is all-zero")
        if (self.W <= 0).any() or (self.Wneg <= 0).any() or (self.Wpos <= 0).any():
            raise ValueError("weights must be strictly positive")
        if not (0.0 < self.rho < 1.0):
            raise ValueError("rho must lie in (0,1)")
        if (self.pi < 0).any() or abs(self.pi.sum() - 1.0) > 1e-12:
            raise ValueError("pi must be a probability vector")

    def copy(self) -> "AllocationState":
        return AllocationState(
            A=self.A.copy(), B=self.B.copy(), C=self.C.copy(),
            W=self.W.copy(), Wneg=self.Wneg.copy(), Wpos=self.Wpos.copy(),
            zeta=self.zeta.copy(), eta_neg=self.eta_neg.copy(),
            eta_pos=self.eta_pos.copy(), rho=self.rho, pi=self.pi.copy(),
            K0=self.K0, fixed_A=self.fixed_A.copy(),
            fixed_B=self.fixed_B.copy(), fixed_C=self.fixed_C.copy(),
            rho_j=None if self.rho_j is None else self.rho_j.copy(),
            lam=self.lam, sigma2=self.sigma2,
        )

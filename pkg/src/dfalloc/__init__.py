"""Bayesian double feature allocation for latent disease discovery."""

from .data_io import (
    ReferenceRange,
    SchemaError,
    discretize,
    load_prior_knowledge,
    load_ranges,
    read_chain,
    read_summary,
    write_chain,
    write_summary,
)
from .kernels import (
    binary_symptom_prob,
    ibp_conditional,
    log_likelihood,
    log_prior_A,
    row_log_likelihood,
    ternary_symptom_probs,
)
from .model import (
    AllocationState,
    ModelConfig,
    ObservationSet,
    PriorKnowledge,
)
from .sampler import Chain, SamplerConfig, initial_state, run_mcmc
from .simulate import (
    SimulationResult,
    simulate_ehr_like,
    simulate_scenario1,
    simulate_scenario2,
    write_simulation,
)
from .summarize import (
    FittedSummary,
    best_subset_match,
    build_summary,
    error_rate_B,
    error_rate_C,
    evaluate_against_truth,
    export_cmf,
    export_network,
    least_squares_A,
    map_K,
    misallocation_rate,
    perm_hamming_distance,
)

__version__ = "0.1.0"

__all__ = [
    "AllocationState", "Chain", "FittedSummary", "ModelConfig",
    "ObservationSet", "PriorKnowledge", "ReferenceRange", "SamplerConfig",
    "SchemaError", "SimulationResult",
    "best_subset_match", "binary_symptom_prob", "build_summary",
    "discretize", "error_rate_B", "error_rate_C", "evaluate_against_truth",
    "export_cmf", "export_network", "ibp_conditional", "initial_state",
    "least_squares_A", "load_prior_knowledge", "load_ranges",
    "log_likelihood", "log_prior_A", "map_K", "misallocation_rate",
    "perm_hamming_distance", "read_chain", "read_summary",
    "row_log_likelihood", "run_mcmc", "simulate_ehr_like",
    "simulate_scenario1", "simulate_scenario2", "ternary_symptom_probs",
    "write_chain", "write_simulation", "write_summary",
]

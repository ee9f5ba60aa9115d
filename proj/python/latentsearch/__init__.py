"""Latent-space (1+1)-ES with mixed mutation rates."""

from ._core import (
    INF,
    ConfigError,
    Error,
    EvaluationError,
    InvariantViolation,
    LatentDistribution,
    RandomStream,
    RunTrace,
    StepRecord,
    TransportError,
    __version__,
    clip,
    derive_seed,
    drift_bound,
    equivalence_check_random_search,
    evolve,
    hamming_drift,
    mutate,
    random_pairing_diversity,
    run_campaign,
    sample_mutation_rate,
)

__all__ = [
    "INF",
    "ConfigError",
    "Error",
    "EvaluationError",
    "InvariantViolation",
    "LatentDistribution",
    "RandomStream",
    "RunTrace",
    "StepRecord",
    "TransportError",
    "__version__",
    "clip",
    "derive_seed",
    "drift_bound",
    "equivalence_check_random_search",
    "evolve",
    "hamming_drift",
    "mutate",
    "random_pairing_diversity",
    "run_campaign",
    "sample_mutation_rate",
]

"""Exact and Monte Carlo analysis of hitting times of finite Markov chains."""

try:
    from ._mchit import (  # noqa: F401
        ConfigError,
        InsufficientGrid,
        MarkovChain,
        ParamOutOfRange,
        SmallnessViolated,
        SolverFailure,
        basin,
        build_birth_death,
        build_preset,
        dkw_band,
        green_diagonal,
        hitting_stats,
        lemma_suite,
        mean_hitting_time,
        metastable_set,
        minimal_R,
        rho_A,
        rho_B,
        sample_hitting_times,
        survival_curve,
        taboo_probability,
        theorem_t3_inequality_suite,
        validate,
        verify_exponential_law,
    )
except ImportError:  # in-tree test layout keeps the module top-level
    from _mchit import *  # noqa: F401,F403

__all__ = [
    "ConfigError",
    "InsufficientGrid",
    "MarkovChain",
    "ParamOutOfRange",
    "SmallnessViolated",
    "SolverFailure",
    "basin",
    "build_birth_death",
    "build_preset",
    "dkw_band",
    "green_diagonal",
    "hitting_stats",
    "lemma_suite",
    "mean_hitting_time",
    "metastable_set",
    "minimal_R",
    "rho_A",
    "rho_B",
    "sample_hitting_times",
    "survival_curve",
    "taboo_probability",
    "theorem_t3_inequality_suite",
    "validate",
    "verify_exponential_law",
]

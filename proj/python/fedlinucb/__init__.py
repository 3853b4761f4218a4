"""Asynchronous federated linear bandit simulation."""

from ._fedlinucb import (
    BiasDemoResult,
    CheckResult,
    HyperParams,
    ProblemInstance,
    Schedule,
    SimulationTrace,
    bias_demo,
    compute_beta,
    elliptical_potential_sum,
    epoch_comm_counts,
    gen_instance,
    gen_schedule,
    run_episodic,
    run_fedlinucb,
    run_independent_oful,
    run_invariant_suite,
    theoretical_comm_bound,
    theoretical_regret_bound,
)

__all__ = [
    "BiasDemoResult",
    "CheckResult",
    "HyperParams",
    "ProblemInstance",
    "Schedule",
    "SimulationTrace",
    "bias_demo",
    "compute_beta",
    "elliptical_potential_sum",
    "epoch_comm_counts",
    "gen_instance",
    "gen_schedule",
    "run_episodic",
    "run_fedlinucb",
    "run_independent_oful",
    "run_invariant_suite",
    "theoretical_comm_bound",
    "theoretical_regret_bound",
]

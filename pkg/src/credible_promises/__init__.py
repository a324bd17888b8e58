"""Maximal credible campaign promises in repeated elections with reputations."""

from .dynamics import (
    DeviationPolicy,
    Trajectory,
    deviation_profitability,
    empirical_discounted_value,
    simulate_history,
    tail_bound,
)
from .equilibrium import (
    EquilibriumPoint,
    Variant,
    cost_of_reneging,
    d_star_closed,
    d_star_numeric,
    d_star_sensitivity,
    incentive_gap,
    threshold_delta,
)
from .payoffs import Method, Pair, PayoffValue, Source, delta_v, v_closed, v_monte_carlo, v_quadrature
from .stage_game import (
    IdealPoint,
    PromiseMode,
    Reputation,
    Side,
    StageOutcome,
    Status,
    VoterRegime,
    max_credible_promise,
    play_stage,
    utility,
)
from .sweep import SweepSpec, emit_figures, run_sweep
from .verify import CheckStatus, Tolerances, VerificationReport, verify_consistency

__all__ = [
    "CheckStatus", "DeviationPolicy", "EquilibriumPoint", "IdealPoint", "Method", "Pair", "PayoffValue",
    "PromiseMode", "Reputation", "Side", "Source", "StageOutcome", "Status", "SweepSpec", "Tolerances",
    "Trajectory", "Variant", "VerificationReport", "VoterRegime", "cost_of_reneging", "d_star_closed",
    "d_star_numeric", "d_star_sensitivity", "delta_v", "deviation_profitability", "emit_figures",
    "empirical_discounted_value", "incentive_gap", "max_credible_promise", "play_stage", "run_sweep",
    "simulate_history", "tail_bound", "threshold_delta", "utility", "v_closed", "v_monte_carlo",
    "v_quadrature", "verify_consistency",
]

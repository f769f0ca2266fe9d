"""Average Age of Information under multi-threshold preemption policies."""
from .analysis import (
    AoiReport,
    average_aoi,
    cycle_offsets,
    moments_tau,
    moments_tau_truncated,
    reset_matrix,
    tail_tau,
)
from .delay import DelayModel, build_from_tail, build_geometric, build_weibull, hazard_profile
from .optimize import check_always_preempt, check_deterministic_dominance, grid_optimize
from .policy import (
    UNBOUNDED,
    EvaluationScenario,
    PreemptionPolicy,
    make_named_policy,
    make_policy,
    region_index,
)
from .simulate import confidence_interval, simulate

__all__ = [
    "AoiReport", "DelayModel", "EvaluationScenario", "PreemptionPolicy", "UNBOUNDED",
    "average_aoi", "build_from_tail", "build_geometric", "build_weibull",
    "check_always_preempt", "check_deterministic_dominance", "confidence_interval",
    "cycle_offsets", "grid_optimize", "hazard_profile", "make_named_policy", "make_policy",
    "moments_tau", "moments_tau_truncated", "region_index", "reset_matrix", "simulate",
    "tail_tau",
]

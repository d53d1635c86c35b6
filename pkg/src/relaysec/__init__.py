"""Secrecy-throughput simulation and analysis for buffer-aided two-hop relay networks."""

__version__ = "0.1.0"

from .channel import ChannelParams, RandomSeed, SlotRealization, make_rng, sample_slot
from .power import ConstraintForm, PowerAllocation, PowerBudget, db_to_linear, linear_to_db
from .selection import (
    Branch,
    RatioSet,
    Scheme,
    SelectionDecision,
    compute_ratio_set,
    hop_secrecy_rates,
    select_ifd_mrrs,
    select_max_link_ratio,
    select_max_min_ratio,
)
from .montecarlo import (
    EmpiricalCdf,
    RatioStatistics,
    ThroughputEstimate,
    empirical_cdf,
    ratio_statistics,
    simulate,
)
from .analytic import (
    AnalyticBreakdown,
    CollisionSplit,
    eval_hop1_order_avg,
    eval_hop2_order_avg,
    eval_p12,
    eval_p12_breakdown,
    eval_p21,
    eval_throughput,
    ratio_cdf,
    ratio_pdf_hop1_second,
)
from .specialmath import (
    QuadratureResult,
    exp_integral_e1,
    exp_integral_e1_scaled,
    integrate_semi_infinite,
    order_stat_cdf,
)
from .optimizer import OptimizationResult, budget_for_scheme, optimize

__all__ = [
    "AnalyticBreakdown",
    "Branch",
    "ChannelParams",
    "CollisionSplit",
    "ConstraintForm",
    "EmpiricalCdf",
    "OptimizationResult",
    "PowerAllocation",
    "PowerBudget",
    "QuadratureResult",
    "RandomSeed",
    "RatioSet",
    "RatioStatistics",
    "Scheme",
    "SelectionDecision",
    "SlotRealization",
    "ThroughputEstimate",
    "budget_for_scheme",
    "compute_ratio_set",
    "db_to_linear",
    "empirical_cdf",
    "eval_hop1_order_avg",
    "eval_hop2_order_avg",
    "eval_p12",
    "eval_p12_breakdown",
    "eval_p21",
    "eval_throughput",
    "exp_integral_e1",
    "exp_integral_e1_scaled",
    "hop_secrecy_rates",
    "integrate_semi_infinite",
    "linear_to_db",
    "make_rng",
    "optimize",
    "order_stat_cdf",
    "ratio_cdf",
    "ratio_pdf_hop1_second",
    "ratio_statistics",
    "sample_slot",
    "select_ifd_mrrs",
    "select_max_link_ratio",
    "select_max_min_ratio",
    "simulate",
]

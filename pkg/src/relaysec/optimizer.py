"""Power-split search: maximize scheme throughput on the total-power boundary.

More power never hurts any of the rate formulas, so the search lives on the
budget boundary and reduces to one dimension, the source-to-relay power
ratio. A coarse log-spaced grid finds the peak region; golden-section then
refines it only when the grid brackets an interior peak, since unimodality is
expected but not guaranteed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .analytic import eval_throughput
from .channel import ChannelParams, RandomSeed
from .montecarlo import simulate
from .power import ConstraintForm, PowerAllocation, PowerBudget
from .selection import Scheme

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

EVALUATORS = ("analytic", "mc")


@dataclass(frozen=True)
class OptimizationResult:
    best_alloc: PowerAllocation
    best_ratio: float
    c_max: float
    evaluations: int
    curve: list
    refined: bool


def budget_for_scheme(scheme: Scheme | str, snr_linear: float) -> PowerBudget:
    """Each scheme's budget form: two-slot schemes spread it over two slots."""
    scheme = Scheme(scheme)
    form = (
        ConstraintForm.TWO_SLOT
        if scheme is Scheme.MAX_MIN_RATIO
        else ConstraintForm.FULL_SLOT
    )
    return PowerBudget(snr_total=snr_linear, constraint_form=form)


def _make_evaluator(
    scheme: Scheme,
    params: ChannelParams,
    evaluator: str,
    slots: Optional[int],
    seed: Optional[RandomSeed],
) -> Callable[[PowerAllocation], float]:
    if evaluator == "analytic":
        if scheme is not Scheme.IFD_MRRS:
            raise ValueError("the analytic evaluator only covers the ifd-mrrs scheme")
        return lambda alloc: eval_throughput(params, alloc).throughput
    if evaluator == "mc":
        if slots is None or seed is None:
            raise ValueError("the mc evaluator needs slots and seed")
        # the same seed at every allocation: common random numbers keep the
        # curve a deterministic function of the seed
        return lambda alloc: simulate(scheme, params, alloc, slots, seed).throughput
    raise ValueError(f"evaluator must be one of {EVALUATORS}, got {evaluator!r}")


def search_best_ratio(
    value_at: Callable[[float], float],
    grid_points: int = 64,
    ratio_min: float = 1.0 / 64.0,
    ratio_max: float = 64.0,
    refine: bool = True,
    refine_iters: int = 32,
):
    """Grid-then-golden search of a ratio curve.

    Returns (best_ratio, best_value, evaluations, curve, refined); refined is
    False when the coarse grid fails to bracket an interior peak (edge or flat
    maximum), in which case the grid maximum stands.
    """
    if grid_points < 3:
        raise ValueError("grid needs at least three points")
    ratios = np.geomspace(ratio_min, ratio_max, grid_points)
    values = [value_at(float(r)) for r in ratios]
    evaluations = len(values)
    curve = [(float(r), v) for r, v in zip(ratios, values)]

    i = int(np.argmax(values))
    best_ratio = float(ratios[i])
    best_value = values[i]

    interior = 0 < i < grid_points - 1
    bracketed = interior and values[i - 1] < best_value and values[i + 1] < best_value
    refined = False
    if refine and bracketed:
        refined = True
        lo = math.log(ratios[i - 1])
        hi = math.log(ratios[i + 1])
        x1 = hi - _GOLDEN * (hi - lo)
        x2 = lo + _GOLDEN * (hi - lo)
        f1 = value_at(math.exp(x1))
        f2 = value_at(math.exp(x2))
        evaluations += 2
        for _ in range(refine_iters):
            if f1 >= f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - _GOLDEN * (hi - lo)
                f1 = value_at(math.exp(x1))
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + _GOLDEN * (hi - lo)
                f2 = value_at(math.exp(x2))
            evaluations += 1
        for x, f in ((x1, f1), (x2, f2)):
            if f > best_value:
                best_value = f
                best_ratio = math.exp(x)

    return best_ratio, best_value, evaluations, curve, refined


def optimize(
    scheme: Scheme | str,
    params: ChannelParams,
    budget: PowerBudget,
    evaluator: str = "analytic",
    *,
    slots: Optional[int] = None,
    seed: Optional[RandomSeed] = None,
    grid_points: int = 64,
    ratio_min: float = 1.0 / 64.0,
    ratio_max: float = 64.0,
    refine: bool = True,
    refine_iters: int = 32,
) -> OptimizationResult:
    """Search the budget boundary for the best source/relay power split."""
    scheme = Scheme(scheme)
    fn = _make_evaluator(scheme, params, evaluator, slots, seed)
    k = params.num_relays

    def value_at(ratio: float) -> float:
        return fn(budget.allocation_for_ratio(ratio, k))

    best_ratio, best_value, evaluations, curve, refined = search_best_ratio(
        value_at,
        grid_points=grid_points,
        ratio_min=ratio_min,
        ratio_max=ratio_max,
        refine=refine,
        refine_iters=refine_iters,
    )
    return OptimizationResult(
        best_alloc=budget.allocation_for_ratio(best_ratio, k),
        best_ratio=best_ratio,
        c_max=best_value,
        evaluations=evaluations,
        curve=curve,
        refined=refined,
    )

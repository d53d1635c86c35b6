"""Per-slot secrecy rates and the three relay-selection policies.

All functions here act on a single SlotRealization and are pure; the Monte
Carlo engine carries its own vectorized equivalents, which the tests replay
against these reference implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .channel import SlotRealization
from .power import PowerAllocation


class Scheme(str, Enum):
    MAX_MIN_RATIO = "max-min-ratio"
    MAX_LINK_RATIO = "max-link-ratio"
    IFD_MRRS = "ifd-mrrs"


class Branch(str, Enum):
    # ifd-mrrs
    DISTINCT = "distinct"
    COLLISION_Q_POSITIVE = "collision-q-positive"
    COLLISION_Q_NONPOSITIVE = "collision-q-nonpositive"
    # max-link-ratio
    FIRST_HOP_LINK = "first-hop-link"
    SECOND_HOP_LINK = "second-hop-link"
    # max-min-ratio
    TWO_SLOT = "two-slot"


@dataclass(frozen=True)
class SelectionDecision:
    """Which relay(s) a policy activates in one slot and why.

    ifd-mrrs sets both rx_relay and tx_relay (always distinct);
    max-link-ratio sets exactly one of them; max-min-ratio sets both to the
    same relay, which serves the two hops over two slots.
    """

    scheme: Scheme
    branch: Branch
    rx_relay: Optional[int] = None
    tx_relay: Optional[int] = None
    q_value: Optional[float] = None


@dataclass(frozen=True)
class RatioSet:
    """Legitimate-to-eavesdropper SNR ratios of one slot, with top-two ranks.

    first_hop[k] = (1 + P_S * g_sr[k]) / (1 + P_S * g_se)
    second_hop[k] = (1 + P_R * g_rd[k]) / (1 + P_R * g_re[k])
    """

    first_hop: np.ndarray
    second_hop: np.ndarray
    rx_best: int
    rx_second: int
    tx_best: int
    tx_second: int

    @property
    def rx_best_value(self) -> float:
        return float(self.first_hop[self.rx_best])

    @property
    def rx_second_value(self) -> float:
        return float(self.first_hop[self.rx_second])

    @property
    def tx_best_value(self) -> float:
        return float(self.second_hop[self.tx_best])

    @property
    def tx_second_value(self) -> float:
        return float(self.second_hop[self.tx_second])


def _top_two(values: np.ndarray) -> tuple[int, int]:
    # first occurrence of the max wins, so ties resolve to the lowest index
    best = int(np.argmax(values))
    masked = np.array(values, dtype=float)
    masked[best] = -np.inf
    second = int(np.argmax(masked))
    return best, second


def _gain_ratio(num: float, den: float) -> float:
    # den == 0 happens with probability zero but must keep a total order
    if den > 0.0:
        return num / den
    return math.inf if num > 0.0 else 1.0


def hop_secrecy_rates(slot: SlotRealization, k: int, power: PowerAllocation) -> tuple[float, float]:
    """Clipped per-hop secrecy rates of relay k: (first hop, second hop) in bits/slot."""
    ps, pr = power.source_power, power.relay_power
    c_sr = max(0.0, math.log2((1.0 + ps * slot.g_sr[k]) / (1.0 + ps * slot.g_se)))
    c_rd = max(0.0, math.log2((1.0 + pr * slot.g_rd[k]) / (1.0 + pr * slot.g_re[k])))
    return c_sr, c_rd


def compute_ratio_set(slot: SlotRealization, power: PowerAllocation) -> RatioSet:
    if slot.num_relays < 2:
        raise ValueError("ratio ranking needs at least two relays")
    ps, pr = power.source_power, power.relay_power
    first = (1.0 + ps * slot.g_sr) / (1.0 + ps * slot.g_se)
    second = (1.0 + pr * slot.g_rd) / (1.0 + pr * slot.g_re)
    rx_best, rx_second = _top_two(first)
    tx_best, tx_second = _top_two(second)
    return RatioSet(
        first_hop=first,
        second_hop=second,
        rx_best=rx_best,
        rx_second=rx_second,
        tx_best=tx_best,
        tx_second=tx_second,
    )


def select_max_min_ratio(
    slot: SlotRealization, power: PowerAllocation
) -> tuple[SelectionDecision, float]:
    """Pick the relay whose weaker hop ratio is largest; rate spans two slots.

    Returns the decision and the slot rate, including the one-half prefactor
    of the two-slot operation.
    """
    ps, pr = power.source_power, power.relay_power
    first = (1.0 + ps * slot.g_sr) / (1.0 + ps * slot.g_se)
    second = (1.0 + pr * slot.g_rd) / (1.0 + pr * slot.g_re)
    bottleneck = np.minimum(first, second)
    k = int(np.argmax(bottleneck))
    rate = max(0.0, 0.5 * math.log2(bottleneck[k]))
    decision = SelectionDecision(
        scheme=Scheme.MAX_MIN_RATIO, branch=Branch.TWO_SLOT, rx_relay=k, tx_relay=k
    )
    return decision, rate


def select_max_link_ratio(slot: SlotRealization, power: PowerAllocation) -> SelectionDecision:
    """Activate the single link with the highest gain ratio across both hops.

    The first hop competes with max_k g_sr[k] / g_se, the second with
    max_k g_rd[k] / g_re[k]; raw gain ratios, no transmit power involved.
    Ties go to the first hop, then to the lowest relay index.
    """
    k1 = int(np.argmax(slot.g_sr))
    best_first = _gain_ratio(float(slot.g_sr[k1]), slot.g_se)
    ratios2 = [_gain_ratio(float(slot.g_rd[k]), float(slot.g_re[k])) for k in range(slot.num_relays)]
    k2 = int(np.argmax(ratios2))
    if best_first >= ratios2[k2]:
        return SelectionDecision(
            scheme=Scheme.MAX_LINK_RATIO, branch=Branch.FIRST_HOP_LINK, rx_relay=k1
        )
    return SelectionDecision(
        scheme=Scheme.MAX_LINK_RATIO, branch=Branch.SECOND_HOP_LINK, tx_relay=k2
    )


def select_ifd_mrrs(slot: SlotRealization, power: PowerAllocation) -> SelectionDecision:
    """Pick distinct relays for simultaneous reception and transmission.

    The best-ranked relay of each hop wins outright when the two hops
    disagree on it. When the same relay ranks best on both hops, the
    tie-break statistic

        q = min(best rx ratio, second tx ratio) - min(second rx ratio, best tx ratio)

    keeps the better bottleneck: q > 0 keeps the best receiver with the
    second-best transmitter, otherwise the reverse. Exactly zero q (a
    measure-zero event) takes the second branch for determinism.
    """
    if slot.num_relays < 2:
        raise ValueError("this policy needs at least two relays")
    ratios = compute_ratio_set(slot, power)
    if ratios.rx_best != ratios.tx_best:
        return SelectionDecision(
            scheme=Scheme.IFD_MRRS,
            branch=Branch.DISTINCT,
            rx_relay=ratios.rx_best,
            tx_relay=ratios.tx_best,
        )
    q = min(ratios.rx_best_value, ratios.tx_second_value) - min(
        ratios.rx_second_value, ratios.tx_best_value
    )
    if q > 0.0:
        return SelectionDecision(
            scheme=Scheme.IFD_MRRS,
            branch=Branch.COLLISION_Q_POSITIVE,
            rx_relay=ratios.rx_best,
            tx_relay=ratios.tx_second,
            q_value=q,
        )
    return SelectionDecision(
        scheme=Scheme.IFD_MRRS,
        branch=Branch.COLLISION_Q_NONPOSITIVE,
        rx_relay=ratios.rx_second,
        tx_relay=ratios.tx_best,
        q_value=q,
    )

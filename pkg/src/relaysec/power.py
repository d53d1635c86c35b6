"""Transmit-power types and the per-scheme total-power budgets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class ConstraintForm(str, Enum):
    # source plus all relay power within the budget every slot
    FULL_SLOT = "full-slot"
    # two-slot schemes spend the budget over a pair of slots
    TWO_SLOT = "two-slot"


@dataclass(frozen=True)
class PowerAllocation:
    """Linear transmit powers of the source and of each relay."""

    source_power: float
    relay_power: float

    def __post_init__(self):
        if not (self.source_power > 0.0 and self.relay_power > 0.0):
            raise ValueError("transmit powers must be strictly positive")

    @property
    def ratio(self) -> float:
        return self.source_power / self.relay_power


@dataclass(frozen=True)
class PowerBudget:
    """Total-power budget `snr_total` (linear) with its constraint form.

    FULL_SLOT enforces P_source + K * P_relay <= snr_total.
    TWO_SLOT enforces (P_source + K * P_relay) / 2 <= snr_total.
    """

    snr_total: float
    constraint_form: ConstraintForm = ConstraintForm.FULL_SLOT

    def __post_init__(self):
        if not self.snr_total > 0.0:
            raise ValueError("snr_total must be strictly positive")

    @property
    def effective_total(self) -> float:
        if self.constraint_form is ConstraintForm.TWO_SLOT:
            return 2.0 * self.snr_total
        return self.snr_total

    def allocation_for_ratio(self, ratio: float, num_relays: int) -> PowerAllocation:
        """Allocation on the budget boundary with the given P_source/P_relay ratio."""
        if not ratio > 0.0:
            raise ValueError("power ratio must be strictly positive")
        relay = self.effective_total / (ratio + num_relays)
        return PowerAllocation(source_power=ratio * relay, relay_power=relay)

    def is_feasible(self, alloc: PowerAllocation, num_relays: int, tol: float = 1e-9) -> bool:
        return alloc.source_power + num_relays * alloc.relay_power <= self.effective_total + tol


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)

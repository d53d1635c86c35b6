"""Monte Carlo engine: long-run secrecy throughput and selection-event statistics.

Slots are simulated in blocks (one substream per block, reduced in block
order), so results depend only on the seed and slot count, never on how many
workers consume the blocks. The blocks double as batches for standard errors,
which keeps the error bars honest for the buffer-coupled scheme where slot
rates are serially dependent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import ChannelParams, RandomSeed, block_rng, sample_gain_block
from .power import PowerAllocation
from .selection import Branch, Scheme

N_BATCHES = 100

RATIO_QUANTITIES = ("hop1_best", "hop1_second", "hop2_best", "hop2_second")


@dataclass(frozen=True)
class ThroughputEstimate:
    """Empirical per-hop average secrecy rates and end-to-end throughput.

    branch_counts records how often each decision branch fired; for the
    dual-relay scheme p_s_hat is the fraction of slots where both hops ranked
    the same relay best, and p12_hat the fraction of those collisions resolved
    toward the best receiver (absent when no collision occurred).
    """

    scheme: Scheme
    mean_c_sr: float
    mean_c_rd: float
    throughput: float
    stderr_c_sr: float
    stderr_c_rd: float
    slots: int
    branch_counts: dict
    p_s_hat: Optional[float] = None
    p12_hat: Optional[float] = None

    @property
    def throughput_stderr(self) -> float:
        if self.mean_c_sr <= self.mean_c_rd:
            return self.stderr_c_sr
        return self.stderr_c_rd

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "mean_c_sr": self.mean_c_sr,
            "mean_c_rd": self.mean_c_rd,
            "throughput": self.throughput,
            "stderr_c_sr": self.stderr_c_sr,
            "stderr_c_rd": self.stderr_c_rd,
            "slots": self.slots,
            "branch_counts": {b.value: int(c) for b, c in self.branch_counts.items()},
            "p_s_hat": self.p_s_hat,
            "p12_hat": self.p12_hat,
        }


def block_sizes(slots: int) -> list[int]:
    """Fixed block layout for a run: at most N_BATCHES near-equal blocks."""
    if slots < 1:
        raise ValueError("slots must be >= 1")
    n_blocks = min(N_BATCHES, slots)
    base, rem = divmod(slots, n_blocks)
    return [base + 1] * rem + [base] * (n_blocks - rem)


def iter_gain_blocks(params: ChannelParams, seed: RandomSeed, slots: int):
    """Yield (start_slot, g_sr, g_rd, g_re, g_se) arrays block by block."""
    start = 0
    for b, n in enumerate(block_sizes(slots)):
        rng = block_rng(seed, b)
        g_sr, g_rd, g_re, g_se = sample_gain_block(params, rng, n)
        yield start, g_sr, g_rd, g_re, g_se
        start += n


def _batch_stderr(batch_means: np.ndarray) -> float:
    b = len(batch_means)
    if b < 2:
        return 0.0
    return float(np.std(batch_means, ddof=1) / math.sqrt(b))


def _top_two_rows(values: np.ndarray):
    n = values.shape[0]
    rows = np.arange(n)
    best = np.argmax(values, axis=1)
    best_val = values[rows, best]
    masked = values.copy()
    masked[rows, best] = -np.inf
    second = np.argmax(masked, axis=1)
    second_val = values[rows, second]
    return best, best_val, second, second_val


def _ratio_matrices(g_sr, g_rd, g_re, g_se, power: PowerAllocation):
    ps, pr = power.source_power, power.relay_power
    first = (1.0 + ps * g_sr) / (1.0 + ps * g_se)[:, None]
    second = (1.0 + pr * g_rd) / (1.0 + pr * g_re)
    return first, second


def _clipped_log2(values: np.ndarray) -> np.ndarray:
    return np.maximum(0.0, np.log2(values))


def _ifd_block(first, second):
    rows = np.arange(first.shape[0])
    r1, zr1, r2, zr2 = _top_two_rows(first)
    t1, zt1, t2, zt2 = _top_two_rows(second)
    collision = r1 == t1
    q = np.minimum(zr1, zt2) - np.minimum(zr2, zt1)
    q_pos = collision & (q > 0.0)
    q_non = collision & (q <= 0.0)
    rx = np.where(~collision, r1, np.where(q_pos, r1, r2))
    tx = np.where(~collision, t1, np.where(q_pos, t2, t1))
    c_sr = _clipped_log2(first[rows, rx])
    c_rd = _clipped_log2(second[rows, tx])
    counts = {
        Branch.DISTINCT: int(np.count_nonzero(~collision)),
        Branch.COLLISION_Q_POSITIVE: int(np.count_nonzero(q_pos)),
        Branch.COLLISION_Q_NONPOSITIVE: int(np.count_nonzero(q_non)),
    }
    return c_sr, c_rd, counts


def _max_min_block(first, second):
    bottleneck = np.max(np.minimum(first, second), axis=1)
    return 0.5 * _clipped_log2(bottleneck)


def _max_link_block(g_sr, g_rd, g_re, g_se, power: PowerAllocation):
    n = g_sr.shape[0]
    rows = np.arange(n)
    ps, pr = power.source_power, power.relay_power
    with np.errstate(divide="ignore", invalid="ignore"):
        first_ratio = g_sr.max(axis=1) / g_se
        second_ratios = g_rd / g_re
    # zero-denominator draws have probability zero; keep a total order anyway
    first_ratio = np.where(np.isnan(first_ratio), 1.0, first_ratio)
    second_ratios = np.where(np.isnan(second_ratios), 1.0, second_ratios)
    k1 = np.argmax(g_sr, axis=1)
    k2 = np.argmax(second_ratios, axis=1)
    first_wins = first_ratio >= second_ratios[rows, k2]
    c_sr = _clipped_log2((1.0 + ps * g_sr[rows, k1]) / (1.0 + ps * g_se))
    c_rd = _clipped_log2((1.0 + pr * g_rd[rows, k2]) / (1.0 + pr * g_re[rows, k2]))
    deposit = np.where(first_wins, c_sr, 0.0)
    withdraw = np.where(first_wins, 0.0, c_rd)
    return first_wins, deposit, withdraw


def _drain_buffer(deposit, withdraw, start_level: float):
    """Advance the secure-bit queue over one block; returns (end level, delivered).

    Closed form of the queue recursion buf = max(0, buf + deposit - withdraw),
    so blocks stay vectorized.
    """
    x = deposit - withdraw
    s = np.cumsum(x)
    prefix_min = min(0.0, float(np.min(s[:-1]))) if len(s) > 1 else 0.0
    end = max(0.0, start_level + float(s[-1]), float(s[-1]) - prefix_min)
    delivered = start_level + float(np.sum(deposit)) - end
    return end, delivered


def simulate(
    scheme: Scheme | str,
    params: ChannelParams,
    power: PowerAllocation,
    slots: int,
    seed: RandomSeed,
) -> ThroughputEstimate:
    """Estimate a scheme's secrecy throughput over `slots` fading slots.

    Per scheme:
      ifd-mrrs: averages the receive relay's first-hop rate and the transmit
        relay's second-hop rate each slot; throughput is the smaller average
        (infinite relay buffers keep both hops active every slot).
      max-min-ratio: averages the selected relay's two-slot rate; throughput
        is that average.
      max-link-ratio: only one link is active per slot, so delivery is
        accounted through an explicit secure-bit queue; first-hop slots
        deposit bits, second-hop slots withdraw what the queue holds, and
        throughput is the withdrawn total per slot.
    """
    scheme = Scheme(scheme)
    if slots < 1:
        raise ValueError("slots must be >= 1")
    if scheme is Scheme.IFD_MRRS and params.num_relays < 2:
        raise ValueError("ifd-mrrs needs at least two relays")

    if scheme is Scheme.IFD_MRRS:
        return _simulate_ifd(params, power, slots, seed)
    if scheme is Scheme.MAX_MIN_RATIO:
        return _simulate_max_min(params, power, slots, seed)
    return _simulate_max_link(params, power, slots, seed)


def _simulate_ifd(params, power, slots, seed) -> ThroughputEstimate:
    sum_sr = 0.0
    sum_rd = 0.0
    means_sr = []
    means_rd = []
    counts = {
        Branch.DISTINCT: 0,
        Branch.COLLISION_Q_POSITIVE: 0,
        Branch.COLLISION_Q_NONPOSITIVE: 0,
    }
    for _, g_sr, g_rd, g_re, g_se in iter_gain_blocks(params, seed, slots):
        first, second = _ratio_matrices(g_sr, g_rd, g_re, g_se, power)
        c_sr, c_rd, block_counts = _ifd_block(first, second)
        sum_sr += float(np.sum(c_sr))
        sum_rd += float(np.sum(c_rd))
        means_sr.append(float(np.mean(c_sr)))
        means_rd.append(float(np.mean(c_rd)))
        for branch, c in block_counts.items():
            counts[branch] += c
    mean_sr = sum_sr / slots
    mean_rd = sum_rd / slots
    n_collisions = counts[Branch.COLLISION_Q_POSITIVE] + counts[Branch.COLLISION_Q_NONPOSITIVE]
    p12_hat = counts[Branch.COLLISION_Q_POSITIVE] / n_collisions if n_collisions > 0 else None
    return ThroughputEstimate(
        scheme=Scheme.IFD_MRRS,
        mean_c_sr=mean_sr,
        mean_c_rd=mean_rd,
        throughput=min(mean_sr, mean_rd),
        stderr_c_sr=_batch_stderr(np.array(means_sr)),
        stderr_c_rd=_batch_stderr(np.array(means_rd)),
        slots=slots,
        branch_counts=counts,
        p_s_hat=n_collisions / slots,
        p12_hat=p12_hat,
    )


def _simulate_max_min(params, power, slots, seed) -> ThroughputEstimate:
    total = 0.0
    means = []
    for _, g_sr, g_rd, g_re, g_se in iter_gain_blocks(params, seed, slots):
        first, second = _ratio_matrices(g_sr, g_rd, g_re, g_se, power)
        rates = _max_min_block(first, second)
        total += float(np.sum(rates))
        means.append(float(np.mean(rates)))
    mean_rate = total / slots
    stderr = _batch_stderr(np.array(means))
    # the chosen relay carries each packet over both hops, so the delivered
    # per-hop rates coincide with the scheme rate
    return ThroughputEstimate(
        scheme=Scheme.MAX_MIN_RATIO,
        mean_c_sr=mean_rate,
        mean_c_rd=mean_rate,
        throughput=mean_rate,
        stderr_c_sr=stderr,
        stderr_c_rd=stderr,
        slots=slots,
        branch_counts={Branch.TWO_SLOT: slots},
    )


def _simulate_max_link(params, power, slots, seed) -> ThroughputEstimate:
    deposit_total = 0.0
    delivered_total = 0.0
    deposit_means = []
    delivered_means = []
    counts = {Branch.FIRST_HOP_LINK: 0, Branch.SECOND_HOP_LINK: 0}
    level = 0.0
    for _, g_sr, g_rd, g_re, g_se in iter_gain_blocks(params, seed, slots):
        first_wins, deposit, withdraw = _max_link_block(g_sr, g_rd, g_re, g_se, power)
        level, delivered = _drain_buffer(deposit, withdraw, level)
        n = len(deposit)
        deposit_total += float(np.sum(deposit))
        delivered_total += delivered
        deposit_means.append(float(np.sum(deposit)) / n)
        delivered_means.append(delivered / n)
        counts[Branch.FIRST_HOP_LINK] += int(np.count_nonzero(first_wins))
        counts[Branch.SECOND_HOP_LINK] += int(np.count_nonzero(~first_wins))
    return ThroughputEstimate(
        scheme=Scheme.MAX_LINK_RATIO,
        mean_c_sr=deposit_total / slots,
        mean_c_rd=delivered_total / slots,
        throughput=delivered_total / slots,
        stderr_c_sr=_batch_stderr(np.array(deposit_means)),
        stderr_c_rd=_batch_stderr(np.array(delivered_means)),
        slots=slots,
        branch_counts=counts,
    )


def _ranked_ratio_block(g_sr, g_rd, g_re, g_se, power: PowerAllocation):
    """Per-slot values of the four ranked ratio statistics, as an (n, 4) array."""
    first, second = _ratio_matrices(g_sr, g_rd, g_re, g_se, power)
    _, zr1, _, zr2 = _top_two_rows(first)
    _, zt1, _, zt2 = _top_two_rows(second)
    return np.column_stack([zr1, zr2, zt1, zt2])


_QUANTITY_COLUMN = {
    "hop1_best": 0,
    "hop1_second": 1,
    "hop2_best": 2,
    "hop2_second": 3,
}


@dataclass(frozen=True)
class EmpiricalCdf:
    """Sorted-sample empirical CDF of one ranked ratio statistic."""

    quantity: str
    samples: np.ndarray

    def __call__(self, z):
        idx = np.searchsorted(self.samples, z, side="right")
        out = idx / len(self.samples)
        return float(out) if np.ndim(z) == 0 else out


def empirical_cdf(
    quantity: str,
    params: ChannelParams,
    power: PowerAllocation,
    slots: int,
    seed: RandomSeed,
) -> EmpiricalCdf:
    """Simulate `slots` slots and tabulate the chosen ratio statistic's CDF."""
    if quantity not in _QUANTITY_COLUMN:
        raise ValueError(f"unknown quantity {quantity!r}, expected one of {RATIO_QUANTITIES}")
    if quantity.endswith("_second") and params.num_relays < 2:
        raise ValueError("second-best statistics need at least two relays")
    chunks = []
    if params.num_relays == 1:
        col = 0 if quantity == "hop1_best" else 1
        for _, g_sr, g_rd, g_re, g_se in iter_gain_blocks(params, seed, slots):
            first, second = _ratio_matrices(g_sr, g_rd, g_re, g_se, power)
            chunks.append((first if col == 0 else second)[:, 0])
    else:
        col = _QUANTITY_COLUMN[quantity]
        for _, g_sr, g_rd, g_re, g_se in iter_gain_blocks(params, seed, slots):
            ranked = _ranked_ratio_block(g_sr, g_rd, g_re, g_se, power)
            chunks.append(ranked[:, col])
    samples = np.sort(np.concatenate(chunks))
    return EmpiricalCdf(quantity=quantity, samples=samples)


@dataclass(frozen=True)
class RatioStatistics:
    """Monte Carlo estimates of the ranked-ratio rate averages and collision odds.

    rate_means holds the average clipped log2 rate of each ranked ratio
    statistic; p12 is the probability that the second-best transmit ratio
    beats the second-best receive ratio, with p12_below_one the part of that
    event where the receive ratio sits below one (zero rate region).
    """

    slots: int
    rate_means: dict
    rate_stderrs: dict
    p12: float
    p12_stderr: float
    p12_below_one: float
    p_s_hat: float
    p_s_stderr: float
    prob_hop1_second_above_one: float


def ratio_statistics(
    params: ChannelParams,
    power: PowerAllocation,
    slots: int,
    seed: RandomSeed,
) -> RatioStatistics:
    """One pass of MC oracles for the closed-form module's quantities."""
    if params.num_relays < 2:
        raise ValueError("ranked ratio statistics need at least two relays")
    rate_sums = np.zeros(4)
    rate_batch_means = []
    p12_count = 0
    p12_batch = []
    below_one_count = 0
    collision_count = 0
    collision_batch = []
    above_one_count = 0
    for _, g_sr, g_rd, g_re, g_se in iter_gain_blocks(params, seed, slots):
        first, second = _ratio_matrices(g_sr, g_rd, g_re, g_se, power)
        r1, zr1, _, zr2 = _top_two_rows(first)
        t1, zt1, _, zt2 = _top_two_rows(second)
        ranked = np.column_stack([zr1, zr2, zt1, zt2])
        rates = _clipped_log2(ranked)
        rate_sums += rates.sum(axis=0)
        rate_batch_means.append(rates.mean(axis=0))
        beats = zt2 > zr2
        p12_count += int(np.count_nonzero(beats))
        p12_batch.append(float(np.mean(beats)))
        below_one_count += int(np.count_nonzero(beats & (zr2 < 1.0)))
        collisions = r1 == t1
        collision_count += int(np.count_nonzero(collisions))
        collision_batch.append(float(np.mean(collisions)))
        above_one_count += int(np.count_nonzero(zr2 >= 1.0))
    batch = np.array(rate_batch_means)
    means = rate_sums / slots
    stderrs = [_batch_stderr(batch[:, i]) for i in range(4)]
    return RatioStatistics(
        slots=slots,
        rate_means={q: float(means[i]) for q, i in _QUANTITY_COLUMN.items()},
        rate_stderrs={q: stderrs[i] for q, i in _QUANTITY_COLUMN.items()},
        p12=p12_count / slots,
        p12_stderr=_batch_stderr(np.array(p12_batch)),
        p12_below_one=below_one_count / slots,
        p_s_hat=collision_count / slots,
        p_s_stderr=_batch_stderr(np.array(collision_batch)),
        prob_hop1_second_above_one=above_one_count / slots,
    )

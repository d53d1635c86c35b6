"""Rayleigh-fading channel model: network statistics and reproducible gain sampling.

All links fade independently slot to slot (block fading). Rayleigh amplitudes
mean the squared channel gains are exponentially distributed, and every
downstream formula consumes squared gains only, so phases are never generated.
Receiver noise power is normalized to one and is not configurable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NOISE_POWER = 1.0


@dataclass(frozen=True)
class ChannelParams:
    """Statistical parameters of the two-hop network.

    num_relays: number of relays K (>= 1).
    gamma_sr, gamma_rd: mean gains of the source-relay and relay-destination links.
    gamma_se, gamma_re: mean gains of the source-eavesdropper and
        relay-eavesdropper links.
    """

    num_relays: int
    gamma_sr: float = 2.0
    gamma_rd: float = 2.0
    gamma_se: float = 2.0
    gamma_re: float = 2.0

    def __post_init__(self):
        if int(self.num_relays) != self.num_relays or self.num_relays < 1:
            raise ValueError(f"num_relays must be a positive integer, got {self.num_relays}")
        for name in ("gamma_sr", "gamma_rd", "gamma_se", "gamma_re"):
            val = getattr(self, name)
            if not (val > 0.0) or not np.isfinite(val):
                raise ValueError(f"{name} must be strictly positive, got {val}")

    @property
    def noise_power(self) -> float:
        """Receiver noise power; fixed normalization, never configurable."""
        return NOISE_POWER


@dataclass(frozen=True)
class RandomSeed:
    """Root seed plus a substream index.

    Identical (seed, stream_index) pairs reproduce the same gain sequence on
    any host and under any worker count.
    """

    seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.stream_index < 0:
            raise ValueError("stream_index must be nonnegative")


@dataclass(frozen=True)
class SlotRealization:
    """Squared channel gains of one time slot.

    g_sr, g_rd, g_re are length-K vectors; g_se is the single
    source-eavesdropper gain.
    """

    g_sr: np.ndarray
    g_rd: np.ndarray
    g_re: np.ndarray
    g_se: float

    def __post_init__(self):
        k = len(self.g_sr)
        if len(self.g_rd) != k or len(self.g_re) != k:
            raise ValueError("gain vectors must share the relay count")
        if min(self.g_sr.min(), self.g_rd.min(), self.g_re.min(), self.g_se) < 0:
            raise ValueError("channel gains must be nonnegative")

    @property
    def num_relays(self) -> int:
        return len(self.g_sr)


def make_rng(seed: RandomSeed) -> np.random.Generator:
    """Counter-based (Philox) generator for the given seed and substream."""
    ss = np.random.SeedSequence(seed.seed, spawn_key=(seed.stream_index,))
    return np.random.Generator(np.random.Philox(ss))


def block_rng(seed: RandomSeed, block_index: int) -> np.random.Generator:
    """Independent generator for one block of slots.

    The substream depends only on (seed, stream_index, block_index), so slot
    blocks can be drawn in any order, on any number of workers, and still
    reproduce the same gains.
    """
    ss = np.random.SeedSequence(seed.seed, spawn_key=(seed.stream_index, block_index))
    return np.random.Generator(np.random.Philox(ss))


def exponential_gains(rng: np.random.Generator, mean: float, size) -> np.ndarray:
    """Exponential gains by inverse transform on uniform draws."""
    u = rng.random(size)
    return -mean * np.log1p(-u)


def sample_slot(params: ChannelParams, rng: np.random.Generator) -> SlotRealization:
    """Draw one slot of independent gains, advancing the generator state."""
    k = params.num_relays
    g_sr = exponential_gains(rng, params.gamma_sr, k)
    g_rd = exponential_gains(rng, params.gamma_rd, k)
    g_re = exponential_gains(rng, params.gamma_re, k)
    g_se = float(exponential_gains(rng, params.gamma_se, None))
    return SlotRealization(g_sr=g_sr, g_rd=g_rd, g_re=g_re, g_se=g_se)


def sample_gain_block(params: ChannelParams, rng: np.random.Generator, n: int):
    """Draw n slots of gains as arrays: (n, K), (n, K), (n, K), (n,).

    Draw order (g_sr, g_rd, g_re, g_se) is fixed; changing it would change
    every seeded result.
    """
    k = params.num_relays
    g_sr = exponential_gains(rng, params.gamma_sr, (n, k))
    g_rd = exponential_gains(rng, params.gamma_rd, (n, k))
    g_re = exponential_gains(rng, params.gamma_re, (n, k))
    g_se = exponential_gains(rng, params.gamma_se, n)
    return g_sr, g_rd, g_re, g_se

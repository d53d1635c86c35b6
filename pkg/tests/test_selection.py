"""Selection policies on hand-constructed slots; relay indices are 0-based."""

import math

import numpy as np
import pytest

from relaysec import (
    Branch,
    ChannelParams,
    PowerAllocation,
    RandomSeed,
    Scheme,
    SlotRealization,
    compute_ratio_set,
    hop_secrecy_rates,
    make_rng,
    sample_slot,
    select_ifd_mrrs,
    select_max_link_ratio,
    select_max_min_ratio,
)


def slot(g_sr, g_rd, g_re, g_se):
    return SlotRealization(
        g_sr=np.asarray(g_sr, dtype=float),
        g_rd=np.asarray(g_rd, dtype=float),
        g_re=np.asarray(g_re, dtype=float),
        g_se=float(g_se),
    )


UNIT = PowerAllocation(1.0, 1.0)


class TestHopRates:
    def test_direct_formula(self):
        s = slot([3.0], [1.0], [1.0], 1.0)
        c_sr, _ = hop_secrecy_rates(s, 0, UNIT)
        assert c_sr == pytest.approx(1.0)  # log2(4/2)

    def test_clipping(self):
        s = slot([1.0], [1.0], [1.0], 3.0)
        c_sr, _ = hop_secrecy_rates(s, 0, UNIT)
        assert c_sr == 0.0

    def test_equal_gains_zero_rate(self):
        s = slot([2.0], [1.0], [1.0], 2.0)
        c_sr, _ = hop_secrecy_rates(s, 0, UNIT)
        assert c_sr == 0.0

    def test_second_hop(self):
        s = slot([1.0], [3.0], [1.0], 1.0)
        _, c_rd = hop_secrecy_rates(s, 0, UNIT)
        assert c_rd == pytest.approx(1.0)


class TestMaxMinRatio:
    def test_worked_example(self):
        # relay 0: min(2, 2) = 2; relay 1: min(1, 2) = 1 -> relay 0, rate half a bit
        s = slot([3.0, 1.0], [1.0, 3.0], [0.0, 1.0], 1.0)
        decision, rate = select_max_min_ratio(s, UNIT)
        assert decision.rx_relay == decision.tx_relay == 0
        assert decision.branch is Branch.TWO_SLOT
        assert rate == pytest.approx(0.5)

    def test_degenerate_tie(self):
        s = slot([1.0, 1.0], [1.0, 1.0], [1.0, 1.0], 1.0)
        decision, rate = select_max_min_ratio(s, UNIT)
        assert rate == 0.0
        assert decision.rx_relay == 0  # lowest index on ties

    def test_single_relay_reduction(self):
        s = slot([3.0], [7.0], [1.0], 1.0)
        _, rate = select_max_min_ratio(s, UNIT)
        c_sr, c_rd = hop_secrecy_rates(s, 0, UNIT)
        assert rate == pytest.approx(0.5 * min(c_sr, c_rd))

    def test_rate_equals_half_min_of_clipped_hop_rates(self):
        rng = make_rng(RandomSeed(5))
        params = ChannelParams(num_relays=3)
        power = PowerAllocation(2.0, 0.7)
        for _ in range(200):
            s = sample_slot(params, rng)
            decision, rate = select_max_min_ratio(s, power)
            c_sr, c_rd = hop_secrecy_rates(s, decision.rx_relay, power)
            assert rate == pytest.approx(0.5 * min(c_sr, c_rd), abs=1e-12)
            assert rate >= 0.0


class TestMaxLinkRatio:
    def test_worked_example(self):
        # first-hop best ratio 8/2 = 4 beats second-hop best 3
        s = slot([8.0, 2.0], [3.0, 3.0], [1.0, 3.0], 2.0)
        decision = select_max_link_ratio(s, UNIT)
        assert decision.branch is Branch.FIRST_HOP_LINK
        assert decision.rx_relay == 0
        assert decision.tx_relay is None

    def test_second_hop_wins(self):
        s = slot([1.0, 1.0], [9.0, 1.0], [1.0, 1.0], 2.0)
        decision = select_max_link_ratio(s, UNIT)
        assert decision.branch is Branch.SECOND_HOP_LINK
        assert decision.tx_relay == 0
        assert decision.rx_relay is None

    def test_vanishing_eavesdropper_gain(self):
        # ratio diverges, so the first hop always wins and must not crash
        s = slot([0.5, 0.2], [100.0, 100.0], [1.0, 1.0], 0.0)
        decision = select_max_link_ratio(s, UNIT)
        assert decision.branch is Branch.FIRST_HOP_LINK
        assert decision.rx_relay == 0


class TestIfdMrrs:
    def test_distinct_best_relays(self):
        # first-hop ratios (4, 2, 1); second-hop (2, 4, 8): different winners
        s = slot([7.0, 3.0, 1.0], [1.0, 3.0, 7.0], [0.0, 0.0, 0.0], 1.0)
        d = select_ifd_mrrs(s, UNIT)
        assert d.branch is Branch.DISTINCT
        assert d.rx_relay == 0 and d.tx_relay == 2

    def test_collision_q_positive(self):
        # second-hop ratios (8, 4, 2): relay 0 best on both hops,
        # q = min(4, 4) - min(2, 8) = 2 > 0
        s = slot([7.0, 3.0, 1.0], [7.0, 3.0, 1.0], [0.0, 0.0, 0.0], 1.0)
        d = select_ifd_mrrs(s, UNIT)
        assert d.branch is Branch.COLLISION_Q_POSITIVE
        assert d.rx_relay == 0 and d.tx_relay == 1
        assert d.q_value == pytest.approx(2.0)

    def test_collision_q_negative(self):
        # second-hop ratios (8, 1.5, 1.8): q = min(4, 1.8) - min(2, 8) = -0.2
        s = slot([7.0, 3.0, 1.0], [7.0, 0.5, 0.8], [0.0, 0.0, 0.0], 1.0)
        d = select_ifd_mrrs(s, UNIT)
        assert d.branch is Branch.COLLISION_Q_NONPOSITIVE
        assert d.rx_relay == 1 and d.tx_relay == 0
        assert d.q_value == pytest.approx(-0.2)

    def test_q_exactly_zero_goes_to_nonpositive_branch(self):
        # both hops rank relay 0 first with identical ratio pairs, so q = 0
        s = slot([3.0, 1.0], [3.0, 1.0], [0.0, 0.0], 0.0)
        d = select_ifd_mrrs(s, UNIT)
        assert d.branch is Branch.COLLISION_Q_NONPOSITIVE
        assert d.q_value == 0.0
        assert d.rx_relay == 1 and d.tx_relay == 0

    def test_single_relay_rejected(self):
        s = slot([1.0], [1.0], [1.0], 1.0)
        with pytest.raises(ValueError):
            select_ifd_mrrs(s, UNIT)

    def test_distinct_relays_always(self):
        power = PowerAllocation(1.7, 0.4)
        for k in (2, 3, 5):
            rng = make_rng(RandomSeed(99, stream_index=k))
            params = ChannelParams(num_relays=k)
            for _ in range(500):
                d = select_ifd_mrrs(sample_slot(params, rng), power)
                assert d.rx_relay != d.tx_relay
                assert d.scheme is Scheme.IFD_MRRS

    def test_rank_preserving_transform_keeps_ranking(self):
        rng = make_rng(RandomSeed(31))
        params = ChannelParams(num_relays=4)
        for _ in range(100):
            s = sample_slot(params, rng)
            base = compute_ratio_set(s, UNIT)
            for scale in (0.25, 3.0, 17.0):
                scaled = SlotRealization(
                    g_sr=s.g_sr * scale, g_rd=s.g_rd, g_re=s.g_re, g_se=s.g_se * scale
                )
                moved = compute_ratio_set(scaled, UNIT)
                assert moved.rx_best == base.rx_best
                assert moved.rx_second == base.rx_second


def test_ratio_set_ordering_and_fields():
    rng = make_rng(RandomSeed(55))
    params = ChannelParams(num_relays=3)
    power = PowerAllocation(2.5, 2.5)
    for _ in range(300):
        rs = compute_ratio_set(sample_slot(params, rng), power)
        assert rs.rx_best_value >= rs.rx_second_value
        assert rs.tx_best_value >= rs.tx_second_value
        assert rs.rx_best != rs.rx_second
        assert rs.tx_best != rs.tx_second
        assert np.all(rs.first_hop > 0) and np.all(rs.second_hop > 0)


def test_all_rates_nonnegative():
    rng = make_rng(RandomSeed(77))
    params = ChannelParams(num_relays=2)
    power = PowerAllocation(0.3, 4.0)
    for _ in range(200):
        s = sample_slot(params, rng)
        _, rate = select_max_min_ratio(s, power)
        assert rate >= 0.0
        for k in range(2):
            c_sr, c_rd = hop_secrecy_rates(s, k, power)
            assert c_sr >= 0.0 and c_rd >= 0.0

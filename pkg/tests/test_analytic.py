"""Closed forms against frozen Monte Carlo oracles and internal consistency.

Frozen oracle values come from 10^7-slot runs of the simulation engine
(ratio_statistics), recorded here with their seeds so they can be
regenerated; the engine itself is validated independently in
test_montecarlo.py.
"""

import math

import numpy as np
import pytest
from scipy import integrate

from relaysec import (
    ChannelParams,
    PowerAllocation,
    RandomSeed,
    Scheme,
    empirical_cdf,
    eval_hop1_order_avg,
    eval_hop2_order_avg,
    eval_p12,
    eval_p12_breakdown,
    eval_p21,
    eval_throughput,
    ratio_cdf,
    ratio_pdf_hop1_second,
    simulate,
)
from relaysec.analytic import MAX_RELAYS, _cdf_full, _clamp_unit

PARAMS3 = ChannelParams(num_relays=3)
ALLOC = PowerAllocation(2.5, 2.5)

# ratio_statistics(ChannelParams(num_relays=3), PowerAllocation(2.5, 2.5),
#                  10_000_000, RandomSeed(314159))
FROZEN_K3 = {
    "hop1_best": 1.173508,
    "hop1_second": 0.557097,
    "hop2_best": 1.421386,
    "hop2_second": 0.437845,
    "p12": 0.500427,
    "p_s": 0.333158,
    "prob_hop1_second_above_one": 0.500004,
}

# single-link means over 10^7 slots, seed RandomSeed(271828), P = 2.5
FROZEN_K1 = {"hop1": 0.642365, "hop2": 0.642496}


class TestOrderAverages:
    def test_hop1_single_relay_vs_mc(self):
        params = ChannelParams(num_relays=1)
        value = eval_hop1_order_avg("best", params, ALLOC)
        assert value == pytest.approx(FROZEN_K1["hop1"], rel=0.01)

    def test_hop2_single_relay_vs_mc(self):
        params = ChannelParams(num_relays=1)
        value = eval_hop2_order_avg("best", params, ALLOC)
        assert value == pytest.approx(FROZEN_K1["hop2"], rel=0.01)

    def test_k3_standard_config_vs_mc(self):
        assert eval_hop1_order_avg("best", PARAMS3, ALLOC) == pytest.approx(
            FROZEN_K3["hop1_best"], rel=0.01
        )
        assert eval_hop1_order_avg("second", PARAMS3, ALLOC) == pytest.approx(
            FROZEN_K3["hop1_second"], rel=0.01
        )
        assert eval_hop2_order_avg("best", PARAMS3, ALLOC) == pytest.approx(
            FROZEN_K3["hop2_best"], rel=0.01
        )
        assert eval_hop2_order_avg("second", PARAMS3, ALLOC) == pytest.approx(
            FROZEN_K3["hop2_second"], rel=0.01
        )

    def test_monotone_in_legitimate_gain(self):
        values = [
            eval_hop1_order_avg(
                "best", ChannelParams(num_relays=3, gamma_sr=g), ALLOC
            )
            for g in (0.5, 1.0, 2.0, 4.0, 8.0)
        ]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_hop2_vanishes_with_strong_eavesdropper(self):
        weak = eval_hop2_order_avg(
            "best", ChannelParams(num_relays=3, gamma_re=200.0), ALLOC
        )
        assert 0.0 <= weak < 0.05

    def test_best_dominates_second_on_random_grid(self):
        rng = np.random.default_rng(1234)
        for _ in range(50):
            params = ChannelParams(
                num_relays=int(rng.integers(2, 7)),
                gamma_sr=float(rng.uniform(0.3, 5.0)),
                gamma_rd=float(rng.uniform(0.3, 5.0)),
                gamma_se=float(rng.uniform(0.3, 5.0)),
                gamma_re=float(rng.uniform(0.3, 5.0)),
            )
            power = PowerAllocation(float(rng.uniform(0.1, 10.0)), float(rng.uniform(0.1, 10.0)))
            assert eval_hop1_order_avg("best", params, power) >= eval_hop1_order_avg(
                "second", params, power
            )
            assert eval_hop2_order_avg("best", params, power) >= eval_hop2_order_avg(
                "second", params, power
            )

    def test_order_and_relay_count_validation(self):
        with pytest.raises(ValueError):
            eval_hop1_order_avg("second", ChannelParams(num_relays=1), ALLOC)
        with pytest.raises(ValueError):
            eval_hop1_order_avg("third", PARAMS3, ALLOC)
        with pytest.raises(ValueError):
            eval_hop1_order_avg("best", ChannelParams(num_relays=MAX_RELAYS + 1), ALLOC)

    def test_large_relay_count_warns(self):
        with pytest.warns(UserWarning):
            eval_hop1_order_avg("best", ChannelParams(num_relays=24), ALLOC)


class TestRatioCdfs:
    def test_hop2_best_at_one_symmetric(self):
        # equal means: each relay's ratio is below one with probability 1/2
        for k in (2, 3, 5):
            params = ChannelParams(num_relays=k)
            assert ratio_cdf("hop2_best", 1.0, params, ALLOC) == pytest.approx(0.5**k, abs=1e-12)

    def test_hop1_best_at_one_symmetric(self):
        # the alternating sum collapses to 1/(K+1) by exchangeability
        assert ratio_cdf("hop1_best", 1.0, PARAMS3, ALLOC) == pytest.approx(0.25, abs=1e-12)

    def test_monotone_and_limits(self):
        grid = np.linspace(1.0, 60.0, 200)
        for q in ("hop1_best", "hop1_second", "hop2_best", "hop2_second"):
            values = ratio_cdf(q, grid, PARAMS3, ALLOC)
            assert np.all(np.diff(values) >= -1e-10)
            assert np.all((values >= 0.0) & (values <= 1.0))
            assert values[-1] > 0.99

    def test_hop1_second_matches_empirical(self):
        emp = empirical_cdf("hop1_second", PARAMS3, ALLOC, 1_000_000, RandomSeed(2718))
        zs = np.linspace(1.0, float(np.quantile(emp.samples, 0.999)), 50)
        sup = np.max(np.abs(ratio_cdf("hop1_second", zs, PARAMS3, ALLOC) - emp(zs)))
        assert sup < 0.01

    def test_domain_error_below_one(self):
        with pytest.raises(ValueError):
            ratio_cdf("hop1_best", 0.5, PARAMS3, ALLOC)
        with pytest.raises(ValueError):
            ratio_pdf_hop1_second(0.99, PARAMS3, ALLOC)

    def test_quantity_and_rank_validation(self):
        with pytest.raises(ValueError):
            ratio_cdf("nope", 1.5, PARAMS3, ALLOC)
        with pytest.raises(ValueError):
            ratio_cdf("hop1_second", 1.5, ChannelParams(num_relays=1), ALLOC)

    def test_single_relay_best_rank_allowed(self):
        params1 = ChannelParams(num_relays=1)
        assert ratio_cdf("hop2_best", 1.0, params1, ALLOC) == pytest.approx(0.5, abs=1e-12)
        assert ratio_cdf("hop1_best", 1.0, params1, ALLOC) == pytest.approx(0.5, abs=1e-12)

    def test_clamp_guard(self):
        assert np.all(_clamp_unit(np.array([-1e-12, 0.5, 1.0 + 1e-12])) >= 0.0)
        with pytest.raises(ArithmeticError):
            _clamp_unit(np.array([0.5, 1.5]))

    def test_pdf_mass_above_one_matches_survival(self):
        # density over [1, inf) carries exactly the mass the CDF leaves there
        mass, _ = integrate.quad(
            lambda z: ratio_pdf_hop1_second(z, PARAMS3, ALLOC), 1.0, np.inf, limit=200
        )
        survival = 1.0 - ratio_cdf("hop1_second", 1.0, PARAMS3, ALLOC)
        assert mass == pytest.approx(survival, abs=1e-8)
        assert mass == pytest.approx(FROZEN_K3["prob_hop1_second_above_one"], abs=0.002)

    def test_full_support_density_integrates_to_one(self):
        from relaysec.analytic import _pdf_hop1_second_full

        below, _ = integrate.quad(
            lambda z: float(_pdf_hop1_second_full([z], PARAMS3, ALLOC)[0]), 0.0, 1.0
        )
        above, _ = integrate.quad(
            lambda z: float(_pdf_hop1_second_full([z], PARAMS3, ALLOC)[0]), 1.0, np.inf, limit=200
        )
        assert below + above == pytest.approx(1.0, abs=1e-7)

    def test_full_support_cdf_matches_empirical_everywhere(self):
        emp = empirical_cdf("hop2_second", PARAMS3, ALLOC, 500_000, RandomSeed(999))
        zs = np.linspace(0.05, 8.0, 60)
        sup = np.max(np.abs(_cdf_full("hop2_second", zs, PARAMS3, ALLOC) - emp(zs)))
        assert sup < 0.01


class TestCollisionProbability:
    def test_within_unit_interval_on_grid(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            params = ChannelParams(
                num_relays=int(rng.integers(2, 6)),
                gamma_sr=float(rng.uniform(0.5, 4.0)),
                gamma_rd=float(rng.uniform(0.5, 4.0)),
                gamma_se=float(rng.uniform(0.5, 4.0)),
                gamma_re=float(rng.uniform(0.5, 4.0)),
            )
            power = PowerAllocation(float(rng.uniform(0.2, 8.0)), float(rng.uniform(0.2, 8.0)))
            assert 0.0 <= eval_p12(params, power) <= 1.0

    def test_against_frozen_mc(self):
        assert eval_p12(PARAMS3, ALLOC) == pytest.approx(FROZEN_K3["p12"], abs=0.02)

    def test_mirror_consistency(self):
        # integrating either hop's density over the other's survival must
        # split the same unit of probability
        for params, power in [
            (PARAMS3, ALLOC),
            (ChannelParams(num_relays=2, gamma_sr=1.0, gamma_re=3.0), PowerAllocation(4.0, 0.5)),
            (ChannelParams(num_relays=5, gamma_rd=0.7), PowerAllocation(0.8, 6.0)),
        ]:
            p12 = eval_p12(params, power)
            p21 = eval_p21(params, power)
            assert abs(p12 + p21 - 1.0) < 1e-6

    def test_breakdown_components(self):
        split = eval_p12_breakdown(PARAMS3, ALLOC)
        assert split.total == pytest.approx(split.below_one + split.above_one, abs=1e-12)
        assert split.below_one > 0.0 and split.above_one > 0.0

    def test_needs_two_relays(self):
        with pytest.raises(ValueError):
            eval_p12(ChannelParams(num_relays=1), ALLOC)


class TestThroughputAssembly:
    def test_collision_chance_is_one_over_k(self):
        breakdown = eval_throughput(ChannelParams(num_relays=4), ALLOC, p12=0.5)
        assert breakdown.p_s == 0.25

    def test_forced_p12_collapses_mixture(self):
        b = eval_throughput(PARAMS3, ALLOC, p12=1.0)
        p_s = 1.0 / 3.0
        assert b.e_csr == pytest.approx(b.e_csr1, abs=1e-12)
        assert b.e_crd == pytest.approx((1 - p_s) * b.e_crd1 + p_s * b.e_crd2, abs=1e-12)
        assert b.throughput == min(b.e_csr, b.e_crd)
        assert b.p21 == 0.0

    def test_against_mc_at_good_split(self):
        # analytic optimum split, then an independent simulation at it
        from relaysec import budget_for_scheme, optimize

        budget = budget_for_scheme(Scheme.IFD_MRRS, 10.0)
        res = optimize(Scheme.IFD_MRRS, PARAMS3, budget, evaluator="analytic")
        est = simulate(Scheme.IFD_MRRS, PARAMS3, res.best_alloc, 1_000_000, RandomSeed(1618))
        assert abs(res.c_max - est.throughput) / est.throughput < 0.05

    def test_breakdown_invariants(self):
        b = eval_throughput(PARAMS3, ALLOC)
        assert b.e_csr2 <= b.e_csr1
        assert b.e_crd2 <= b.e_crd1
        assert b.throughput == min(b.e_csr, b.e_crd)
        assert 0.0 <= b.p12 <= 1.0
        assert b.p21 == pytest.approx(1.0 - b.p12)
        assert set(b.to_dict()) == {
            "p_s", "p12", "e_csr1", "e_csr2", "e_crd1", "e_crd2", "e_csr", "e_crd", "throughput",
        }

    def test_needs_two_relays(self):
        with pytest.raises(ValueError):
            eval_throughput(ChannelParams(num_relays=1), ALLOC)

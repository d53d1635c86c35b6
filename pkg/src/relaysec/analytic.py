"""Closed-form average secrecy rates, ranked-ratio distributions, and throughput.

Every average here reduces to alternating binomial sums over the scaled
exponential integral exp(x)*E1(x), which keeps all terms order-one and free
of overflow. The alternating sums cancel heavily as the relay count grows, so
terms are combined with exact compensated summation and the relay count is
capped; accuracy degrades past roughly twenty relays and a warning says so.

The ranked-ratio CDFs have closed forms on z >= 1, which is all the clipped
rate averages ever need. The collision-resolution probability also draws mass
from z < 1, where the distributions take a different closed form; both pieces
are evaluated and reported so the split is visible.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .channel import ChannelParams
from .power import PowerAllocation
from .specialmath import exp_integral_e1_scaled, integrate_semi_infinite

LN2 = math.log(2.0)
MAX_RELAYS = 64
_ACCURACY_WARN_RELAYS = 20
_EXP_UNDERFLOW = 745.0

RATIO_QUANTITIES = ("hop1_best", "hop1_second", "hop2_best", "hop2_second")


class QuadratureError(RuntimeError):
    """Numerical integration failed to reach its error target."""


def _check_relay_count(k: int):
    if k > MAX_RELAYS:
        raise ValueError(f"closed forms support at most {MAX_RELAYS} relays, got {k}")
    if k > _ACCURACY_WARN_RELAYS:
        warnings.warn(
            f"alternating sums lose accuracy beyond ~{_ACCURACY_WARN_RELAYS} relays "
            f"(requested {k})",
            stacklevel=3,
        )


def _hop1_rate_term(c: int, power: PowerAllocation, params: ChannelParams) -> float:
    # integral of the c-th survival power over the positive-rate region
    beta = c / (power.source_power * params.gamma_sr)
    delta = 1.0 / (power.source_power * params.gamma_se)
    g = exp_integral_e1_scaled
    return (g(beta) - g(beta + delta)) / LN2


def _hop2_rate_term(c: int, power: PowerAllocation, params: ChannelParams) -> float:
    b = c / (power.relay_power * params.gamma_rd)
    a = c / (power.relay_power * params.gamma_re)
    u0 = 1.0 + params.gamma_re / params.gamma_rd
    g = exp_integral_e1_scaled
    acc = [g(b)]
    tail = g(a * u0)
    acc.append(-tail)
    for i in range(2, c + 1):
        tail = (u0 ** (1 - i) - a * tail) / (i - 1)
        acc.append(-tail)
    return math.fsum(acc) / LN2


def _order_avg(term, order: str, k: int) -> float:
    """Combine per-power rate terms into the best / second-best average."""
    if order == "best":
        terms = [-math.comb(k, r) * (-1) ** r * term(r) for r in range(1, k + 1)]
    elif order == "second":
        if k < 2:
            raise ValueError("second-best averages need at least two relays")
        terms = [-math.comb(k - 1, r) * (-1) ** r * term(r) for r in range(1, k)]
        terms += [
            -(k - 1) * math.comb(k - 1, r) * (-1) ** r * term(r + 1) for r in range(k)
        ]
    else:
        raise ValueError(f"order must be 'best' or 'second', got {order!r}")
    return math.fsum(terms)


def eval_hop1_order_avg(order: str, params: ChannelParams, power: PowerAllocation) -> float:
    """Average clipped secrecy rate of the best or second-best first-hop channel."""
    _check_relay_count(params.num_relays)
    return _order_avg(
        lambda c: _hop1_rate_term(c, power, params), order, params.num_relays
    )


def eval_hop2_order_avg(order: str, params: ChannelParams, power: PowerAllocation) -> float:
    """Average clipped secrecy rate of the best or second-best second-hop channel."""
    _check_relay_count(params.num_relays)
    return _order_avg(
        lambda c: _hop2_rate_term(c, power, params), order, params.num_relays
    )


# ---------------------------------------------------------------------------
# ranked-ratio distributions


def _hop1_coefficients(k: int, order: str) -> list[tuple[float, int]]:
    """(weight, survival power) pairs of the first-hop ranked-ratio CDF."""
    if order == "best":
        return [(math.comb(k, r) * (-1.0) ** r, r) for r in range(k + 1)]
    pairs = [(math.comb(k - 1, r) * (-1.0) ** r, r) for r in range(k)]
    pairs += [((k - 1) * math.comb(k - 1, r) * (-1.0) ** r, r + 1) for r in range(k)]
    return pairs


def _hop1_cdf_scalar(z: float, coeffs, params: ChannelParams, power: PowerAllocation) -> float:
    """First-hop ranked-ratio CDF at one point, full support z > 0.

    On z >= 1 each survival power carries its exponential decay; below 1 only
    deep source-eavesdropper fades keep the ratio that small, which replaces
    the decay with the fade-probability damping factor.
    """
    gsr, gse, ps = params.gamma_sr, params.gamma_se, power.source_power
    if z >= 1.0:
        rate = 1.0 / (ps * gsr)
        return math.fsum(
            a * math.exp(-(z - 1.0) * c * rate) / (1.0 + gse * c * z / gsr) for a, c in coeffs
        )
    scaled = (1.0 - z) / (ps * z * gse)
    if scaled >= _EXP_UNDERFLOW:
        return 0.0
    damp = math.exp(-scaled)
    return damp * math.fsum(a / (1.0 + gse * c * z / gsr) for a, c in coeffs)


def _hop1_pdf_scalar(z: float, coeffs, params: ChannelParams, power: PowerAllocation) -> float:
    gsr, gse, ps = params.gamma_sr, params.gamma_se, power.source_power
    if z >= 1.0:
        rate = 1.0 / (ps * gsr)
        total = 0.0
        for a, c in coeffs:
            b = gse * c / gsr
            denom = 1.0 + b * z
            total += a * math.exp(-(z - 1.0) * c * rate) * (-c * rate / denom - b / denom**2)
        return total
    scaled = (1.0 - z) / (ps * z * gse)
    if scaled >= _EXP_UNDERFLOW:
        return 0.0
    damp = math.exp(-scaled)
    level = 0.0
    slope = 0.0
    for a, c in coeffs:
        b = gse * c / gsr
        denom = 1.0 + b * z
        level += a / denom
        slope -= a * b / denom**2
    return damp * (level / (gse * ps * z * z) + slope)


def _hop2_link_cdf_scalar(z: float, params: ChannelParams, power: PowerAllocation) -> float:
    """Full-support CDF of one relay's second-hop ratio."""
    c = params.gamma_re / params.gamma_rd
    pr = power.relay_power
    if z >= 1.0:
        w = math.exp(-(z - 1.0) / (pr * params.gamma_rd)) / (1.0 + c * z)
        return 1.0 - w
    scaled = (1.0 - z) / (pr * z * params.gamma_re)
    if scaled >= _EXP_UNDERFLOW:
        return 0.0
    return math.exp(-scaled) * c * z / (1.0 + c * z)


def _hop2_link_pdf_scalar(z: float, params: ChannelParams, power: PowerAllocation) -> float:
    c = params.gamma_re / params.gamma_rd
    pr = power.relay_power
    if z >= 1.0:
        w = math.exp(-(z - 1.0) / (pr * params.gamma_rd)) / (1.0 + c * z)
        return w * (1.0 / (pr * params.gamma_rd) + c / (1.0 + c * z))
    scaled = (1.0 - z) / (pr * z * params.gamma_re)
    if scaled >= _EXP_UNDERFLOW:
        return 0.0
    return math.exp(-scaled) * (
        c / (params.gamma_re * pr * z * (1.0 + c * z)) + c / (1.0 + c * z) ** 2
    )


def _cdf_full_scalar(quantity: str, z: float, params: ChannelParams, power: PowerAllocation) -> float:
    k = params.num_relays
    if quantity in ("hop1_best", "hop1_second"):
        order = "best" if quantity == "hop1_best" else "second"
        coeffs = _hop1_coefficients(k, order)
        return _hop1_cdf_scalar(z, coeffs, params, power)
    f = _hop2_link_cdf_scalar(z, params, power)
    if quantity == "hop2_best":
        return f**k
    if quantity == "hop2_second":
        return f ** (k - 1) * (1.0 + (k - 1) * (1.0 - f))
    raise ValueError(f"unknown quantity {quantity!r}, expected one of {RATIO_QUANTITIES}")


def _cdf_full(quantity: str, z, params: ChannelParams, power: PowerAllocation):
    """Ranked-ratio CDFs on the full support z > 0, for grids of points."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    return np.array([_cdf_full_scalar(quantity, float(v), params, power) for v in z])


def _pdf_hop1_second_full(z, params: ChannelParams, power: PowerAllocation):
    z = np.atleast_1d(np.asarray(z, dtype=float))
    coeffs = _hop1_coefficients(params.num_relays, "second")
    return np.array([_hop1_pdf_scalar(float(v), coeffs, params, power) for v in z])


def _pdf_hop2_second_scalar(z: float, params: ChannelParams, power: PowerAllocation) -> float:
    k = params.num_relays
    f = _hop2_link_cdf_scalar(z, params, power)
    dens = _hop2_link_pdf_scalar(z, params, power)
    return k * (k - 1) * f ** (k - 2) * (1.0 - f) * dens


def _clamp_unit(values: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    low = float(np.min(values))
    high = float(np.max(values))
    if low < -tol or high > 1.0 + tol:
        raise ArithmeticError(
            f"CDF evaluation left [0, 1] by more than {tol}: range [{low}, {high}]"
        )
    return np.clip(values, 0.0, 1.0)


def ratio_cdf(quantity: str, z, params: ChannelParams, power: PowerAllocation):
    """CDF of a ranked ratio statistic, valid on the clipped-rate support z >= 1.

    quantity is one of hop1_best, hop1_second, hop2_best, hop2_second.
    """
    if quantity not in RATIO_QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}, expected one of {RATIO_QUANTITIES}")
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z < 1.0):
        raise ValueError("ranked ratio CDFs are defined on z >= 1")
    needed = 2 if quantity.endswith("_second") else 1
    if params.num_relays < needed:
        raise ValueError(f"{quantity} needs at least {needed} relays")
    _check_relay_count(params.num_relays)
    out = _clamp_unit(_cdf_full(quantity, z, params, power))
    return float(out[0]) if scalar else out


def ratio_pdf_hop1_second(z, params: ChannelParams, power: PowerAllocation):
    """Density of the second-best first-hop ratio on z >= 1."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z < 1.0):
        raise ValueError("the ranked ratio density is evaluated on z >= 1")
    if params.num_relays < 2:
        raise ValueError("second-best statistics need at least two relays")
    _check_relay_count(params.num_relays)
    out = _pdf_hop1_second_full(z, params, power)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# collision-resolution probability and throughput assembly


@dataclass(frozen=True)
class CollisionSplit:
    """P{second-best tx ratio > second-best rx ratio}, split at rx ratio = 1."""

    total: float
    below_one: float
    above_one: float


def eval_p12_breakdown(params: ChannelParams, power: PowerAllocation) -> CollisionSplit:
    if params.num_relays < 2:
        raise ValueError("collision statistics need at least two relays")
    _check_relay_count(params.num_relays)
    coeffs = _hop1_coefficients(params.num_relays, "second")

    def integrand(z: float) -> float:
        f = _hop1_pdf_scalar(z, coeffs, params, power)
        s = 1.0 - _cdf_full_scalar("hop2_second", z, params, power)
        return f * s

    below, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-8)
    tail = integrate_semi_infinite(integrand, 1.0)
    if not tail.converged:
        raise QuadratureError("collision-probability tail integral did not converge")
    total = min(1.0, max(0.0, below + tail.value))
    return CollisionSplit(total=total, below_one=float(below), above_one=tail.value)


def eval_p12(params: ChannelParams, power: PowerAllocation) -> float:
    """Probability that a rank collision resolves toward the best receive relay."""
    return eval_p12_breakdown(params, power).total


def eval_p21(params: ChannelParams, power: PowerAllocation) -> float:
    """Mirror of eval_p12, integrating the other hop's density; cross-check only."""
    if params.num_relays < 2:
        raise ValueError("collision statistics need at least two relays")
    coeffs = _hop1_coefficients(params.num_relays, "second")

    def integrand(z: float) -> float:
        f = _pdf_hop2_second_scalar(z, params, power)
        s = 1.0 - _hop1_cdf_scalar(z, coeffs, params, power)
        return f * s

    below, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-8)
    tail = integrate_semi_infinite(integrand, 1.0)
    if not tail.converged:
        raise QuadratureError("mirrored collision integral did not converge")
    return min(1.0, max(0.0, below + tail.value))


@dataclass(frozen=True)
class AnalyticBreakdown:
    """All closed-form ingredients of the approximate secrecy throughput."""

    p_s: float
    p12: float
    e_csr1: float
    e_csr2: float
    e_crd1: float
    e_crd2: float
    e_csr: float
    e_crd: float
    throughput: float

    @property
    def p21(self) -> float:
        return 1.0 - self.p12

    def to_dict(self) -> dict:
        return {
            "p_s": self.p_s,
            "p12": self.p12,
            "e_csr1": self.e_csr1,
            "e_csr2": self.e_csr2,
            "e_crd1": self.e_crd1,
            "e_crd2": self.e_crd2,
            "e_csr": self.e_csr,
            "e_crd": self.e_crd,
            "throughput": self.throughput,
        }


def eval_throughput(
    params: ChannelParams,
    power: PowerAllocation,
    p12: Optional[float] = None,
) -> AnalyticBreakdown:
    """Approximate secrecy throughput of the dual-relay selection scheme.

    A rank collision strikes with probability 1/K under i.i.d. fading; it
    demotes one hop to its second-best channel depending on which side the
    collision resolves to. p12 may be injected to isolate the mixing algebra
    in tests; by default it is computed from the closed forms.
    """
    k = params.num_relays
    if k < 2:
        raise ValueError("the dual-relay scheme needs at least two relays")
    p_s = 1.0 / k
    if p12 is None:
        p12 = eval_p12(params, power)
    p21 = 1.0 - p12
    e_csr1 = eval_hop1_order_avg("best", params, power)
    e_csr2 = eval_hop1_order_avg("second", params, power)
    e_crd1 = eval_hop2_order_avg("best", params, power)
    e_crd2 = eval_hop2_order_avg("second", params, power)
    e_csr = (1.0 - p_s) * e_csr1 + p_s * (p12 * e_csr1 + p21 * e_csr2)
    e_crd = (1.0 - p_s) * e_crd1 + p_s * (p12 * e_crd2 + p21 * e_crd1)
    return AnalyticBreakdown(
        p_s=p_s,
        p12=p12,
        e_csr1=e_csr1,
        e_csr2=e_csr2,
        e_crd1=e_crd1,
        e_crd2=e_crd2,
        e_csr=e_csr,
        e_crd=e_crd,
        throughput=min(e_csr, e_crd),
    )

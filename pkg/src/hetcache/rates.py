"""Average ergodic rates of the four content-access cases.

All rates are in nats/s/Hz; the conversion to bits/s (eta * w) happens only
when the queueing layer builds its service-rate matrix.  With zero noise the
closed single-integral forms are used; otherwise the nested double integral
(outer distance variable, inner rate-threshold variable) is evaluated.
Case 3 is defined in the interference-limited regime only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .association import (
    active_d2d_density,
    active_fraction,
    first_association_probability,
    three_tier_spec,
)
from .config import NetworkConfig
from .quadrature import (
    DEFAULT_QUAD,
    QuadratureError,
    QuadratureSpec,
    integrate_interval,
    integrate_semi_infinite,
)
from .specfun import kernel_z1, kernel_z2, kernel_z2_scale


@dataclass(frozen=True)
class RateResult:
    value: float            # nats/s/Hz
    case_id: int
    tier: int               # serving tier (0 = local cache)
    regime: str             # "with-noise" | "interference-limited"
    error: float            # quadrature error estimate

    def __post_init__(self) -> None:
        if self.value < 0.0 or self.error < 0.0:
            raise ValueError("rate and error estimate must be non-negative")


@dataclass(frozen=True)
class InterferenceCoefficients:
    """Scalars shared by all rate/outage expressions for one config."""

    s_total: float        # sum_j lambda_j P_j^(2/beta), D2D tier at density alpha*lambda0
    s_relay_bs: float     # relay + BS association weight
    s_active_total: float  # as s_total but with the active D2D density
    g31: float            # D2D first-association probability
    c1: float             # active-to-nominal interference weight ratio (case 1)
    c2: float             # active D2D weight relative to relay+BS (cases 2 and 3)
    active_ratio: float   # lambda'_1 / lambda_1


def interference_coefficients(cfg: NetworkConfig) -> InterferenceCoefficients:
    tiers = three_tier_spec(cfg)
    w = tiers.weights()
    act = active_d2d_density(cfg)
    e = 2.0 / cfg.beta
    w1_active = act.lambda1_active * cfg.p1**e
    s_total = float(w.sum())
    s_relay_bs = float(w[1] + w[2])
    s_active = w1_active + s_relay_bs
    g31 = first_association_probability(tiers, 1) if cfg.alpha > 0.0 else 0.0
    return InterferenceCoefficients(
        s_total=s_total,
        s_relay_bs=s_relay_bs,
        s_active_total=s_active,
        g31=g31,
        c1=s_active / s_total,
        c2=w1_active / s_relay_bs,
        active_ratio=active_fraction(cfg, act),
    )


def _regime(cfg: NetworkConfig) -> str:
    return "interference-limited" if cfg.noise == 0.0 else "with-noise"


# beyond this t the integrands are < 1e-100; returning 0 avoids expm1 overflow
_T_CUTOFF = 700.0


def _rate_single_integral(bracket, spec: QuadratureSpec) -> tuple[float, float]:
    """integral over t of 1 / (1 + bracket(e^t - 1))."""
    def integrand(t: float) -> float:
        if t > _T_CUTOFF:
            return 0.0
        return 1.0 / (1.0 + bracket(math.expm1(t)))
    return integrate_semi_infinite(integrand, spec)


def _rate_double_integral(cfg: NetworkConfig, tier_i: int, q: float, bracket,
                          spec: QuadratureSpec) -> tuple[float, float]:
    """Noise-inclusive nested form.  With u = pi*q*x^2 the distance integral
    is O(1)-scaled:  int_0^inf du int_0^inf exp(-x(u)^beta v sigma^2 / P_i
    - u*(1 + bracket(v))) dt, v = e^t - 1."""
    p_i = cfg.powers[tier_i - 1]
    sigma2 = cfg.noise
    beta = cfg.beta
    inner_spec = spec.tightened()

    def outer(u: float) -> float:
        if u == 0.0:
            return 0.0
        x_beta = (u / (math.pi * q)) ** (beta / 2.0)

        def inner(t: float) -> float:
            if t > _T_CUTOFF:
                return 0.0
            v = math.expm1(t)
            return math.exp(-x_beta * v * sigma2 / p_i - u * (1.0 + bracket(v)))

        try:
            return integrate_semi_infinite(inner, inner_spec)[0]
        except QuadratureError as exc:
            # at large u the inner integrand is ~e^-u everywhere and QUADPACK
            # can flag slow convergence on a value that is already negligible
            # against the O(1) outer integral; accept it, otherwise re-raise
            if abs(exc.partial) < 1e-9:
                return exc.partial
            raise

    return integrate_semi_infinite(outer, spec)


def rate_case1(cfg: NetworkConfig, tier_i: int, spec: QuadratureSpec = DEFAULT_QUAD) -> RateResult:
    """Rate of a non-caching user served by its strongest node in tier i."""
    if tier_i not in (1, 2, 3):
        raise ValueError("case-1 serving tier must be 1, 2 or 3")
    co = interference_coefficients(cfg)
    beta = cfg.beta

    def bracket(v: float) -> float:
        return co.c1 * kernel_z1(v, beta)

    if cfg.noise == 0.0:
        value, err = _rate_single_integral(bracket, spec)
    else:
        q = co.s_total / cfg.powers[tier_i - 1] ** (2.0 / beta)
        value, err = _rate_double_integral(cfg, tier_i, q, bracket, spec)
    return RateResult(value, 1, tier_i, _regime(cfg), err)


def rate_case2(cfg: NetworkConfig, tier_i: int, spec: QuadratureSpec = DEFAULT_QUAD) -> RateResult:
    """Rate of a cache-enabled user (content not self-cached) served by the
    stronger of relay/BS; active D2D transmitters interfere from distance 0."""
    if tier_i not in (2, 3):
        raise ValueError("case-2 serving tier must be 2 or 3")
    co = interference_coefficients(cfg)
    beta = cfg.beta

    def bracket(v: float) -> float:
        return kernel_z1(v, beta) + co.c2 * kernel_z2(v, beta)

    if cfg.noise == 0.0:
        value, err = _rate_single_integral(bracket, spec)
    else:
        q = co.s_relay_bs / cfg.powers[tier_i - 1] ** (2.0 / beta)
        value, err = _rate_double_integral(cfg, tier_i, q, bracket, spec)
    return RateResult(value, 2, tier_i, _regime(cfg), err)


def _x2_blocked_kernel(v: float, x: float, beta: float) -> float:
    """x^2 * Z3(v; x) with its finite x -> 0 limit (v^(2/beta) times the
    unrestricted-kernel prefactor)."""
    if v == 0.0:
        return 0.0
    if x < 1e-8:
        return v ** (2.0 / beta) * kernel_z2_scale(beta)
    return x * x * kernel_z1(v * x ** (-beta), beta)


def rate_case3(cfg: NetworkConfig, tier_j: int, spec: QuadratureSpec = DEFAULT_QUAD) -> RateResult:
    """Rate of a non-caching user whose strongest node is a cache-enabled
    user without the content, served by the stronger of relay/BS.
    Interference-limited regime only."""
    if tier_j not in (2, 3):
        raise ValueError("case-3 serving tier must be 2 or 3")
    if cfg.noise != 0.0:
        raise ValueError("case-3 rate is defined in the interference-limited regime only")
    if cfg.alpha == 0.0:
        raise ValueError("case 3 is empty without cache-enabled users (alpha = 0)")
    co = interference_coefficients(cfg)
    beta = cfg.beta
    g = co.g31 / (1.0 - co.g31)
    inner_spec = spec.tightened()

    def outer(t: float) -> float:
        if t > _T_CUTOFF:
            return 0.0
        v = math.expm1(t)
        z1 = kernel_z1(v, beta)

        def inner(x: float) -> float:
            den = 1.0 + z1 + g * x * x + co.c2 * _x2_blocked_kernel(v, x, beta)
            return 2.0 * x * (1.0 + g) / (den * den)

        return integrate_interval(inner, 0.0, 1.0, inner_spec)[0]

    value, err = integrate_semi_infinite(outer, spec)
    return RateResult(value, 3, tier_j, "interference-limited", err)


def rate_local(cfg: NetworkConfig) -> RateResult:
    """Read-out rate from the requester's own cache (case 4)."""
    return RateResult(cfg.local_rate_ul, 4, 0, "local", 0.0)


def case_rate_table(cfg: NetworkConfig, spec: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """4x4 table of case rates U[case-1, column] in nats/s/Hz, columns
    ordered (d2d, relay, bs, local).  Structurally impossible states are 0.
    Feeds the queueing service-rate matrix."""
    u = np.zeros((4, 4))
    u[0, 0] = rate_case1(cfg, 1, spec).value
    u[0, 1] = rate_case1(cfg, 2, spec).value
    u[0, 2] = rate_case1(cfg, 3, spec).value
    if cfg.alpha > 0.0:
        u[1, 1] = rate_case2(cfg, 2, spec).value
        u[1, 2] = rate_case2(cfg, 3, spec).value
        if cfg.noise == 0.0:
            u[2, 1] = rate_case3(cfg, 2, spec).value
            u[2, 2] = rate_case3(cfg, 3, spec).value
    u[3, 3] = cfg.local_rate_ul
    return u

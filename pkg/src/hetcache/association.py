"""Closed-form stochastic-geometry layer.

Ordering and association probabilities for a general K-tier network under
max-average-received-power association (C_i = P_i r_i^(-beta)), serving
distance PDFs, the 8x4 user-state probability matrix, and the density of
actually active D2D transmitters with its critical points.

Tier indices are 1-based throughout, matching the tier numbering of the
network model (1 = D2D, 2 = relay, 3 = BS).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import NetworkConfig
from .popularity import PopularityModel

# Row layout of the state matrix: (case, backhaul flag); column layout: serving node.
STATE_ROWS = (
    ("case1", "bh_free"), ("case1", "bh_needed"),
    ("case2", "bh_free"), ("case2", "bh_needed"),
    ("case3", "bh_free"), ("case3", "bh_needed"),
    ("case4", "bh_free"), ("case4", "bh_needed"),
)
STATE_COLUMNS = ("d2d", "relay", "bs", "local")


@dataclass(frozen=True)
class TierSpec:
    """Densities and powers of a K-tier network sharing one path-loss exponent.

    A zero density is allowed so that the D2D tier degenerates cleanly at
    alpha = 0; powers must stay positive.
    """

    densities: tuple[float, ...]
    powers: tuple[float, ...]
    beta: float

    def __post_init__(self) -> None:
        if len(self.densities) != len(self.powers) or not self.densities:
            raise ValueError("need matching, non-empty density and power tuples")
        if any(lam < 0.0 for lam in self.densities):
            raise ValueError("densities must be non-negative")
        if any(p <= 0.0 for p in self.powers):
            raise ValueError("powers must be positive")
        if self.beta < 2.0:
            raise ValueError("path-loss exponent must be >= 2")

    @property
    def k(self) -> int:
        return len(self.densities)

    def weights(self) -> np.ndarray:
        """Association weights lambda_i * P_i^(2/beta); all the closed forms
        below are ratios of these."""
        lam = np.asarray(self.densities, dtype=float)
        pw = np.asarray(self.powers, dtype=float)
        return lam * pw ** (2.0 / self.beta)


def three_tier_spec(cfg: NetworkConfig) -> TierSpec:
    return TierSpec(cfg.densities, cfg.powers, cfg.beta)


def relay_bs_spec(cfg: NetworkConfig) -> TierSpec:
    """Two-tier restriction to relays and base stations (cache-enabled
    requesters, and the no-caching baseline, associate over these only)."""
    return TierSpec((cfg.lambda2, cfg.lambda3), (cfg.p2, cfg.p3), cfg.beta)


def ordering_probability(tiers: TierSpec, order: tuple[int, ...]) -> float:
    """Probability that the tiers' maximum received powers are ranked in the
    given 1-based order (strongest first)."""
    if sorted(order) != list(range(1, tiers.k + 1)):
        raise ValueError(f"order {order} is not a permutation of 1..{tiers.k}")
    w = tiers.weights()
    prob = 1.0
    for n in range(tiers.k - 1):
        tail = sum(w[t - 1] for t in order[n:])
        if tail == 0.0:
            return 0.0 if w[order[n] - 1] == 0.0 else 1.0
        prob *= w[order[n] - 1] / tail
    return prob


def first_association_probability(tiers: TierSpec, i: int) -> float:
    """Probability G_{K,i} that tier i offers the strongest received power."""
    if not 1 <= i <= tiers.k:
        raise ValueError(f"tier index {i} outside 1..{tiers.k}")
    w = tiers.weights()
    total = w.sum()
    if total == 0.0:
        raise ValueError("all tiers have zero density")
    return float(w[i - 1] / total)


def pairwise_association_probability(tiers: TierSpec, i: int) -> float:
    """Association probability restricted to the relay/BS pair {2, 3} of a
    three-tier spec: the priority of a requester that skips the D2D tier."""
    if tiers.k != 3:
        raise ValueError("pairwise form is defined on the three-tier spec")
    if i not in (2, 3):
        raise ValueError("pairwise association is defined for tiers 2 and 3 only")
    w = tiers.weights()
    total = w[1] + w[2]
    if total == 0.0:
        raise ValueError("relay and BS tiers both have zero weight")
    return float(w[i - 1] / total)


def nearest_distance_pdf(tiers: TierSpec, i: int, conditioning: str, x: float) -> float:
    """PDF of the serving distance to tier i, conditioned on tier i winning.

    ``conditioning='case1'`` ranks over all tiers, ``'case2'`` over the
    relay/BS pair only (three-tier spec).
    """
    if x < 0.0:
        raise ValueError("distance must be non-negative")
    w = tiers.weights()
    pw = np.asarray(tiers.powers, dtype=float)
    if conditioning == "case1":
        if not 1 <= i <= tiers.k:
            raise ValueError(f"tier index {i} outside 1..{tiers.k}")
        gain = first_association_probability(tiers, i)
        eff = float(w.sum()) / pw[i - 1] ** (2.0 / tiers.beta)
    elif conditioning == "case2":
        gain = pairwise_association_probability(tiers, i)
        eff = float(w[1] + w[2]) / pw[i - 1] ** (2.0 / tiers.beta)
    else:
        raise ValueError(f"unknown conditioning {conditioning!r}")
    lam_i = tiers.densities[i - 1]
    return 2.0 * math.pi * lam_i / gain * x * math.exp(-math.pi * eff * x * x)


def joint_distance_pdf_case3(tiers: TierSpec, j: int, x: float, y: float) -> float:
    """Joint PDF of (nearest cache-enabled user distance x, serving tier-j
    distance y) for a non-caching user whose strongest node is a cache-enabled
    user but whose content is uncached.  Supported on y > (P_j/P_1)^(1/beta) x.
    """
    if x < 0.0 or y < 0.0:
        raise ValueError("distances must be non-negative")
    if tiers.k != 3 or j not in (2, 3):
        raise ValueError("joint PDF is defined for tiers 2/3 of the three-tier spec")
    k = 5 - j  # the other one of {2, 3}
    lam1, lamj, lamk = (tiers.densities[0], tiers.densities[j - 1], tiers.densities[k - 1])
    p1, pj, pk = (tiers.powers[0], tiers.powers[j - 1], tiers.powers[k - 1])
    beta = tiers.beta
    if y <= (pj / p1) ** (1.0 / beta) * x:
        return 0.0
    p_order = ordering_probability(tiers, (1, j, k))
    if p_order == 0.0:
        raise ValueError("conditioning event has probability zero (no D2D tier)")
    kappa = (lamk / lamj) * (pk / pj) ** (2.0 / beta)
    return (
        4.0 * math.pi**2 * lam1 * lamj * x * y / p_order
        * math.exp(-math.pi * lam1 * x * x - math.pi * lamj * y * y * (1.0 + kappa))
    )


@dataclass(frozen=True)
class StateMatrix:
    """8x4 matrix of user-state probabilities, rows STATE_ROWS, columns
    STATE_COLUMNS.  Entries that are structurally impossible (e.g. a
    cache-enabled requester served via D2D) are exact zeros."""

    d: np.ndarray

    def __post_init__(self) -> None:
        d = np.asarray(self.d, dtype=float)
        if d.shape != (8, 4):
            raise ValueError("state matrix must be 8x4")
        if (d < -1e-15).any() or (d > 1.0 + 1e-12).any():
            raise ValueError("state probabilities must lie in [0, 1]")
        if abs(d.sum() - 1.0) > 1e-10:
            raise ValueError(f"state probabilities sum to {d.sum()}, expected 1")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    def case_probability(self, case: int) -> float:
        """Total probability of case 1..4 (both backhaul rows)."""
        if not 1 <= case <= 4:
            raise ValueError("case index must be 1..4")
        return float(self.d[2 * case - 2 : 2 * case].sum())

    def column(self, name: str) -> np.ndarray:
        return self.d[:, STATE_COLUMNS.index(name)]


def state_matrix(cfg: NetworkConfig, pop: PopularityModel | None = None) -> StateMatrix:
    """Probabilities of all (case, backhaul, serving node) user states."""
    pop = pop or PopularityModel(cfg.gamma, cfg.n_contents)
    tiers = three_tier_spec(cfg)
    alpha, m1, m2, n = cfg.alpha, cfg.m1, cfg.m2, cfg.n_contents
    f = pop.prefix_sum

    g1, g2, g3 = (first_association_probability(tiers, i) for i in (1, 2, 3))
    p123 = ordering_probability(tiers, (1, 2, 3))
    p132 = ordering_probability(tiers, (1, 3, 2))
    p23 = pairwise_association_probability(tiers, 2)
    p32 = pairwise_association_probability(tiers, 3)

    d = np.zeros((8, 4))
    # case 1: non-caching requester, strongest node serves
    d[0, 0] = g1 * (1.0 - alpha) * f(1, m1)
    d[0, 1] = g2 * (1.0 - alpha) * f(1, m2)
    d[0, 2] = g3 * (1.0 - alpha)
    d[1, 1] = g2 * (1.0 - alpha) * f(m2 + 1, n)
    # case 2: cache-enabled requester, content not in own cache
    d[2, 1] = p23 * alpha * f(m1 + 1, m2)
    d[2, 2] = p32 * alpha * f(m1 + 1, n)
    d[3, 1] = p23 * alpha * f(m2 + 1, n)
    # case 3: non-caching requester, strongest node is a cache-enabled user
    # that lacks the content; the best relay/BS serves instead
    d[4, 1] = p123 * (1.0 - alpha) * f(m1 + 1, m2)
    d[4, 2] = p132 * (1.0 - alpha) * f(m1 + 1, n)
    d[5, 1] = p123 * (1.0 - alpha) * f(m2 + 1, n)
    # case 4: served from the requester's own cache
    d[6, 3] = alpha * f(1, m1)
    return StateMatrix(d)


@dataclass(frozen=True)
class D2DActivity:
    """Density of actually active D2D transmitters and its critical points.

    ``alpha_star`` is the cache-enabled fraction below which every
    cache-enabled user must transmit; ``alpha_hat`` maximizes the active
    density; ``h`` is the relay+BS association weight relative to the full
    user population at D2D power.
    """

    lambda1_active: float
    alpha_star: float
    alpha_hat: float
    h: float

    @property
    def fully_active(self) -> bool:
        return self.alpha_star > 0.0


def activity_constant(cfg: NetworkConfig) -> float:
    """h = sum_{j=2,3} (lambda_j/lambda_0) (P_j/P_1)^(2/beta)."""
    e = 2.0 / cfg.beta
    return (cfg.lambda2 / cfg.lambda0) * (cfg.p2 / cfg.p1) ** e \
        + (cfg.lambda3 / cfg.lambda0) * (cfg.p3 / cfg.p1) ** e


def active_d2d_density(cfg: NetworkConfig, pop: PopularityModel | None = None) -> D2DActivity:
    pop = pop or PopularityModel(cfg.gamma, cfg.n_contents)
    f1m1 = pop.prefix_sum(1, cfg.m1)
    h = activity_constant(cfg)
    alpha_star = max(0.0, (f1m1 - h) / (1.0 + f1m1))
    alpha_hat = math.sqrt(h * h + h) - h
    alpha = cfg.alpha
    if alpha < alpha_star:
        lam_active = alpha * cfg.lambda0
    elif alpha == 0.0:
        lam_active = 0.0
    else:
        g31 = first_association_probability(three_tier_spec(cfg), 1)
        lam_active = (1.0 - alpha) * cfg.lambda0 * g31 * f1m1
    return D2DActivity(lam_active, alpha_star, alpha_hat, h)


def active_fraction(cfg: NetworkConfig, act: D2DActivity | None = None) -> float:
    """Fraction lambda'_1 / lambda_1 of cache-enabled users that transmit
    (1 below alpha_star); 0 when there are no cache-enabled users."""
    if cfg.alpha == 0.0:
        return 0.0
    act = act or active_d2d_density(cfg)
    return act.lambda1_active / cfg.lambda1

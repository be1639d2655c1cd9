"""Monte Carlo spatial oracle.

Samples Poisson topologies on a square window, applies the max-average-power
association rule with Rayleigh fading, and measures association fractions,
SINR distributions, ergodic rates, and outage empirically.  It is the
independent cross-check for all closed-form layers, so it shares no kernel
code with them: everything here is literal geometry plus sampling.

Two boundary treatments: ``margin`` restricts reference users to a central
sub-window (interference fields near the edge are depleted), ``torus`` wraps
distances.  Replications split a master seed through ``SeedSequence`` so runs
are reproducible and mergeable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .association import active_d2d_density
from .config import NetworkConfig

BOUNDARY_MODES = ("margin", "torus")


@dataclass(frozen=True)
class EmpiricalEstimate:
    """Point estimate with a normal-approximation standard error
    (95% CI: value +/- 1.96 * std_error)."""

    value: float
    std_error: float
    n_samples: int

    def __post_init__(self) -> None:
        if self.std_error < 0.0 or self.n_samples < 0:
            raise ValueError("standard error and sample count must be non-negative")

    def ci95(self) -> tuple[float, float]:
        half = 1.96 * self.std_error
        return self.value - half, self.value + half


@dataclass(frozen=True)
class SpatialRealization:
    """One sampled topology: positions per tier, caching and activity flags."""

    window: float
    users: np.ndarray          # (n_users, 2)
    relays: np.ndarray         # (n_relays, 2)
    bs: np.ndarray             # (n_bs, 2)
    cache_flags: np.ndarray    # bool per user
    active_flags: np.ndarray   # bool per user; active => cache-enabled
    seed: int

    def __post_init__(self) -> None:
        if self.window <= 0.0:
            raise ValueError("window side must be positive")
        if (self.active_flags & ~self.cache_flags).any():
            raise ValueError("active D2D transmitters must be cache-enabled")


def sample_topology(cfg: NetworkConfig, window: float, seed: int) -> SpatialRealization:
    """Poisson node counts, uniform positions, Bernoulli(alpha) cache flags.

    Active D2D transmitters: below the full-activity threshold every
    cache-enabled user transmits; above it an independent thinning keeps the
    analyzed active density.
    """
    if window <= 0.0:
        raise ValueError("window side must be positive")
    rng = np.random.default_rng(seed)
    area = window * window

    def draw(lam: float) -> np.ndarray:
        n = rng.poisson(lam * area)
        return rng.uniform(0.0, window, size=(n, 2))

    users = draw(cfg.lambda0)
    relays = draw(cfg.lambda2)
    bs = draw(cfg.lambda3)
    cache_flags = rng.random(len(users)) < cfg.alpha
    act = active_d2d_density(cfg)
    if cfg.alpha == 0.0 or cfg.alpha < act.alpha_star:
        active_flags = cache_flags.copy()
    else:
        keep = act.lambda1_active / (cfg.alpha * cfg.lambda0)
        active_flags = cache_flags & (rng.random(len(users)) < keep)
    return SpatialRealization(window, users, relays, bs, cache_flags, active_flags, seed)


def _distances(points: np.ndarray, targets: np.ndarray, window: float,
               boundary: str) -> np.ndarray:
    """(len(points), len(targets)) distance matrix, torus-wrapped on demand."""
    if boundary not in BOUNDARY_MODES:
        raise ValueError(f"boundary mode must be one of {BOUNDARY_MODES}")
    delta = np.abs(points[:, None, :] - targets[None, :, :])
    if boundary == "torus":
        delta = np.minimum(delta, window - delta)
    return np.sqrt((delta * delta).sum(axis=2))


def central_indices(real: SpatialRealization, margin: float) -> np.ndarray:
    """Reference users restricted to the central sub-window (edge-bias control)."""
    if margin < 0.0:
        raise ValueError("margin must be non-negative")
    if 2.0 * margin >= real.window:
        raise ValueError("margin leaves no central region")
    u = real.users
    inside = ((u >= margin) & (u <= real.window - margin)).all(axis=1)
    return np.flatnonzero(inside)


def edge_correction_policy(real: SpatialRealization, margin: float = 500.0,
                           boundary: str = "margin") -> np.ndarray:
    """Indices of admissible reference users under the boundary mode
    (all of them on a torus; the central sub-window otherwise)."""
    if boundary == "torus":
        return np.arange(len(real.users))
    return central_indices(real, margin)


@dataclass
class _Geometry:
    """Per-reference-user serving geometry and ranking, shared by all measures."""

    ref: np.ndarray            # reference user indices into real.users
    r_cache: np.ndarray        # distance to nearest other cache-enabled user (inf if none)
    cache_idx: np.ndarray      # user index of that nearest cache-enabled user (-1 if none)
    r_relay: np.ndarray
    relay_idx: np.ndarray
    r_bs: np.ndarray
    bs_idx: np.ndarray
    winner: np.ndarray         # tier (1/2/3) with max average received power
    relay_over_bs: np.ndarray  # bool: relay beats BS


def _geometry(real: SpatialRealization, cfg: NetworkConfig, ref: np.ndarray,
              boundary: str) -> _Geometry:
    if len(real.relays) == 0 or len(real.bs) == 0:
        raise RuntimeError("relay and BS tiers must be non-empty; resample the topology")
    pts = real.users[ref]
    d_relay = _distances(pts, real.relays, real.window, boundary)
    d_bs = _distances(pts, real.bs, real.window, boundary)
    relay_idx = d_relay.argmin(axis=1)
    bs_idx = d_bs.argmin(axis=1)
    r_relay = d_relay[np.arange(len(ref)), relay_idx]
    r_bs = d_bs[np.arange(len(ref)), bs_idx]

    cache_users = np.flatnonzero(real.cache_flags)
    r_cache = np.full(len(ref), math.inf)
    cache_idx = np.full(len(ref), -1, dtype=np.int64)
    if len(cache_users) > 0:
        d_cache = _distances(pts, real.users[cache_users], real.window, boundary)
        for row, u in enumerate(ref):  # a cache-enabled reference skips itself
            same = np.flatnonzero(cache_users == u)
            if len(same) > 0:
                d_cache[row, same[0]] = math.inf
        best = d_cache.argmin(axis=1)
        r_cache = d_cache[np.arange(len(ref)), best]
        cache_idx = cache_users[best]
        cache_idx[~np.isfinite(r_cache)] = -1

    beta = cfg.beta
    with np.errstate(divide="ignore"):
        pr1 = np.where(np.isfinite(r_cache), cfg.p1 * r_cache ** (-beta), 0.0)
        pr2 = cfg.p2 * r_relay ** (-beta)
        pr3 = cfg.p3 * r_bs ** (-beta)
    winner = np.argmax(np.stack([pr1, pr2, pr3]), axis=0) + 1
    return _Geometry(ref, r_cache, cache_idx, r_relay, relay_idx, r_bs, bs_idx,
                     winner, pr2 > pr3)


def measure_association(real: SpatialRealization, cfg: NetworkConfig,
                        boundary: str = "margin", margin: float = 500.0) -> dict[str, EmpiricalEstimate]:
    """Empirical first-association fractions over the three tiers and the
    relay/BS pair (binomial standard errors within this realization)."""
    ref = edge_correction_policy(real, margin, boundary)
    if len(ref) == 0:
        raise RuntimeError("no reference users in the central region")
    geo = _geometry(real, cfg, ref, boundary)
    n = len(ref)

    def binom(count: int) -> EmpiricalEstimate:
        p = count / n
        return EmpiricalEstimate(p, math.sqrt(max(p * (1.0 - p), 0.0) / n), n)

    out = {f"g{i}": binom(int((geo.winner == i).sum())) for i in (1, 2, 3)}
    out["relay_over_bs"] = binom(int(geo.relay_over_bs.sum()))
    # orderings with the D2D tier first, split by the relay/BS comparison
    out["p123"] = binom(int(((geo.winner == 1) & geo.relay_over_bs).sum()))
    out["p132"] = binom(int(((geo.winner == 1) & ~geo.relay_over_bs).sum()))
    return out


def nearest_distances(real: SpatialRealization, tier: int,
                      boundary: str = "torus", margin: float = 0.0) -> np.ndarray:
    """Distances from reference users to the nearest node of one tier
    (tier 1 = cache-enabled users excluding the reference itself)."""
    if tier not in (1, 2, 3):
        raise ValueError("tier must be 1, 2 or 3")
    ref = edge_correction_policy(real, margin, boundary)
    pts = real.users[ref]
    if tier == 1:
        targets = real.users[real.cache_flags]
        d = _distances(pts, targets, real.window, boundary)
        cache_users = np.flatnonzero(real.cache_flags)
        for row, u in enumerate(ref):
            same = np.flatnonzero(cache_users == u)
            if len(same) > 0:
                d[row, same[0]] = math.inf
    else:
        targets = real.relays if tier == 2 else real.bs
        d = _distances(pts, targets, real.window, boundary)
    if d.shape[1] == 0:
        return np.full(len(ref), math.inf)
    return d.min(axis=1)


_CASE_TIERS = {1: (1, 2, 3), 2: (2, 3), 3: (2, 3)}


def _case_members(geo: _Geometry, real: SpatialRealization, case_id: int, tier: int) -> np.ndarray:
    """Row indices (into geo arrays) of reference users in the geometric
    conditioning of (case, serving tier).  Cases 1/3 condition on non-caching
    users, case 2 on cache-enabled ones; the content split is analytic."""
    if case_id not in _CASE_TIERS or tier not in _CASE_TIERS[case_id]:
        raise ValueError(f"unsupported case/tier pair ({case_id}, {tier})")
    caching = real.cache_flags[geo.ref]
    if case_id == 1:
        return np.flatnonzero(~caching & (geo.winner == tier))
    if case_id == 2:
        pick = geo.relay_over_bs if tier == 2 else ~geo.relay_over_bs
        return np.flatnonzero(caching & pick)
    pick = geo.relay_over_bs if tier == 2 else ~geo.relay_over_bs
    return np.flatnonzero(~caching & (geo.winner == 1) & pick)


def _sinr_samples(real: SpatialRealization, cfg: NetworkConfig, geo: _Geometry,
                  rows: np.ndarray, case_id: int, tier: int, n_fading: int,
                  rng: np.random.Generator, boundary: str) -> np.ndarray:
    """SINR draws, shape (len(rows), n_fading).

    Interferers: every active D2D transmitter, relay and BS except the serving
    node, the reference user itself, and (when the strongest node is a
    cache-enabled user, i.e. case 1/tier 1 and case 3) that nearest
    cache-enabled user.
    """
    if len(rows) == 0:
        return np.empty((0, n_fading))
    beta = cfg.beta
    d2d_served = case_id == 1 and tier == 1

    active_users = np.flatnonzero(real.active_flags)
    out = np.empty((len(rows), n_fading))
    for k, row in enumerate(rows):
        u = geo.ref[row]
        pos = real.users[u][None, :]
        if d2d_served:
            r_serv, p_serv = geo.r_cache[row], cfg.p1
        elif tier == 2:
            r_serv, p_serv = geo.r_relay[row], cfg.p2
        else:
            r_serv, p_serv = geo.r_bs[row], cfg.p3

        exclude_cache = geo.cache_idx[row] if (d2d_served or case_id == 3) else -1
        d2d_idx = active_users[(active_users != u) & (active_users != exclude_cache)]
        weights = []
        if len(d2d_idx) > 0:
            d = _distances(pos, real.users[d2d_idx], real.window, boundary)[0]
            weights.append(cfg.p1 * d ** (-beta))
        relay_mask = np.ones(len(real.relays), dtype=bool)
        bs_mask = np.ones(len(real.bs), dtype=bool)
        if not d2d_served and tier == 2:
            relay_mask[geo.relay_idx[row]] = False
        if not d2d_served and tier == 3:
            bs_mask[geo.bs_idx[row]] = False
        d = _distances(pos, real.relays[relay_mask], real.window, boundary)[0]
        weights.append(cfg.p2 * d ** (-beta))
        d = _distances(pos, real.bs[bs_mask], real.window, boundary)[0]
        weights.append(cfg.p3 * d ** (-beta))
        w = np.concatenate(weights)

        g0 = rng.exponential(size=n_fading)
        interference = w @ rng.exponential(size=(len(w), n_fading))
        out[k] = g0 * p_serv * r_serv ** (-beta) / (interference + cfg.noise)
    return out


def measure_sinr(real: SpatialRealization, cfg: NetworkConfig, case_id: int, tier: int,
                 n_fading: int, seed: int, boundary: str = "margin",
                 margin: float = 500.0, max_users: int | None = None) -> np.ndarray:
    """SINR samples for reference users in one (case, serving tier)."""
    rng = np.random.default_rng(seed)
    ref = edge_correction_policy(real, margin, boundary)
    geo = _geometry(real, cfg, ref, boundary)
    rows = _case_members(geo, real, case_id, tier)
    if max_users is not None and len(rows) > max_users:
        rows = rng.choice(rows, size=max_users, replace=False)
    return _sinr_samples(real, cfg, geo, rows, case_id, tier, n_fading, rng, boundary)


def measure_rate(real: SpatialRealization, cfg: NetworkConfig, case_id: int, tier: int,
                 n_fading: int, seed: int, **kwargs) -> EmpiricalEstimate:
    """Mean of ln(1 + SINR) in nats/s/Hz over users x fading redraws."""
    sinr = measure_sinr(real, cfg, case_id, tier, n_fading, seed, **kwargs)
    if sinr.size == 0:
        return EmpiricalEstimate(math.nan, 0.0, 0)
    vals = np.log1p(sinr)
    per_user = vals.mean(axis=1)
    se = per_user.std(ddof=1) / math.sqrt(len(per_user)) if len(per_user) > 1 else 0.0
    return EmpiricalEstimate(float(per_user.mean()), float(se), int(vals.size))


@dataclass(frozen=True)
class MonteCarloSummary:
    """Aggregated estimates across topology replications.

    ``rates`` maps case id to an ergodic-rate estimate pooled over serving
    tiers (the analytic rates are tier-independent per case); ``outage`` maps
    (case id, linear threshold) likewise; ``association`` maps the
    association fractions.  Standard errors are across replications.
    """

    rates: dict[int, EmpiricalEstimate]
    outage: dict[tuple[int, float], EmpiricalEstimate]
    association: dict[str, EmpiricalEstimate]
    n_topologies: int
    seed: int
    config: dict = field(repr=False, default_factory=dict)


def _across_reps(per_rep: list[float]) -> EmpiricalEstimate:
    vals = np.array([v for v in per_rep if not math.isnan(v)])
    if len(vals) == 0:
        return EmpiricalEstimate(math.nan, 0.0, 0)
    se = vals.std(ddof=1) / math.sqrt(len(vals)) if len(vals) > 1 else 0.0
    return EmpiricalEstimate(float(vals.mean()), float(se), len(vals))


def run_monte_carlo(cfg: NetworkConfig, n_topologies: int = 200, n_fading: int = 20,
                    seed: int = 0, window: float = 2000.0, boundary: str = "margin",
                    margin: float = 500.0, max_users: int = 200,
                    max_reference_users: int = 500,
                    cases: tuple[int, ...] = (1, 2, 3),
                    tau_grid: tuple[float, ...] = ()) -> MonteCarloSummary:
    """Full oracle run: per replication, sample a topology and measure rates,
    outage and association; aggregate with across-replication standard errors.

    Replication seeds are spawned from the master seed; identical inputs give
    bit-identical results.
    """
    if n_topologies < 1:
        raise ValueError("need at least one topology replication")
    children = np.random.SeedSequence(seed).spawn(n_topologies)
    rate_acc: dict[int, list[float]] = {c: [] for c in cases}
    out_acc: dict[tuple[int, float], list[float]] = {
        (c, t): [] for c in cases for t in tau_grid}
    assoc_acc: dict[str, list[float]] = {}

    retry_budget = 20
    for child in children:
        seeds = child.generate_state(retry_budget + 1)
        for attempt in range(retry_budget):  # an empty relay/BS tier is resampled
            real = sample_topology(cfg, window, int(seeds[attempt]))
            if len(real.relays) > 0 and len(real.bs) > 0:
                break
        else:
            raise RuntimeError(
                f"relay/BS tier stayed empty after {retry_budget} resamples; "
                "enlarge the window or raise the densities"
            )
        rng = np.random.default_rng(int(seeds[-1]))
        admissible = edge_correction_policy(real, margin, boundary)
        uniform = admissible
        if len(uniform) > max_reference_users:  # keeps the geometry pass cheap
            uniform = np.sort(rng.choice(uniform, size=max_reference_users, replace=False))
        # sparse conditionings (cache-enabled users at small alpha) get a
        # dedicated quota so their estimates are not starved
        extra = admissible[real.cache_flags[admissible]]
        if len(extra) > max_reference_users:
            extra = np.sort(rng.choice(extra, size=max_reference_users, replace=False))
        ref = np.union1d(uniform, extra)
        geo = _geometry(real, cfg, ref, boundary)
        uniform_rows = np.isin(ref, uniform)

        # association fractions only over the uniform subsample (the cache
        # top-up would bias them)
        winner_u = geo.winner[uniform_rows]
        relay_u = geo.relay_over_bs[uniform_rows]
        n_ref = len(winner_u)
        assoc_acc.setdefault("relay_over_bs", []).append(float(relay_u.mean()))
        for i in (1, 2, 3):
            assoc_acc.setdefault(f"g{i}", []).append(float((winner_u == i).mean()))
        assoc_acc.setdefault("p123", []).append(
            float(((winner_u == 1) & relay_u).sum() / n_ref))
        assoc_acc.setdefault("p132", []).append(
            float(((winner_u == 1) & ~relay_u).sum() / n_ref))

        for case_id in cases:
            if case_id in (2, 3) and cfg.alpha == 0.0:
                continue
            samples = []
            for tier in _CASE_TIERS[case_id]:
                rows = _case_members(geo, real, case_id, tier)
                if len(rows) > max_users:
                    rows = rng.choice(rows, size=max_users, replace=False)
                samples.append(_sinr_samples(real, cfg, geo, rows, case_id, tier,
                                             n_fading, rng, boundary))
            sinr = np.concatenate([s.reshape(-1) for s in samples])
            if sinr.size == 0:
                rate_acc[case_id].append(math.nan)
                for t in tau_grid:
                    out_acc[(case_id, t)].append(math.nan)
                continue
            rate_acc[case_id].append(float(np.log1p(sinr).mean()))
            for t in tau_grid:
                out_acc[(case_id, t)].append(float((sinr <= t).mean()))

    return MonteCarloSummary(
        rates={c: _across_reps(v) for c, v in rate_acc.items()},
        outage={k: _across_reps(v) for k, v in out_acc.items()},
        association={k: _across_reps(v) for k, v in assoc_acc.items()},
        n_topologies=n_topologies,
        seed=seed,
        config=cfg.to_flat_dict(),
    )

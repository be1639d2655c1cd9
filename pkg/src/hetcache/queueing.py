"""Multiclass processor-sharing queues at the serving nodes.

Per serving-node column (d2d, relay, bs, local) each of the 8 user states is
a traffic class.  The service-rate matrix converts case rates to bits/s with
the backhaul penalty on even rows; class loads follow from the state matrix
and the node densities; the analytic stationary metrics, the steady rulers
and the maximum request arrival rate are closed forms.  An exact-jump CTMC
simulator of the same generator provides the stochastic cross-check, and the
no-caching baseline reuses the whole pipeline with a two-tier state matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .association import (
    D2DActivity,
    StateMatrix,
    active_d2d_density,
    pairwise_association_probability,
    three_tier_spec,
)
from .config import NetworkConfig
from .quadrature import DEFAULT_QUAD, QuadratureSpec
from .rates import case_rate_table, rate_case1

N_CLASSES = 8
N_NODE_TYPES = 4
STEADY_NODE_NAMES = ("d2d", "relay", "bs", "local")


@dataclass(frozen=True)
class RateMatrix:
    """8x4 per-class service rates in bits/s; zero exactly where the state
    matrix is zero."""

    a: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=float)
        if a.shape != (N_CLASSES, N_NODE_TYPES):
            raise ValueError("rate matrix must be 8x4")
        if (a < 0.0).any():
            raise ValueError("service rates must be non-negative")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)


def rate_matrix(cfg: NetworkConfig, case_rates: np.ndarray, states: StateMatrix) -> RateMatrix:
    """Service rates: odd rows eta*w*U, even (backhaul) rows eta*w*kappa*U,
    masked by the occupied states."""
    u = np.asarray(case_rates, dtype=float)
    if u.shape != (4, 4):
        raise ValueError("case-rate table must be 4x4")
    a = np.zeros((N_CLASSES, N_NODE_TYPES))
    scale = cfg.eta * cfg.bandwidth_w
    for m in range(4):
        a[2 * m] = scale * u[m]
        a[2 * m + 1] = scale * cfg.backhaul_kappa * u[m]
    a[states.d == 0.0] = 0.0
    return RateMatrix(a)


@dataclass(frozen=True)
class QueueClassLoad:
    """Per-class load at each node type: users per node, request arrival
    rate [requests/s], and traffic demand [bits/s]."""

    n: np.ndarray
    zeta: np.ndarray
    sigma: np.ndarray
    node_densities: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        for name in ("n", "zeta", "sigma"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (N_CLASSES, N_NODE_TYPES):
                raise ValueError(f"{name} must be 8x4")
            if (arr < 0.0).any():
                raise ValueError(f"{name} entries must be non-negative")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def class_loads(cfg: NetworkConfig, states: StateMatrix,
                act: D2DActivity | None = None) -> QueueClassLoad:
    """Split the user population into queue classes.

    Node densities per column are (active D2D TXs, relays, BSs, cache-enabled
    users); n_{i,j} = lambda_0 D_{i,j} / lambda'_j, each user issues requests
    at rate varsigma * lambda_3 / lambda_0.
    """
    act = act or active_d2d_density(cfg)
    node_dens = (act.lambda1_active, cfg.lambda2, cfg.lambda3, cfg.alpha * cfg.lambda0)
    n = np.zeros((N_CLASSES, N_NODE_TYPES))
    for j, lam in enumerate(node_dens):
        col = states.d[:, j]
        if lam == 0.0:
            if (col > 0.0).any():
                raise ValueError(
                    f"node column {j} has zero density but nonzero state probability"
                )
            continue
        n[:, j] = cfg.lambda0 * col / lam
    zeta = n * (cfg.lambda3 * cfg.varsigma / cfg.lambda0)
    sigma = zeta * cfg.content_size_s * cfg.varrho_inv
    return QueueClassLoad(n, zeta, sigma, node_dens)


@dataclass(frozen=True)
class QueueMetrics:
    """Stationary metrics of the processor-sharing queues.

    Per class: mean resident requests, throughput per request [bits/s],
    delay [s]; per node: the aggregates.  Columns with an unstable queue
    (ruler >= 1) carry infinite N/D and zero T; columns with no traffic have
    NaN critical demand and zero occupancy.
    """

    n_class: np.ndarray
    t_class: np.ndarray
    d_class: np.ndarray
    n_node: np.ndarray
    t_node: np.ndarray
    d_node: np.ndarray
    steady_ruler: np.ndarray
    sigma_node: np.ndarray
    sigma_critical: np.ndarray
    stable: np.ndarray


def queue_metrics(cfg: NetworkConfig, loads: QueueClassLoad, rates: RateMatrix) -> QueueMetrics:
    a, sigma, zeta = rates.a, loads.sigma, loads.zeta
    if ((sigma > 0.0) & (a == 0.0)).any():
        raise ValueError("a class with traffic has zero service rate")

    with np.errstate(divide="ignore", invalid="ignore"):
        per_class_load = np.where(sigma > 0.0, sigma / np.where(a > 0.0, a, 1.0), 0.0)
    ruler = per_class_load.sum(axis=0)
    sigma_node = sigma.sum(axis=0)
    zeta_node = zeta.sum(axis=0)
    sigma_crit = np.where(ruler > 0.0, sigma_node / np.where(ruler > 0.0, ruler, 1.0), math.nan)
    stable = ruler < 1.0
    loaded = sigma_node > 0.0

    n_class = np.zeros_like(sigma)
    t_class = np.zeros_like(sigma)
    d_class = np.full_like(sigma, math.nan)
    n_node = np.zeros(N_NODE_TYPES)
    t_node = np.full(N_NODE_TYPES, math.nan)
    d_node = np.full(N_NODE_TYPES, math.nan)

    delay_scale = cfg.content_size_s * cfg.varrho_inv
    for j in range(N_NODE_TYPES):
        if not loaded[j]:
            continue
        if not stable[j]:
            mask = sigma[:, j] > 0.0
            n_class[mask, j] = math.inf
            d_class[mask, j] = math.inf
            n_node[j] = math.inf
            t_node[j] = 0.0
            d_node[j] = math.inf
            continue
        slack = 1.0 - ruler[j]
        active = a[:, j] > 0.0
        n_class[active, j] = sigma[active, j] / (slack * a[active, j])
        t_class[active, j] = slack * a[active, j]
        d_class[active, j] = delay_scale / (slack * a[active, j])
        n_node[j] = sigma_node[j] / (sigma_crit[j] - sigma_node[j])
        t_node[j] = sigma_crit[j] - sigma_node[j]
        d_node[j] = n_node[j] / zeta_node[j]
    return QueueMetrics(n_class, t_class, d_class, n_node, t_node, d_node,
                        ruler, sigma_node, sigma_crit, stable)


@dataclass(frozen=True)
class SteadyAnalysis:
    """Steady rulers at the configured arrival rate, the binding node type,
    and the maximum sustainable arrival rate."""

    rulers: np.ndarray
    binding: int              # column index of the largest ruler
    varsigma: float           # arrival rate the rulers were evaluated at
    varsigma_star: float

    @property
    def binding_node(self) -> str:
        return STEADY_NODE_NAMES[self.binding]


def steady_ruler(cfg: NetworkConfig, loads: QueueClassLoad, rates: RateMatrix) -> SteadyAnalysis:
    """The rulers are linear in the arrival rate, so the supremum of stable
    rates is the closed-form ratio varsigma / max_j ruler_j."""
    a, sigma = rates.a, loads.sigma
    if ((sigma > 0.0) & (a == 0.0)).any():
        raise ValueError("a class with traffic has zero service rate")
    per_class = np.where(sigma > 0.0, sigma / np.where(a > 0.0, a, 1.0), 0.0)
    rulers = per_class.sum(axis=0)
    worst = rulers.max()
    if worst == 0.0:
        raise ValueError("no traffic anywhere; maximum arrival rate is unbounded")
    binding = int(rulers.argmax())
    return SteadyAnalysis(rulers, binding, cfg.varsigma, cfg.varsigma / worst)


def network_model(cfg: NetworkConfig, spec: QuadratureSpec = DEFAULT_QUAD,
                  states: StateMatrix | None = None
                  ) -> tuple[StateMatrix, QueueClassLoad, RateMatrix]:
    """State matrix, class loads and service rates of the cache-enabled network."""
    from .association import state_matrix as _state_matrix

    states = states or _state_matrix(cfg)
    loads = class_loads(cfg, states)
    rates = rate_matrix(cfg, case_rate_table(cfg, spec), states)
    return states, loads, rates


def baseline_state_matrix(cfg: NetworkConfig) -> StateMatrix:
    """No caching anywhere: users associate over relay/BS only, every
    relay-served request needs the backhaul, the BS never does."""
    tiers = three_tier_spec(cfg)
    d = np.zeros((N_CLASSES, N_NODE_TYPES))
    d[0, 2] = pairwise_association_probability(tiers, 3)
    d[1, 1] = pairwise_association_probability(tiers, 2)
    return StateMatrix(d)


def baseline_model(cfg: NetworkConfig, spec: QuadratureSpec = DEFAULT_QUAD
                   ) -> tuple[StateMatrix, QueueClassLoad, RateMatrix]:
    """Loads and rates of the no-caching baseline.

    Rates reuse the case-1 machinery at alpha = 0 (no D2D interference, same
    relay/BS field); class loads reuse the general splitter, which degenerates
    correctly because the D2D and local columns are empty.
    """
    cfg0 = cfg.with_updates(alpha=0.0)
    states = baseline_state_matrix(cfg)
    u = np.zeros((4, 4))
    u[0, 1] = rate_case1(cfg0, 2, spec).value
    u[0, 2] = rate_case1(cfg0, 3, spec).value
    loads = class_loads(cfg0, states)
    rates = rate_matrix(cfg, u, states)
    return states, loads, rates


def baseline_metrics(cfg: NetworkConfig, spec: QuadratureSpec = DEFAULT_QUAD) -> QueueMetrics:
    _, loads, rates = baseline_model(cfg, spec)
    return queue_metrics(cfg, loads, rates)


def throughput_gain(cfg: NetworkConfig, spec: QuadratureSpec = DEFAULT_QUAD) -> dict[str, float]:
    """Relative gain of the cache-enabled maximum arrival rate over the
    no-caching baseline, with both critical rates."""
    _, loads, rates = network_model(cfg, spec)
    cached = steady_ruler(cfg, loads, rates)
    _, bloads, brates = baseline_model(cfg, spec)
    base = steady_ruler(cfg, bloads, brates)
    return {
        "varsigma_star_cached": cached.varsigma_star,
        "varsigma_star_baseline": base.varsigma_star,
        "gain": cached.varsigma_star / base.varsigma_star - 1.0,
    }


@dataclass(frozen=True)
class CtmcTrace:
    """Exact-jump sample path of one node-type queue.

    ``times``/``states`` hold the embedded jump chain (states row r valid on
    [times[r], times[r+1])); ``slot_times``/``slot_occupancy`` are the
    slot-averaged total occupancies used for reporting; ``time_average`` is
    the per-class time-averaged occupancy after the warmup.
    """

    times: np.ndarray
    states: np.ndarray
    slot_times: np.ndarray
    slot_occupancy: np.ndarray
    time_average: np.ndarray
    node_type: int
    seed: int


def ctmc_simulate(cfg: NetworkConfig, loads: QueueClassLoad, rates: RateMatrix,
                  node_type: int, horizon: float, seed: int,
                  slot: float = 0.2, warmup: float = 0.0) -> CtmcTrace:
    """Simulate the multiclass processor-sharing queue at one node type.

    Arrivals are Poisson per class; the server splits its capacity over the
    resident requests, so class i departs at rate (varrho * A_i / S) *
    (x_i / x_total).  Gillespie exact-jump scheme; the holding time is drawn
    from the total outflow rate, the jump from the rate-proportional
    categorical distribution.
    """
    if not 1 <= node_type <= N_NODE_TYPES:
        raise ValueError("node type must be 1..4")
    if horizon <= 0.0:
        raise ValueError("simulation horizon must be positive")
    if not 0.0 <= warmup < horizon:
        raise ValueError("warmup must lie in [0, horizon)")
    j = node_type - 1
    zeta = loads.zeta[:, j].copy()
    # departure rate per resident request when alone: varrho * A / S
    mu = rates.a[:, j] / (cfg.content_size_s * cfg.varrho_inv)
    if ((zeta > 0.0) & (mu == 0.0)).any():
        raise ValueError("a class with arrivals has zero service rate")

    rng = np.random.default_rng(seed)
    x = np.zeros(N_CLASSES, dtype=np.int64)
    t = 0.0
    times = [0.0]
    states = [x.copy()]
    occupancy_time = np.zeros(N_CLASSES)  # integral of x over [warmup, horizon]
    arrival_total = zeta.sum()

    while t < horizon:
        total = x.sum()
        if total > 0:
            dep = mu * (x / total)
        else:
            dep = np.zeros(N_CLASSES)
        out_rate = arrival_total + dep.sum()
        if out_rate == 0.0:
            dt = horizon - t
        else:
            dt = rng.exponential(1.0 / out_rate)
        t_next = min(t + dt, horizon)
        overlap = max(0.0, t_next - max(t, warmup))
        occupancy_time += x * overlap
        t = t_next
        if t >= horizon:
            break
        rates_vec = np.concatenate((zeta, dep))
        k = rng.choice(2 * N_CLASSES, p=rates_vec / out_rate)
        if k < N_CLASSES:
            x[k] += 1
        else:
            x[k - N_CLASSES] -= 1
        times.append(t)
        states.append(x.copy())

    times_arr = np.asarray(times)
    states_arr = np.asarray(states)
    slot_times, slot_occ = _slot_average(times_arr, states_arr.sum(axis=1), horizon, slot)
    time_avg = occupancy_time / (horizon - warmup)
    return CtmcTrace(times_arr, states_arr, slot_times, slot_occ, time_avg,
                     node_type, seed)


def _slot_average(times: np.ndarray, totals: np.ndarray, horizon: float,
                  slot: float) -> tuple[np.ndarray, np.ndarray]:
    """Time-average of the piecewise-constant total occupancy per slot."""
    if slot <= 0.0:
        raise ValueError("slot duration must be positive")
    edges = np.arange(0.0, horizon + slot, slot)
    edges[-1] = min(edges[-1], horizon)
    if edges[-1] <= edges[-2]:
        edges = edges[:-1]
    averages = np.empty(len(edges) - 1)
    for k in range(len(edges) - 1):
        lo, hi = edges[k], edges[k + 1]
        idx = np.searchsorted(times, lo, side="right") - 1
        acc = 0.0
        t = lo
        while idx < len(times) and t < hi:
            t_next = times[idx + 1] if idx + 1 < len(times) else hi
            seg_end = min(t_next, hi)
            acc += totals[idx] * (seg_end - t)
            t = seg_end
            idx += 1
        averages[k] = acc / (hi - lo)
    return edges[:-1], averages


def ctmc_mean_occupancy(cfg: NetworkConfig, loads: QueueClassLoad, rates: RateMatrix,
                        node_type: int, horizon: float, seeds: list[int],
                        warmup: float = 0.0) -> tuple[float, float]:
    """Mean total occupancy across independent replications; returns
    (estimate, standard error)."""
    vals = np.array([
        ctmc_simulate(cfg, loads, rates, node_type, horizon, s, warmup=warmup)
        .time_average.sum()
        for s in seeds
    ])
    se = vals.std(ddof=1) / math.sqrt(len(vals)) if len(vals) > 1 else 0.0
    return float(vals.mean()), float(se)

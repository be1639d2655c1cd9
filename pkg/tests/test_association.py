import itertools
import math

import numpy as np
import pytest
from scipy import integrate

from hetcache import (
    NetworkConfig,
    TierSpec,
    active_d2d_density,
    first_association_probability,
    joint_distance_pdf_case3,
    nearest_distance_pdf,
    ordering_probability,
    state_matrix,
)
from hetcache.association import (
    active_fraction,
    activity_constant,
    pairwise_association_probability,
    relay_bs_spec,
    three_tier_spec,
)


def test_ordering_probabilities_sum_to_one(cfg):
    tiers = three_tier_spec(cfg)
    total = sum(ordering_probability(tiers, p) for p in itertools.permutations((1, 2, 3)))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_first_association_sums_to_one(cfg):
    tiers = three_tier_spec(cfg)
    gs = [first_association_probability(tiers, i) for i in (1, 2, 3)]
    assert sum(gs) == pytest.approx(1.0, abs=1e-14)
    assert ordering_probability(tiers, (1, 2, 3)) + ordering_probability(tiers, (1, 3, 2)) \
        == pytest.approx(gs[0], abs=1e-14)


def test_symmetric_tiers_equal_shares():
    tiers = TierSpec((1e-5, 1e-5, 1e-5), (1.0, 1.0, 1.0), 4.0)
    for i in (1, 2, 3):
        assert first_association_probability(tiers, i) == pytest.approx(1.0 / 3.0)
    assert ordering_probability(tiers, (2, 3, 1)) == pytest.approx(1.0 / 6.0)


def test_ordering_against_sampling_oracle(cfg):
    # nearest distances R_i = sqrt(Exp(1)/(pi*lambda_i)); rank P_i R_i^(-beta)
    tiers = three_tier_spec(cfg)
    rng = np.random.default_rng(12345)
    n = 200_000
    lam = np.asarray(tiers.densities)
    pw = np.asarray(tiers.powers)
    r = np.sqrt(rng.exponential(size=(n, 3)) / (math.pi * lam))
    received = pw * r ** (-cfg.beta)
    order = np.argsort(-received, axis=1) + 1
    for perm in itertools.permutations((1, 2, 3)):
        emp = (order == perm).all(axis=1).mean()
        ana = ordering_probability(tiers, perm)
        se = math.sqrt(ana * (1.0 - ana) / n)
        assert abs(emp - ana) < 4.0 * se + 1e-9


def test_pairwise_association(cfg):
    tiers = three_tier_spec(cfg)
    p2 = pairwise_association_probability(tiers, 2)
    p3 = pairwise_association_probability(tiers, 3)
    assert p2 + p3 == pytest.approx(1.0, abs=1e-14)
    two = relay_bs_spec(cfg)
    assert p2 == pytest.approx(first_association_probability(two, 1), abs=1e-14)


def test_state_matrix_structure(cfg):
    states = state_matrix(cfg)
    d = states.d
    assert d.shape == (8, 4)
    assert d.sum() == pytest.approx(1.0, abs=1e-12)
    # structural zeros: local column only in the case-4 backhaul-free row,
    # D2D column only in the first case-1 row, nothing in the last row
    assert (d[:6, 3] == 0.0).all() and d[7].sum() == 0.0
    assert (d[1:, 0] == 0.0).all()
    # BS-served case 1 never needs the backhaul
    assert d[1, 2] == 0.0
    assert sum(states.case_probability(c) for c in (1, 2, 3, 4)) == pytest.approx(1.0, abs=1e-12)


def test_state_matrix_hand_entries(cfg):
    from hetcache import PopularityModel

    states = state_matrix(cfg)
    pop = PopularityModel(cfg.gamma, cfg.n_contents)
    tiers = three_tier_spec(cfg)
    g1 = first_association_probability(tiers, 1)
    assert states.d[0, 0] == pytest.approx(
        g1 * (1.0 - cfg.alpha) * pop.prefix_sum(1, cfg.m1), rel=1e-12)
    assert states.d[6, 3] == pytest.approx(cfg.alpha * pop.prefix_sum(1, cfg.m1), rel=1e-12)


def test_cases_1_and_4_increase_with_gamma(cfg):
    probs = []
    for gamma in (0.4, 0.8, 1.2, 1.6, 2.0):
        s = state_matrix(cfg.with_updates(gamma=gamma))
        probs.append(s.case_probability(1) + s.case_probability(4))
    assert all(b > a for a, b in zip(probs, probs[1:]))


def test_alpha_zero_degenerates(cfg):
    states = state_matrix(cfg.with_updates(alpha=0.0))
    assert (states.d[:, 0] == 0.0).all()
    assert (states.d[:, 3] == 0.0).all()
    assert states.case_probability(2) == 0.0
    assert states.case_probability(3) == 0.0


def test_nearest_distance_pdf_normalizes(cfg):
    tiers = three_tier_spec(cfg)
    for i, cond in ((1, "case1"), (3, "case1"), (2, "case2")):
        val, _ = integrate.quad(
            lambda x: nearest_distance_pdf(tiers, i, cond, x), 0.0, np.inf)
        assert val == pytest.approx(1.0, rel=1e-8)


def test_joint_pdf_case3_normalizes(cfg):
    tiers = three_tier_spec(cfg)
    for j in (2, 3):
        ratio = (tiers.powers[j - 1] / tiers.powers[0]) ** (1.0 / cfg.beta)
        val, _ = integrate.dblquad(
            lambda y, x: joint_distance_pdf_case3(tiers, j, x, y),
            0.0, 2000.0, lambda x: ratio * x, lambda x: np.inf,
            epsabs=1e-10, epsrel=1e-8)
        assert val == pytest.approx(1.0, rel=1e-4)


def test_joint_pdf_support(cfg):
    tiers = three_tier_spec(cfg)
    ratio = (cfg.p2 / cfg.p1) ** (1.0 / cfg.beta)
    assert joint_distance_pdf_case3(tiers, 2, 100.0, ratio * 100.0 * 0.99) == 0.0
    assert joint_distance_pdf_case3(tiers, 2, 100.0, ratio * 100.0 * 1.01) > 0.0


def test_activity_critical_points(cfg, cfg_lowpower):
    act = active_d2d_density(cfg)
    assert act.alpha_star == pytest.approx(0.1378, abs=5e-4)
    assert act.alpha_hat == pytest.approx(0.2196, abs=5e-4)
    act13 = active_d2d_density(cfg_lowpower)
    assert act13.alpha_star == 0.0
    assert act13.alpha_hat == pytest.approx(0.3162, abs=5e-4)
    assert act13.h == pytest.approx(activity_constant(cfg_lowpower), rel=1e-14)


def test_active_density_continuous_at_alpha_star(cfg):
    a_star = active_d2d_density(cfg).alpha_star
    eps = 1e-9
    lo = active_d2d_density(cfg.with_updates(alpha=a_star - eps)).lambda1_active
    hi = active_d2d_density(cfg.with_updates(alpha=a_star + eps)).lambda1_active
    assert lo == pytest.approx(hi, rel=1e-6)


def test_alpha_hat_maximizes_density(cfg):
    a_hat = active_d2d_density(cfg).alpha_hat
    peak = active_d2d_density(cfg.with_updates(alpha=a_hat)).lambda1_active
    for alpha in np.linspace(0.01, 0.99, 50):
        assert active_d2d_density(cfg.with_updates(alpha=float(alpha))).lambda1_active \
            <= peak + 1e-18


def test_active_fraction(cfg):
    assert active_fraction(cfg.with_updates(alpha=0.05)) == pytest.approx(1.0)
    assert active_fraction(cfg.with_updates(alpha=0.0)) == 0.0
    assert 0.0 < active_fraction(cfg.with_updates(alpha=0.5)) < 1.0


def test_tier_spec_validation():
    with pytest.raises(ValueError):
        TierSpec((1e-5,), (1.0, 2.0), 4.0)
    with pytest.raises(ValueError):
        TierSpec((-1e-5, 1e-5), (1.0, 1.0), 4.0)
    with pytest.raises(ValueError):
        TierSpec((1e-5, 1e-5), (1.0, 0.0), 4.0)
    # zero density is allowed (degenerate D2D tier)
    tiers = TierSpec((0.0, 1e-5), (1.0, 1.0), 4.0)
    assert first_association_probability(tiers, 1) == 0.0


def test_state_matrix_accepts_edge_alphas():
    for alpha in (0.0, 1.0):
        states = state_matrix(NetworkConfig().with_updates(alpha=alpha))
        assert states.d.sum() == pytest.approx(1.0, abs=1e-12)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vipguard.threat import (
    RewardParams,
    ThreatParams,
    bodyguard_reward,
    crt_step,
    distance_regularizer,
    episode_crt,
    residual_threat,
    survival_product,
    team_rewards,
    threat_level,
)
from vipguard.world import EntityState, Kind, WorldState

TP = ThreatParams()
SM = RewardParams(threat_weight=2.0, distance_weight=1.0)

coord = st.floats(-1.5, 1.5, allow_nan=False, allow_infinity=False)


def build_world(vip_pos, guard_pos=(), byst_pos=()):
    ents = [EntityState(np.array(vip_pos, float), np.zeros(2), 0.05, Kind.VIP)]
    for p in guard_pos:
        ents.append(EntityState(np.array(p, float), np.zeros(2), 0.05, Kind.BODYGUARD))
    for p in byst_pos:
        ents.append(EntityState(np.array(p, float), np.zeros(2), 0.05, Kind.BYSTANDER))
    return WorldState.from_entities(ents, comm_dim=2)


worlds = st.builds(
    build_world,
    vip_pos=st.tuples(coord, coord),
    guard_pos=st.lists(st.tuples(coord, coord), max_size=4),
    byst_pos=st.lists(st.tuples(coord, coord), max_size=5),
)


class TestThreatLevel:
    def test_point_values(self):
        assert threat_level(0.0, 1, TP) == 1.0
        assert threat_level(0.2, 1, TP) == pytest.approx(0.5488116360940264, rel=1e-12)
        # Boundary excluded, no sight line zeroes it.
        assert threat_level(0.6, 1, TP) == 0.0
        assert threat_level(0.2, 0, TP) == 0.0

    def test_parameter_scaling(self):
        assert threat_level(0.2, 1, ThreatParams(decay_a=6.0)) == pytest.approx(
            math.exp(-1.2), rel=1e-12
        )
        assert threat_level(0.2, 1, ThreatParams(decay_b=2.0)) == pytest.approx(
            math.exp(-0.3), rel=1e-12
        )

    @given(
        d1=st.floats(0.0, 0.6, allow_nan=False),
        d2=st.floats(0.0, 0.6, allow_nan=False),
    )
    def test_monotone_nonincreasing_in_distance(self, d1, d2):
        lo, hi = sorted((d1, d2))
        assert threat_level(lo, 1, TP) >= threat_level(hi, 1, TP)

    @given(d=st.floats(0.0, 1.0, allow_nan=False))
    def test_bounded_unit_interval(self, d):
        assert 0.0 <= threat_level(d, 1, TP) <= 1.0

    def test_params_validated(self):
        with pytest.raises(ValueError):
            ThreatParams(decay_a=0.0)
        with pytest.raises(ValueError):
            ThreatParams(safe_dist=-0.1)


class TestResidualThreat:
    def test_open_sight_line_equals_threat_level(self):
        w = build_world((0.0, 0.0), byst_pos=[(0.3, 0.0)])
        assert residual_threat(w, 1, TP) == pytest.approx(
            0.4065696597405991, rel=1e-12
        )

    def test_blocking_guard_zeroes_it(self):
        w = build_world((0.0, 0.0), guard_pos=[(0.15, 0.0)], byst_pos=[(0.3, 0.0)])
        assert residual_threat(w, 2, TP) == 0.0

    def test_near_miss_guard_does_not_block(self):
        w = build_world((0.0, 0.0), guard_pos=[(0.15, 0.06)], byst_pos=[(0.3, 0.0)])
        assert residual_threat(w, 2, TP) == pytest.approx(
            0.4065696597405991, rel=1e-12
        )

    def test_out_of_range_is_zero_regardless_of_occlusion(self):
        w = build_world((0.0, 0.0), byst_pos=[(0.6, 0.0), (1.0, 1.0)])
        assert residual_threat(w, 1, TP) == 0.0
        assert residual_threat(w, 2, TP) == 0.0

    @given(w=worlds)
    @settings(max_examples=60)
    def test_residual_never_exceeds_unoccluded(self, w):
        for b in w.bystander_indices:
            vip_pos = w.positions[w.vip_index]
            dist = float(np.hypot(*(w.positions[b] - vip_pos)))
            assert residual_threat(w, b, TP) <= threat_level(dist, 1, TP) + 1e-15

    @given(w=worlds, gx=coord, gy=coord)
    @settings(max_examples=60)
    def test_adding_a_guard_never_raises_threat(self, w, gx, gy):
        before = [residual_threat(w, b, TP) for b in w.bystander_indices]
        ents = w.entities()
        ents.append(
            EntityState(np.array([gx, gy]), np.zeros(2), 0.05, Kind.BODYGUARD)
        )
        w2 = WorldState.from_entities(ents, comm_dim=2)
        # Entity indices are preserved: the new guard is appended last.
        for b, rt_before in zip(w.bystander_indices, before):
            assert residual_threat(w2, b, TP) <= rt_before + 1e-15


class TestAggregates:
    def test_survival_and_step_hand_values(self):
        w = build_world((0.0, 0.0), byst_pos=[(0.2, 0.0), (0.3, 0.0)])
        assert survival_product(w, TP) == pytest.approx(0.2677488643138043, rel=1e-12)
        assert crt_step(w, TP) == pytest.approx(0.7322511356861957, rel=1e-12)

    def test_no_bystanders_no_threat(self):
        w = build_world((0.0, 0.0), guard_pos=[(0.3, 0.0)])
        assert survival_product(w, TP) == 1.0
        assert crt_step(w, TP) == 0.0

    @given(w=worlds)
    @settings(max_examples=60)
    def test_step_value_in_unit_interval(self, w):
        assert 0.0 <= crt_step(w, TP) <= 1.0

    def test_episode_crt_rectangle_rule(self):
        assert episode_crt([0.5] * 25, 0.1) == pytest.approx(1.25)
        assert episode_crt([], 0.1) == 0.0
        # 25 saturated steps give the metric ceiling.
        assert episode_crt([1.0] * 25, 0.1) == pytest.approx(2.5)

    @given(
        vals=st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=25, max_size=25)
    )
    def test_episode_crt_bounds(self, vals):
        assert 0.0 <= episode_crt(vals, 0.1) <= 2.5 + 1e-12


class TestReward:
    def test_regularizer_annulus(self):
        vip = np.zeros(2)
        assert distance_regularizer(np.array([0.3, 0.0]), vip, SM) == 0.0
        # Both band edges are inside.
        assert distance_regularizer(np.array([0.1, 0.0]), vip, SM) == 0.0
        assert distance_regularizer(np.array([0.6, 0.0]), vip, SM) == 0.0
        assert distance_regularizer(np.array([0.05, 0.0]), vip, SM) == -1.0
        assert distance_regularizer(np.array([0.7, 0.0]), vip, SM) == -1.0

    def test_team_reward_hand_value(self):
        # Guard in band, out of the sight line; lone bystander at 0.3.
        w = build_world((0.0, 0.0), guard_pos=[(0.0, -0.3)], byst_pos=[(0.3, 0.0)])
        r = team_rewards(w, TP, SM)
        assert r.shape == (1,)
        expected = 2.0 * (-1.0 + (1.0 - 0.4065696597405991))
        assert r[0] == pytest.approx(expected, rel=1e-12)

    def test_zero_reward_iff_no_threat_and_in_band(self):
        w = build_world((0.0, 0.0), guard_pos=[(0.3, 0.0)], byst_pos=[(1.2, 1.2)])
        assert bodyguard_reward(w, 1, TP, SM) == 0.0
        # Same world with the guard out of band loses exactly beta.
        w2 = build_world((0.0, 0.0), guard_pos=[(0.8, 0.0)], byst_pos=[(1.2, 1.2)])
        assert bodyguard_reward(w2, 1, TP, SM) == -SM.distance_weight

    def test_marking_guard_restores_full_threat_term(self):
        # The guard blocks the only sight line: shared term collapses to 0.
        w = build_world((0.0, 0.0), guard_pos=[(0.15, 0.0)], byst_pos=[(0.3, 0.0)])
        assert bodyguard_reward(w, 1, TP, SM) == 0.0

    @given(w=worlds)
    @settings(max_examples=60)
    def test_reward_bounds(self, w):
        if not w.bodyguard_indices:
            return
        lo = -(SM.threat_weight + SM.distance_weight)
        for r in team_rewards(w, TP, SM):
            assert lo - 1e-12 <= r <= 0.0

    @given(w=worlds, dx=coord, dy=coord)
    @settings(max_examples=40)
    def test_translation_invariance(self, w, dx, dy):
        if not w.bodyguard_indices:
            return
        r1 = team_rewards(w, TP, SM)
        shifted = w.entities()
        for e in shifted:
            e.position = e.position + np.array([dx, dy])
        w2 = WorldState.from_entities(shifted, comm_dim=2)
        r2 = team_rewards(w2, TP, SM)
        assert np.allclose(r1, r2, atol=1e-9)

    def test_reward_params_validated(self):
        with pytest.raises(ValueError):
            RewardParams(threat_weight=0.0, distance_weight=1.0)
        with pytest.raises(ValueError):
            RewardParams(threat_weight=1.0, distance_weight=-0.5)
        with pytest.raises(ValueError):
            RewardParams(threat_weight=1.0, distance_weight=1.0, min_dist=0.7)

    def test_non_guard_rejected(self):
        w = build_world((0.0, 0.0), guard_pos=[(0.3, 0.0)], byst_pos=[(0.5, 0.5)])
        with pytest.raises(ValueError):
            bodyguard_reward(w, w.vip_index, TP, SM)

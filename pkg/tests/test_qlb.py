import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vipguard.qlb import QUADRANT_SPAN, QlbState, qlb_actions
from vipguard.world import ConfigurationError, EntityState, Kind, PhysicsConfig, WorldState

coord = st.floats(-1.4, 1.4, allow_nan=False, allow_infinity=False)


def build_world(vip_pos=(0.0, 0.0), vip_vel=(0.0, 0.0), guard_pos=(), byst_pos=()):
    ents = [EntityState(np.array(vip_pos, float), np.array(vip_vel, float), 0.05, Kind.VIP)]
    for p in guard_pos:
        ents.append(EntityState(np.array(p, float), np.zeros(2), 0.05, Kind.BODYGUARD))
    for p in byst_pos:
        ents.append(EntityState(np.array(p, float), np.zeros(2), 0.05, Kind.BYSTANDER))
    return WorldState.from_entities(ents, comm_dim=2)


def ring(radius, angles, center=(0.0, 0.0)):
    return [
        (center[0] + radius * math.cos(a), center[1] + radius * math.sin(a))
        for a in angles
    ]


BISECTORS = [q * QUADRANT_SPAN for q in range(4)]


class TestValidation:
    def test_needs_exactly_four_guards(self):
        for n in (3, 5):
            w = build_world(guard_pos=ring(0.2, BISECTORS[:3] + [0.1] * (n - 3)))
            with pytest.raises(ConfigurationError):
                qlb_actions(w, QlbState())

    def test_positive_parameters(self):
        for kw in ({"standoff_radius": 0.0}, {"gain": -1.0}, {"watch_radius": 0.0}):
            with pytest.raises(ConfigurationError):
                QlbState(**kw)


class TestPosts:
    def test_guards_on_bisector_posts_feel_no_force(self):
        # Empty quadrants put the posts on the bisectors; a guard already at
        # its post has zero positional error.
        state = QlbState()
        w = build_world(guard_pos=ring(state.standoff_radius, BISECTORS))
        forces = qlb_actions(w, state)
        assert np.allclose(forces, 0.0, atol=1e-12)
        assert sorted(state.assignment) == [0, 1, 2, 3]

    def test_single_bystander_pulls_its_quadrant_post(self):
        # One bystander at bearing 0.3 sits in the ahead quadrant; its post
        # rotates from the bisector to the bystander's bearing.
        state = QlbState()
        angles = [0.3] + BISECTORS[1:]
        w = build_world(
            guard_pos=ring(state.standoff_radius, angles),
            byst_pos=ring(0.5, [0.3]),
        )
        forces = qlb_actions(w, state)
        assert np.allclose(forces, 0.0, atol=1e-10)

    def test_watch_radius_excludes_far_bystanders(self):
        state = QlbState()
        w = build_world(
            guard_pos=ring(state.standoff_radius, BISECTORS),
            byst_pos=ring(state.watch_radius + 0.05, [0.3]),
        )
        assert np.allclose(qlb_actions(w, state), 0.0, atol=1e-12)

    def test_far_guard_force_saturates(self):
        state = QlbState()
        w = build_world(guard_pos=[(1.4, 1.4), (-1.4, 1.4), (-1.4, -1.4), (1.4, -1.4)])
        forces = qlb_actions(w, state)
        assert np.all(np.abs(forces) <= 1.0)
        assert np.any(np.abs(forces) == 1.0)


class TestHeading:
    def test_fast_vip_sets_heading(self):
        state = QlbState(heading=0.0)
        w = build_world(vip_vel=(0.0, 0.3), guard_pos=ring(0.2, BISECTORS))
        qlb_actions(w, state)
        assert state.heading == pytest.approx(math.pi / 2.0)

    def test_slow_vip_keeps_heading(self):
        state = QlbState(heading=1.1)
        w = build_world(vip_vel=(0.01, 0.0), guard_pos=ring(0.2, BISECTORS))
        qlb_actions(w, state)
        assert state.heading == 1.1

    def test_quadrant_frame_follows_heading(self):
        # With the VIP moving +y, the ahead post points +y; guards parked on
        # the rotated bisectors read zero force.
        state = QlbState()
        rotated = [math.pi / 2.0 + a for a in BISECTORS]
        w = build_world(vip_vel=(0.0, 0.3), guard_pos=ring(state.standoff_radius, rotated))
        assert np.allclose(qlb_actions(w, state), 0.0, atol=1e-10)


class TestAssignment:
    def test_heaviest_quadrant_assigns_first(self):
        # Two bystanders behind, one ahead: the behind quadrant picks its
        # guard first and takes the one already behind.
        state = QlbState()
        w = build_world(
            guard_pos=ring(state.standoff_radius, BISECTORS),
            byst_pos=ring(0.5, [math.pi - 0.1, math.pi + 0.1, 0.0]),
        )
        qlb_actions(w, state)
        assert state.assignment[2] == 2
        assert state.assignment[0] == 0

    def test_assignment_prefers_short_arc_not_euclidean(self):
        # All guards bunched at bearing pi/4; the tie-break cascade still
        # produces a bijection rather than stacking guards on one post.
        state = QlbState()
        w = build_world(guard_pos=ring(0.3, [0.7853, 0.7854, 0.7855, 0.7856]))
        qlb_actions(w, state)
        assert sorted(state.assignment) == [0, 1, 2, 3]

    @settings(max_examples=80, deadline=None)
    @given(
        guards=st.lists(st.tuples(coord, coord), min_size=4, max_size=4),
        bysts=st.lists(st.tuples(coord, coord), max_size=6),
        heading=st.floats(-math.pi, math.pi),
    )
    def test_assignment_is_bijection(self, guards, bysts, heading):
        state = QlbState(heading=heading)
        w = build_world(guard_pos=guards, byst_pos=bysts)
        forces = qlb_actions(w, state)
        assert sorted(state.assignment) == [0, 1, 2, 3]
        assert forces.shape == (4, 2)
        assert np.all(np.abs(forces) <= 1.0)

    @settings(max_examples=40, deadline=None)
    @given(
        guards=st.lists(st.tuples(coord, coord), min_size=4, max_size=4),
        bysts=st.lists(st.tuples(coord, coord), max_size=6),
        vel=st.tuples(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0)),
    )
    def test_rerun_is_idempotent(self, guards, bysts, vel):
        state = QlbState()
        w = build_world(vip_vel=vel, guard_pos=guards, byst_pos=bysts)
        first = qlb_actions(w, state)
        second = qlb_actions(w, state)
        assert np.array_equal(first, second)


class TestSteadyState:
    def test_guards_settle_inside_reward_band(self):
        # From a spread-out start, proportional control parks every guard in
        # the annulus the distance regularizer pays for. The arrival transient
        # is allowed to bounce off the VIP; the parked formation is not.
        physics = PhysicsConfig()
        state = QlbState()
        w = build_world(guard_pos=[(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -0.9)])
        for step in range(80):
            forces = np.zeros((5, 2))
            forces[1:] = qlb_actions(w, state)
            w = step_world_guarded(w, forces, physics)
            if step >= 65:
                vip = w.positions[w.vip_index]
                for g in w.bodyguard_indices:
                    d = float(np.linalg.norm(w.positions[g] - vip))
                    assert 0.1 <= d <= 0.6

    def test_escort_spawn_stays_inside_reward_band(self):
        # From the in-episode spawn distance there is no overshoot at all.
        physics = PhysicsConfig()
        state = QlbState()
        w = build_world(guard_pos=ring(0.15, BISECTORS))
        for step in range(25):
            forces = np.zeros((5, 2))
            forces[1:] = qlb_actions(w, state)
            w = step_world_guarded(w, forces, physics)
            vip = w.positions[w.vip_index]
            for g in w.bodyguard_indices:
                d = float(np.linalg.norm(w.positions[g] - vip))
                assert 0.1 <= d <= 0.6


def step_world_guarded(w, forces, physics):
    from vipguard.world import step_world

    return step_world(w, forces, np.zeros((4, 2)), physics)

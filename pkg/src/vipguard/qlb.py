"""Quadrant load balancing: the hand-written bodyguard baseline.

The plane around the VIP splits into four quadrants aligned with the VIP's
heading. Each bodyguard is assigned one quadrant, heaviest crowd first, and
holds a post at a fixed standoff radius on that quadrant's bisector, shifted
toward the angular centroid of the in-range bystanders it must screen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import circular_mean, wrap_angle
from .world import ConfigurationError, WorldState

QUADRANT_SPAN = math.pi / 2.0


@dataclass
class QlbState:
    standoff_radius: float = 0.12
    gain: float = 80.0
    # Bystanders inside this radius drive quadrant counts and post angles.
    # Wider than the threat's SafeDist on purpose: posts settle onto an
    # approach bearing before the approacher becomes an active threat.
    watch_radius: float = 0.8
    # Heading below this VIP speed is carried over from the last fast step,
    # so the quadrant frame holds still while the VIP throttles or idles.
    heading_hold_speed: float = 0.05
    heading: float = field(default=0.0, compare=False)
    # Last computed guard-slot -> quadrant map, kept for introspection.
    assignment: Optional[tuple[int, int, int, int]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if min(self.standoff_radius, self.gain, self.watch_radius) <= 0.0:
            raise ConfigurationError("qlb parameters must be positive")


def qlb_actions(world: WorldState, state: QlbState) -> np.ndarray:
    """Forces for all four bodyguards under quadrant load balancing.

    Assignment is recomputed from scratch every call: quadrants ordered by
    descending bystander count (ties by quadrant index), each taking the
    nearest still-unassigned guard (ties by lower guard slot), so guard count
    must equal quadrant count. Forces are proportional control toward the
    post, clamped to the unit box.
    """
    guards = world.bodyguard_indices
    if len(guards) != 4:
        raise ConfigurationError(
            f"quadrant load balancing needs exactly 4 bodyguards, got {len(guards)}"
        )
    vip = world.positions[world.vip_index]
    vip_vel = world.velocities[world.vip_index]
    speed = math.hypot(float(vip_vel[0]), float(vip_vel[1]))
    if speed >= state.heading_hold_speed:
        state.heading = math.atan2(float(vip_vel[1]), float(vip_vel[0]))
    heading = state.heading

    # Quadrant boundaries sit on the diagonals so the bisectors point ahead,
    # left, behind, and right. A boundary dead ahead would flip a head-on
    # bystander between two quadrants on every jitter and churn the whole
    # assignment.
    members: list[list[float]] = [[], [], [], []]
    for b in world.bystander_indices:
        rel = world.positions[b] - vip
        if math.hypot(float(rel[0]), float(rel[1])) >= state.watch_radius:
            continue
        phi = math.atan2(float(rel[1]), float(rel[0])) - heading
        q = min(int(wrap_angle(phi + QUADRANT_SPAN / 2.0) / QUADRANT_SPAN), 3)
        members[q].append(phi)

    posts = np.empty((4, 2))
    for q in range(4):
        if members[q]:
            angle = wrap_angle(circular_mean(members[q]))
        else:
            angle = q * QUADRANT_SPAN
        world_angle = heading + angle
        posts[q] = vip + state.standoff_radius * np.array(
            [math.cos(world_angle), math.sin(world_angle)]
        )

    # Guards travel along the ring, so assignment cost is angular distance
    # from the guard's current bearing to the post bearing. Euclidean cost
    # would happily send a guard straight through the VIP disk, where it
    # stalls against the contact spring and shoves the VIP for several steps.
    def arc_cost(slot: int, q: int) -> float:
        g_rel = world.positions[guards[slot]] - vip
        g_bearing = math.atan2(float(g_rel[1]), float(g_rel[0]))
        p_rel = posts[q] - vip
        p_bearing = math.atan2(float(p_rel[1]), float(p_rel[0]))
        gap = wrap_angle(g_bearing - p_bearing)
        return min(gap, 2.0 * math.pi - gap)

    counts = [len(m) for m in members]
    order = sorted(range(4), key=lambda q: (-counts[q], q))
    unassigned = list(range(4))
    assignment: list[int] = [0, 0, 0, 0]
    for q in order:
        best = min(unassigned, key=lambda slot: (arc_cost(slot, q), slot))
        assignment[best] = q
        unassigned.remove(best)

    forces = np.empty((4, 2))
    for slot in range(4):
        error = posts[assignment[slot]] - world.positions[guards[slot]]
        forces[slot] = np.clip(state.gain * error, -1.0, 1.0)
    state.assignment = tuple(assignment)
    return forces

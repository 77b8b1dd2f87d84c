"""Threat model and bodyguard reward.

A bystander with line of sight to the VIP inside the safe distance carries a
threat level that decays exponentially with distance. Bodyguard disks occlude
the sight line; what survives is the residual threat. Per-step combined threat
is 1 minus the product of the per-bystander survival factors, and its time
integral over an episode (rectangle rule at the simulator dt) is the primary
evaluation metric. The bodyguard reward mixes the shared threat term with a
per-agent annulus regularizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import line_of_sight
from .world import WorldState


@dataclass(frozen=True)
class ThreatParams:
    decay_a: float = 3.0
    decay_b: float = 1.0
    safe_dist: float = 0.6

    def __post_init__(self) -> None:
        if self.decay_a <= 0.0 or self.decay_b <= 0.0 or self.safe_dist <= 0.0:
            raise ValueError("threat parameters must be positive")


@dataclass(frozen=True)
class RewardParams:
    threat_weight: float  # alpha: weight on the shared threat term
    distance_weight: float  # beta: weight on the per-agent annulus regularizer
    min_dist: float = 0.1
    safe_dist: float = 0.6

    def __post_init__(self) -> None:
        if self.threat_weight <= 0.0 or self.distance_weight < 0.0:
            raise ValueError("weights must satisfy alpha > 0, beta >= 0")
        if not 0.0 < self.min_dist < self.safe_dist:
            raise ValueError("need 0 < min_dist < safe_dist")


def threat_level(dist: float, los: int, p: ThreatParams) -> float:
    """exp(-a*dist/b) when in sight and strictly inside safe_dist, else 0."""
    if los != 1 or dist >= p.safe_dist:
        return 0.0
    return math.exp(-p.decay_a * dist / p.decay_b)


def residual_threat(world: WorldState, bystander: int, p: ThreatParams) -> float:
    """Threat level surviving bodyguard occlusion of the VIP-bystander segment."""
    vip_pos = world.positions[world.vip_index]
    b_pos = world.positions[bystander]
    dist = float(np.hypot(*(b_pos - vip_pos)))
    if dist >= p.safe_dist:
        return 0.0  # out of range: skip the occlusion test entirely
    los = line_of_sight(vip_pos, b_pos, world.bodyguard_disks())
    return threat_level(dist, los, p)


def survival_product(world: WorldState, p: ThreatParams) -> float:
    """prod_i (1 - RT_i) over all bystanders, accumulated in entity order."""
    out = 1.0
    for b in world.bystander_indices:
        out *= 1.0 - residual_threat(world, b, p)
    return out


def crt_step(world: WorldState, p: ThreatParams) -> float:
    """Per-step combined residual threat, 1 - prod_i(1 - RT_i), in [0, 1]."""
    return 1.0 - survival_product(world, p)


def episode_crt(step_values: Sequence[float], dt: float) -> float:
    """Rectangle-rule integral of the per-step values over the episode."""
    return float(sum(step_values) * dt)


def distance_regularizer(
    bodyguard_pos: np.ndarray, vip_pos: np.ndarray, p: RewardParams
) -> float:
    """0 inside the [min_dist, safe_dist] annulus around the VIP, else -1."""
    dist = float(np.hypot(*(np.asarray(bodyguard_pos) - np.asarray(vip_pos))))
    if p.min_dist <= dist <= p.safe_dist:
        return 0.0
    return -1.0


def team_rewards(world: WorldState, tp: ThreatParams, rp: RewardParams) -> np.ndarray:
    """Reward for every bodyguard: alpha*(-1 + prod(1-RT)) + beta*D_i.

    The threat term is shared across the team; the regularizer is per agent.
    One array per world snapshot keeps the shared product bitwise identical
    across agents and across reward relabelings of the same geometry.
    """
    shared = rp.threat_weight * (-1.0 + survival_product(world, tp))
    vip_pos = world.positions[world.vip_index]
    return np.array(
        [
            shared
            + rp.distance_weight
            * distance_regularizer(world.positions[g], vip_pos, rp)
            for g in world.bodyguard_indices
        ],
        dtype=np.float64,
    )


def bodyguard_reward(
    world: WorldState, bodyguard: int, tp: ThreatParams, rp: RewardParams
) -> float:
    """Single-agent view of team_rewards; range [-(alpha+beta), 0]."""
    guards = world.bodyguard_indices
    if bodyguard not in guards:
        raise ValueError(f"entity {bodyguard} is not a bodyguard")
    return float(team_rewards(world, tp, rp)[guards.index(bodyguard)])

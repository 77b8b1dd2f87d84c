"""Deterministic 2D particle world: entity state, physics stepping, observations.

Entities live in a square arena. Mobile entities (VIP, bodyguards, bystanders)
integrate damped point dynamics under commanded forces plus pairwise contact
repulsion; landmarks never move and never collide. Every operation is pure
take-and-return so that equal seeds and actions give bitwise-equal runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class Kind:
    VIP = "vip"
    BODYGUARD = "bodyguard"
    BYSTANDER = "bystander"
    LANDMARK = "landmark"


MOBILE_KINDS = (Kind.VIP, Kind.BODYGUARD, Kind.BYSTANDER)


class ConfigurationError(ValueError):
    """Raised when an input's shape or content contradicts the configuration."""


@dataclass(frozen=True)
class PhysicsConfig:
    dt: float = 0.1
    damping: float = 0.25
    max_speed: float = 1.3
    contact_stiffness: float = 50.0
    arena_half_extent: float = 1.5
    mobile_radius: float = 0.05
    landmark_radius: float = 0.08

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ConfigurationError("dt must be positive")
        if not 0.0 <= self.damping < 1.0:
            raise ConfigurationError("damping must lie in [0, 1)")
        if self.max_speed <= 0.0:
            raise ConfigurationError("max_speed must be positive")


@dataclass(frozen=True)
class ObservationSpec:
    nearest_bystanders: int = 5
    comm_dim: int = 2
    include_vip: bool = True

    def length(self, n_bodyguards: int) -> int:
        return 8 + 4 * self.nearest_bystanders + (n_bodyguards - 1) * (4 + self.comm_dim)


@dataclass
class EntityState:
    position: np.ndarray
    velocity: np.ndarray
    radius: float
    kind: str

    def __post_init__(self) -> None:
        self.position = np.asarray(self.position, dtype=np.float64).copy()
        self.velocity = np.asarray(self.velocity, dtype=np.float64).copy()
        if self.radius <= 0.0:
            raise ValueError("entity radius must be positive")
        if not np.all(np.isfinite(self.position)):
            raise ValueError("entity position must be finite")
        if self.kind == Kind.LANDMARK and np.any(self.velocity != 0.0):
            raise ValueError("landmarks must have zero velocity")


@dataclass
class WorldState:
    """Array-backed world snapshot.

    positions/velocities are (n, 2), radii (n,), kinds a tuple of Kind strings
    in entity order. utterances holds each bodyguard's last emitted c-vector.
    """

    positions: np.ndarray
    velocities: np.ndarray
    radii: np.ndarray
    kinds: tuple[str, ...]
    utterances: np.ndarray
    sim_time: int = 0
    rng: np.random.Generator = field(
        default_factory=lambda: np.random.default_rng(0)
    )

    @classmethod
    def from_entities(
        cls,
        entities: Sequence[EntityState],
        comm_dim: int,
        rng: np.random.Generator | None = None,
    ) -> "WorldState":
        kinds = tuple(e.kind for e in entities)
        n_guards = kinds.count(Kind.BODYGUARD)
        world = cls(
            positions=np.stack([e.position for e in entities]).astype(np.float64),
            velocities=np.stack([e.velocity for e in entities]).astype(np.float64),
            radii=np.array([e.radius for e in entities], dtype=np.float64),
            kinds=kinds,
            utterances=np.zeros((n_guards, comm_dim), dtype=np.float64),
            sim_time=0,
            rng=rng if rng is not None else np.random.default_rng(0),
        )
        world.validate()
        return world

    def validate(self) -> None:
        if self.kinds.count(Kind.VIP) != 1:
            raise ConfigurationError("world must contain exactly one VIP")
        if not np.all(np.isfinite(self.positions)):
            raise ConfigurationError("positions must be finite")
        n_guards = self.kinds.count(Kind.BODYGUARD)
        if self.utterances.shape[0] != n_guards:
            raise ConfigurationError("one utterance row per bodyguard required")
        landmark = np.array([k == Kind.LANDMARK for k in self.kinds])
        if np.any(self.velocities[landmark] != 0.0):
            raise ConfigurationError("landmarks must have zero velocity")

    # Entity-index accessors. Entity id is the index into the ordered lists.
    @property
    def n_entities(self) -> int:
        return len(self.kinds)

    @property
    def vip_index(self) -> int:
        return self.kinds.index(Kind.VIP)

    @property
    def bodyguard_indices(self) -> tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.kinds) if k == Kind.BODYGUARD)

    @property
    def bystander_indices(self) -> tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.kinds) if k == Kind.BYSTANDER)

    @property
    def landmark_indices(self) -> tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.kinds) if k == Kind.LANDMARK)

    @property
    def mobile_indices(self) -> tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.kinds) if k != Kind.LANDMARK)

    def entity(self, index: int) -> EntityState:
        return EntityState(
            position=self.positions[index].copy(),
            velocity=self.velocities[index].copy(),
            radius=float(self.radii[index]),
            kind=self.kinds[index],
        )

    def entities(self) -> list[EntityState]:
        return [self.entity(i) for i in range(self.n_entities)]

    def bodyguard_disks(self) -> list[tuple[np.ndarray, float]]:
        return [(self.positions[i], float(self.radii[i])) for i in self.bodyguard_indices]


def step_world(
    world: WorldState,
    forces: np.ndarray,
    utterances: np.ndarray,
    cfg: PhysicsConfig,
) -> WorldState:
    """Advance one step. forces rows follow the mobile entities in entity order.

    Dynamics per mobile entity: v <- v*(1-damping) + f_total*dt with the speed
    clamped to max_speed, then p <- p + v*dt clamped to the arena square.
    f_total adds contact repulsion (stiffness * overlap along the center line)
    for every overlapping mobile pair, computed before integration. Coincident
    centers push the higher-index entity toward +x, a fixed deterministic tie.
    """
    mobile = list(world.mobile_indices)
    forces = np.asarray(forces, dtype=np.float64)
    utterances = np.asarray(utterances, dtype=np.float64)
    if forces.shape != (len(mobile), 2):
        raise ConfigurationError(
            f"expected forces of shape {(len(mobile), 2)}, got {forces.shape}"
        )
    if utterances.shape != world.utterances.shape:
        raise ConfigurationError(
            f"expected utterances of shape {world.utterances.shape}, got {utterances.shape}"
        )
    if not np.all(np.isfinite(forces)) or not np.all(np.isfinite(utterances)):
        raise ConfigurationError("forces and utterances must be finite")
    if np.any(np.abs(forces) > 1.0 + 1e-12):
        raise ConfigurationError("force components must lie in [-1, 1]")

    pos = world.positions.copy()
    vel = world.velocities.copy()

    mpos = pos[mobile]
    mrad = world.radii[mobile]
    total = forces.copy()

    # Pairwise linear spring repulsion between overlapping mobile entities.
    delta = mpos[None, :, :] - mpos[:, None, :]  # delta[i, j] = p_j - p_i
    dist = np.sqrt(np.sum(delta * delta, axis=-1))
    overlap = mrad[:, None] + mrad[None, :] - dist
    np.fill_diagonal(overlap, -1.0)
    hit_i, hit_j = np.nonzero(overlap > 0.0)
    for i, j in zip(hit_i, hit_j):
        if i >= j:
            continue  # each unordered pair once
        d = dist[i, j]
        if d > 0.0:
            direction = delta[i, j] / d
        else:
            direction = np.array([1.0, 0.0])  # push higher index toward +x
        push = cfg.contact_stiffness * overlap[i, j] * direction
        total[i] -= push
        total[j] += push

    new_vel = vel[mobile] * (1.0 - cfg.damping) + total * cfg.dt
    speed = np.sqrt(np.sum(new_vel * new_vel, axis=-1))
    too_fast = speed > cfg.max_speed
    if np.any(too_fast):
        new_vel[too_fast] *= (cfg.max_speed / speed[too_fast])[:, None]
    vel[mobile] = new_vel
    pos[mobile] = np.clip(
        pos[mobile] + new_vel * cfg.dt,
        -cfg.arena_half_extent,
        cfg.arena_half_extent,
    )

    return WorldState(
        positions=pos,
        velocities=vel,
        radii=world.radii.copy(),
        kinds=world.kinds,
        utterances=utterances.copy(),
        sim_time=world.sim_time + 1,
        rng=world.rng,
    )


def observe(world: WorldState, agent_index: int, spec: ObservationSpec) -> np.ndarray:
    """Build a bodyguard's observation vector.

    Layout: own velocity (2), own position (2), VIP relative position (2),
    VIP relative velocity (2), then the m_obs nearest bystanders (relative
    position and velocity each, nearest first, distance ties broken by lower
    entity index), then every other bodyguard's relative position and velocity
    in entity order, then every other bodyguard's last utterance.
    """
    if agent_index not in world.bodyguard_indices:
        raise ValueError(f"entity {agent_index} is not a bodyguard")
    if not spec.include_vip:
        raise ConfigurationError("observations without VIP state are unsupported")
    bystanders = world.bystander_indices
    if not 1 <= spec.nearest_bystanders <= len(bystanders):
        raise ConfigurationError(
            f"nearest_bystanders must lie in [1, {len(bystanders)}]"
        )

    own_pos = world.positions[agent_index]
    own_vel = world.velocities[agent_index]
    vip = world.vip_index

    parts = [own_vel, own_pos]
    parts.append(world.positions[vip] - own_pos)
    parts.append(world.velocities[vip] - own_vel)

    dists = [
        (float(np.hypot(*(world.positions[b] - own_pos))), b) for b in bystanders
    ]
    dists.sort()  # (distance, index): index breaks ties low-first
    for _, b in dists[: spec.nearest_bystanders]:
        parts.append(world.positions[b] - own_pos)
        parts.append(world.velocities[b] - own_vel)

    guards = world.bodyguard_indices
    for g in guards:
        if g == agent_index:
            continue
        parts.append(world.positions[g] - own_pos)
        parts.append(world.velocities[g] - own_vel)
    own_slot = guards.index(agent_index)
    for slot, g in enumerate(guards):
        if slot == own_slot:
            continue
        parts.append(world.utterances[slot])

    return np.concatenate(parts)

"""Seeded scenario construction and scripted VIP/bystander controllers.

Four scenarios share one cast: 1 VIP walking landmark-to-landmark, 4 bodyguards
spawned around it, 10 scripted bystanders. Scenario flavor lives in landmark
placement and the bystander behavior classes: random waypoint walkers, Vicsek
street walkers headed off-arena, and a rule-abiding crowd behind a line with a
single unruly chaser. Every draw comes from named SeedSequence streams so the
same (scenario, seed) reproduces the same instance bitwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .geometry import circular_mean
from .world import ConfigurationError, EntityState, Kind, PhysicsConfig, WorldState

SCENARIO_NAMES = ("random_landmark", "shopping_mall", "street", "pie_in_the_face")

_ALIASES = {
    "random_landmark": "random_landmark",
    "rl": "random_landmark",
    "shopping_mall": "shopping_mall",
    "sm": "shopping_mall",
    "mall": "shopping_mall",
    "street": "street",
    "pie_in_the_face": "pie_in_the_face",
    "pie": "pie_in_the_face",
}


@dataclass(frozen=True)
class ScenarioId:
    name: str

    def __post_init__(self) -> None:
        if self.name not in SCENARIO_NAMES:
            raise ConfigurationError(f"unknown scenario {self.name!r}; choose from {SCENARIO_NAMES}")

    @classmethod
    def parse(cls, text: str) -> "ScenarioId":
        key = text.strip().lower()
        if key not in _ALIASES:
            raise ConfigurationError(f"unknown scenario {text!r}; choose from {SCENARIO_NAMES}")
        return cls(_ALIASES[key])

    @property
    def ordinal(self) -> int:
        return SCENARIO_NAMES.index(self.name)

    def onehot(self) -> np.ndarray:
        g = np.zeros(len(SCENARIO_NAMES), dtype=np.float64)
        g[self.ordinal] = 1.0
        return g

    def __str__(self) -> str:
        return self.name


ALL_SCENARIOS = tuple(ScenarioId(name) for name in SCENARIO_NAMES)


@dataclass(frozen=True)
class ScenarioParams:
    n_bodyguards: int = 4
    n_bystanders: int = 10
    personal_space: float = 0.15
    spawn_radius: float = 0.3
    vicsek_radius: float = 0.3
    vicsek_noise: float = 0.2
    street_speed: float = 0.78  # commanded force magnitude, 0.6 * default max_speed
    pie_line_offset: float = 0.25
    pie_crowd_clearance: float = 0.55  # nearest crowd home this far past the line
    crowd_gain: float = 3.0
    landmark_seed: int = 1
    bystander_seed: int = 2


# Per-bystander controller state. One entry per bystander, in entity order.
@dataclass
class WaypointWalker:
    target_slot: int  # index into the landmark list


@dataclass
class StreetWalker:
    heading: float
    waypoint: np.ndarray
    side: int  # sign of the exit edge on x


@dataclass
class CrowdStander:
    home: np.ndarray


@dataclass
class Intruder:
    pass


Controller = Union[WaypointWalker, StreetWalker, CrowdStander, Intruder]


@dataclass
class ScenarioInstance:
    sid: ScenarioId
    world: WorldState
    vip_destination: int  # landmark entity index
    vip_start: int
    controllers: list[Controller]
    params: ScenarioParams
    physics: PhysicsConfig
    rng: np.random.Generator
    boundary_line: Optional[tuple[np.ndarray, np.ndarray]] = None

    @property
    def unruly_count(self) -> int:
        return sum(isinstance(c, Intruder) for c in self.controllers)


def _stream(*keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in keys]))


def _unit_toward(target: np.ndarray, pos: np.ndarray) -> np.ndarray:
    delta = target - pos
    dist = float(np.hypot(*delta))
    if dist < 1e-12:
        return np.zeros(2)
    return delta / dist


def make_scenario(
    sid: ScenarioId,
    seed: int,
    params: ScenarioParams | None = None,
    physics: PhysicsConfig | None = None,
    comm_dim: int = 2,
) -> ScenarioInstance:
    """Build a fresh world for (sid, seed).

    Streams: landmark placement from [landmark_seed, seed, 0], bystander spawn
    from [bystander_seed, seed, 1], ongoing controller noise from
    [bystander_seed, seed, 2], the world's own generator from [seed, 4].
    """
    params = params if params is not None else ScenarioParams()
    physics = physics if physics is not None else PhysicsConfig()
    he = physics.arena_half_extent
    land_rng = _stream(params.landmark_seed, seed, 0)
    byst_rng = _stream(params.bystander_seed, seed, 1)
    ctrl_rng = _stream(params.bystander_seed, seed, 2)
    world_rng = _stream(seed, 4)

    boundary_line: Optional[tuple[np.ndarray, np.ndarray]] = None

    if sid.name == "random_landmark":
        landmark_pos = land_rng.uniform(-he, he, size=(12, 2))
        start_slot, dest_slot = (int(i) for i in land_rng.choice(12, size=2, replace=False))
    elif sid.name == "shopping_mall":
        ring = he - 0.25
        angles = 2.0 * math.pi * np.arange(12) / 12.0
        landmark_pos = ring * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        start_slot, dest_slot = (int(i) for i in land_rng.choice(12, size=2, replace=False))
    elif sid.name == "street":
        # Straight walk along y=0, entering at the left edge and aiming past
        # the right one; the destination sits outside the arena on purpose.
        landmark_pos = np.array([[-(he - 0.1), 0.0], [he + 0.5, 0.0]])
        start_slot, dest_slot = 0, 1
    elif sid.name == "pie_in_the_face":
        xs = np.linspace(-(he - 0.3), he - 0.3, 6)
        landmark_pos = np.stack([xs, np.zeros(6)], axis=1)
        start_slot, dest_slot = 0, 5
        boundary_line = (
            np.array([-he, params.pie_line_offset]),
            np.array([he, params.pie_line_offset]),
        )
    else:  # pragma: no cover - ScenarioId already validates
        raise ConfigurationError(f"unhandled scenario {sid.name}")

    vip_pos = landmark_pos[start_slot].copy()

    entities: list[EntityState] = [
        EntityState(vip_pos, np.zeros(2), physics.mobile_radius, Kind.VIP)
    ]
    # Escort diamond around the VIP, oriented along the initial walk
    # direction. Guards and VIP share the same top speed, so a guard that
    # starts out of position behind a walking VIP can never catch up; the
    # formation has to be in place from the first step.
    walk = landmark_pos[dest_slot] - vip_pos
    walk_angle = math.atan2(float(walk[1]), float(walk[0]))
    formation_radius = params.spawn_radius / 2.0
    for k in range(params.n_bodyguards):
        bearing = walk_angle + 2.0 * math.pi * k / params.n_bodyguards
        offset = formation_radius * np.array([math.cos(bearing), math.sin(bearing)])
        pos = np.clip(vip_pos + offset, -he, he)
        entities.append(EntityState(pos, np.zeros(2), physics.mobile_radius, Kind.BODYGUARD))

    controllers: list[Controller] = []
    if sid.name in ("random_landmark", "shopping_mall"):
        for _ in range(params.n_bystanders):
            pos = byst_rng.uniform(-he, he, size=2)
            entities.append(EntityState(pos, np.zeros(2), physics.mobile_radius, Kind.BYSTANDER))
            controllers.append(WaypointWalker(target_slot=int(byst_rng.integers(12))))
    elif sid.name == "street":
        for _ in range(params.n_bystanders):
            pos = byst_rng.uniform(-he, he, size=2)
            heading = float(byst_rng.uniform(0.0, 2.0 * math.pi))
            side = 1 if byst_rng.random() < 0.5 else -1
            wp_y = float(byst_rng.uniform(-0.9, 0.9))
            entities.append(EntityState(pos, np.zeros(2), physics.mobile_radius, Kind.BYSTANDER))
            controllers.append(
                StreetWalker(heading=heading, waypoint=np.array([side * (he + 1.0), wp_y]), side=side)
            )
    else:  # pie_in_the_face
        homes = []
        # Rule-abiding spectators stand clear of the carpet: the clearance
        # keeps every home outside SafeDist of the path even when the VIP is
        # jostled a little sideways, so the residual threat on a clean walk
        # comes from the unruly bystander alone.
        for _ in range(params.n_bystanders):
            home = np.array(
                [
                    byst_rng.uniform(-(he - 0.2), he - 0.2),
                    params.pie_line_offset
                    + byst_rng.uniform(params.pie_crowd_clearance, 1.0),
                ]
            )
            homes.append(np.clip(home, -he, he))
        unruly_index = int(byst_rng.integers(params.n_bystanders))
        for i, home in enumerate(homes):
            entities.append(EntityState(home, np.zeros(2), physics.mobile_radius, Kind.BYSTANDER))
            controllers.append(Intruder() if i == unruly_index else CrowdStander(home=home.copy()))

    landmark_entity_offset = len(entities)
    for pos in landmark_pos:
        entities.append(EntityState(pos, np.zeros(2), physics.landmark_radius, Kind.LANDMARK))

    world = WorldState.from_entities(entities, comm_dim=comm_dim, rng=world_rng)
    return ScenarioInstance(
        sid=sid,
        world=world,
        vip_destination=landmark_entity_offset + dest_slot,
        vip_start=landmark_entity_offset + start_slot,
        controllers=controllers,
        params=params,
        physics=physics,
        rng=ctrl_rng,
        boundary_line=boundary_line,
    )


def vip_action(inst: ScenarioInstance) -> np.ndarray:
    """Unit force toward the destination, throttled by bystander proximity.

    The magnitude is clamp((nearest bystander distance - personal_space) /
    personal_space, 0, 1): full speed with everyone at least two personal
    spaces away, a dead stop with anyone inside one. Zero once the VIP is
    inside the destination landmark's radius; it idles there.
    """
    world = inst.world
    vip = world.vip_index
    vip_pos = world.positions[vip]
    dest_pos = world.positions[inst.vip_destination]
    delta = dest_pos - vip_pos
    dist = float(np.hypot(*delta))
    if dist <= float(world.radii[inst.vip_destination]):
        return np.zeros(2)
    nearest = min(
        float(np.hypot(*(world.positions[b] - vip_pos)))
        for b in world.bystander_indices
    )
    ps = inst.params.personal_space
    magnitude = min(1.0, (nearest - ps) / ps)
    magnitude = max(0.0, magnitude)
    return magnitude * (delta / dist)


def bystander_actions(inst: ScenarioInstance) -> np.ndarray:
    """Scripted force for every bystander, one row per bystander in entity order.

    Waypoint walkers push unit force at their target landmark and resample a
    distinct one on arrival. Street walkers first synchronously update their
    Vicsek headings (circular mean over neighbors within the interaction
    radius, plus uniform noise in [-eta, eta]), then push a constant-magnitude
    force blending the heading 50/50 with the direction to their off-arena
    waypoint. Crowd standers hold their home spot with proportional control;
    the intruder pushes unit force straight at the VIP.
    """
    world = inst.world
    params = inst.params
    bystanders = world.bystander_indices
    forces = np.zeros((len(bystanders), 2))

    street = [i for i, c in enumerate(inst.controllers) if isinstance(c, StreetWalker)]
    new_headings: dict[int, float] = {}
    if street:
        pos = {i: world.positions[bystanders[i]] for i in street}
        for i in street:
            neighbor_headings = [
                inst.controllers[j].heading
                for j in street
                if float(np.hypot(*(pos[j] - pos[i]))) <= params.vicsek_radius
            ]
            mean = circular_mean(neighbor_headings)
            noise = float(inst.rng.uniform(-params.vicsek_noise, params.vicsek_noise))
            new_headings[i] = mean + noise
        for i in street:  # commit after all means are taken: synchronous update
            inst.controllers[i].heading = new_headings[i]

    landmarks = world.landmark_indices
    vip_pos = world.positions[world.vip_index]

    for i, ctrl in enumerate(inst.controllers):
        b_pos = world.positions[bystanders[i]]
        if isinstance(ctrl, WaypointWalker):
            target = landmarks[ctrl.target_slot]
            if float(np.hypot(*(world.positions[target] - b_pos))) <= float(
                world.radii[target]
            ):
                shifted = int(inst.rng.integers(len(landmarks) - 1))
                ctrl.target_slot = shifted + 1 if shifted >= ctrl.target_slot else shifted
                target = landmarks[ctrl.target_slot]
            forces[i] = _unit_toward(world.positions[target], b_pos)
        elif isinstance(ctrl, StreetWalker):
            heading_vec = np.array([math.cos(ctrl.heading), math.sin(ctrl.heading)])
            blend = 0.5 * heading_vec + 0.5 * _unit_toward(ctrl.waypoint, b_pos)
            norm = float(np.hypot(*blend))
            direction = heading_vec if norm < 1e-12 else blend / norm
            forces[i] = params.street_speed * direction
        elif isinstance(ctrl, CrowdStander):
            forces[i] = np.clip(params.crowd_gain * (ctrl.home - b_pos), -1.0, 1.0)
        else:  # Intruder
            forces[i] = _unit_toward(vip_pos, b_pos)
    return forces


def post_step(inst: ScenarioInstance) -> None:
    """Scenario bookkeeping after a physics step.

    Street walkers pinned against their exit edge re-enter from the opposite
    edge (same lane, same heading, same waypoint) so the crowd size stays
    constant. Other scenarios need nothing.
    """
    if inst.sid.name != "street":
        return
    he = inst.physics.arena_half_extent
    bystanders = inst.world.bystander_indices
    for i, ctrl in enumerate(inst.controllers):
        if not isinstance(ctrl, StreetWalker):
            continue
        x = inst.world.positions[bystanders[i], 0]
        if ctrl.side * x >= he - 1e-9:
            inst.world.positions[bystanders[i], 0] = -ctrl.side * (he - 0.02)

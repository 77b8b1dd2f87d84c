"""Run configuration: every tunable in one flat namespace of dotted keys.

A config file is lines of `key = value` with `#` comments; unknown keys and
type mismatches are rejected by name, omitted keys take their defaults, and
save followed by load reproduces the configuration exactly (floats go
through repr). The same keys are what `--set key=value` accepts on the
command line.
"""

from __future__ import annotations

import math
from typing import Any, Iterable, Union

from .qlb import QlbState
from .scenarios import ScenarioParams
from .threat import RewardParams, ThreatParams
from .trainer import EnvSetup, TrainConfig
from .world import ConfigurationError, ObservationSpec, PhysicsConfig

SCENARIO_REWARD_DEFAULTS = {
    "random_landmark": (2.0, 2.0),
    "shopping_mall": (2.0, 1.0),
    "street": (2.5, 2.0),
    "pie_in_the_face": (4.0, 1.0),
}

DEFAULTS: tuple[tuple[str, Any], ...] = (
    ("physics.dt", 0.1),
    ("physics.damping", 0.25),
    ("physics.max_speed", 1.3),
    ("physics.contact_stiffness", 50.0),
    ("physics.arena_half_extent", 1.5),
    ("physics.mobile_radius", 0.05),
    ("physics.landmark_radius", 0.08),
    ("threat.decay_a", 3.0),
    ("threat.decay_b", 1.0),
    ("threat.safe_dist", 0.6),
    ("reward.min_dist", 0.1),
    ("reward.random_landmark.alpha", 2.0),
    ("reward.random_landmark.beta", 2.0),
    ("reward.shopping_mall.alpha", 2.0),
    ("reward.shopping_mall.beta", 1.0),
    ("reward.street.alpha", 2.5),
    ("reward.street.beta", 2.0),
    ("reward.pie_in_the_face.alpha", 4.0),
    ("reward.pie_in_the_face.beta", 1.0),
    ("obs.nearest_bystanders", 5),
    ("obs.comm_dim", 2),
    ("scenario.n_bodyguards", 4),
    ("scenario.n_bystanders", 10),
    ("scenario.personal_space", 0.15),
    ("scenario.spawn_radius", 0.3),
    ("scenario.vicsek_radius", 0.3),
    ("scenario.vicsek_noise", 0.2),
    ("scenario.street_speed", 0.78),
    ("scenario.pie_line_offset", 0.25),
    ("scenario.pie_crowd_clearance", 0.55),
    ("scenario.crowd_gain", 3.0),
    ("qlb.standoff_radius", 0.12),
    ("qlb.gain", 80.0),
    ("qlb.watch_radius", 0.8),
    ("train.mode", "maupg"),
    ("train.episodes", 5000),
    ("train.gamma", 0.75),
    ("train.polyak_decay", 0.99),
    ("train.lr", 0.001),
    ("train.batch_size", 1024),
    ("train.buffer_capacity", 10_000_000),
    ("train.episode_length", 25),
    ("train.cycles_per_episode", 4),
    ("train.noise_sigma_start", 0.3),
    ("train.noise_sigma_final", 0.05),
    ("train.noise_anneal_frac", 0.5),
    ("train.checkpoint_interval", 500),
    ("train.grad_clip", math.inf),
    ("train.value_floor", -20.0),
    ("train.action_reg", 0.001),
    ("train.utterance_reg", 0.1),
    ("eval.episodes", 100),
    ("seeds.landmark", 1),
    ("seeds.bystander", 2),
    ("seeds.training", 0),
    ("seeds.eval", 1_000_000),
)

_DEFAULT_MAP = dict(DEFAULTS)


def _parse_value(key: str, text: str) -> Any:
    default = _DEFAULT_MAP[key]
    text = text.strip()
    if isinstance(default, bool):
        if text == "true":
            return True
        if text == "false":
            return False
        raise ConfigurationError(f"{key} expects true or false, got {text!r}")
    if isinstance(default, int):
        try:
            return int(text)
        except ValueError:
            raise ConfigurationError(f"{key} expects an integer, got {text!r}") from None
    if isinstance(default, float):
        try:
            return float(text)
        except ValueError:
            raise ConfigurationError(f"{key} expects a number, got {text!r}") from None
    return text


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class RunConfig:
    """Immutable view over the flat key table; build domain objects from it."""

    def __init__(self, values: dict[str, Any]) -> None:
        unknown = sorted(set(values) - set(_DEFAULT_MAP))
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        merged = dict(_DEFAULT_MAP)
        merged.update(values)
        self._values = merged

    @classmethod
    def defaults(cls) -> "RunConfig":
        return cls({})

    @classmethod
    def parse(cls, text: str, source: str = "<string>") -> "RunConfig":
        values: dict[str, Any] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"{source}:{lineno}: expected key = value")
            key, _, value_text = line.partition("=")
            key = key.strip()
            if key not in _DEFAULT_MAP:
                raise ConfigurationError(f"{source}:{lineno}: unknown config key {key!r}")
            if key in values:
                raise ConfigurationError(f"{source}:{lineno}: duplicate key {key!r}")
            values[key] = _parse_value(key, value_text)
        return cls(values)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.parse(fh.read(), source=path)

    def get(self, key: str) -> Any:
        if key not in self._values:
            raise ConfigurationError(f"unknown config key {key!r}")
        return self._values[key]

    def with_overrides(
        self, overrides: Union[dict[str, Any], Iterable[tuple[str, str]]]
    ) -> "RunConfig":
        """New config with keys replaced; string values are parsed, typed
        values are taken as-is (their type must match the default's)."""
        items = overrides.items() if isinstance(overrides, dict) else overrides
        values = dict(self._values)
        for key, value in items:
            if key not in _DEFAULT_MAP:
                raise ConfigurationError(f"unknown config key {key!r}")
            if isinstance(value, str) and not isinstance(_DEFAULT_MAP[key], str):
                value = _parse_value(key, value)
            default = _DEFAULT_MAP[key]
            if isinstance(default, bool) != isinstance(value, bool) or not isinstance(
                value, type(default)
            ):
                if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
                    value = float(value)
                else:
                    raise ConfigurationError(
                        f"{key} expects {type(default).__name__}, got {type(value).__name__}"
                    )
            values[key] = value
        return RunConfig(values)

    def dumps(self) -> str:
        lines = ["# vipguard run configuration"]
        for key, _ in DEFAULTS:
            lines.append(f"{key} = {_format_value(self._values[key])}")
        return "\n".join(lines) + "\n"

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    def as_dict(self) -> dict[str, Any]:
        return dict(self._values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RunConfig):
            return NotImplemented
        return self._values == other._values

    def __repr__(self) -> str:
        changed = {
            k: v for k, v in self._values.items() if v != _DEFAULT_MAP[k]
        }
        return f"RunConfig({changed!r})"

    # Domain-object builders. Each reads only its own key group, so an
    # invalid combination fails in the owning dataclass with its own message.

    def physics(self) -> PhysicsConfig:
        return PhysicsConfig(
            dt=self.get("physics.dt"),
            damping=self.get("physics.damping"),
            max_speed=self.get("physics.max_speed"),
            contact_stiffness=self.get("physics.contact_stiffness"),
            arena_half_extent=self.get("physics.arena_half_extent"),
            mobile_radius=self.get("physics.mobile_radius"),
            landmark_radius=self.get("physics.landmark_radius"),
        )

    def threat(self) -> ThreatParams:
        return ThreatParams(
            decay_a=self.get("threat.decay_a"),
            decay_b=self.get("threat.decay_b"),
            safe_dist=self.get("threat.safe_dist"),
        )

    def obs_spec(self) -> ObservationSpec:
        return ObservationSpec(
            nearest_bystanders=self.get("obs.nearest_bystanders"),
            comm_dim=self.get("obs.comm_dim"),
        )

    def scenario_params(self) -> ScenarioParams:
        return ScenarioParams(
            n_bodyguards=self.get("scenario.n_bodyguards"),
            n_bystanders=self.get("scenario.n_bystanders"),
            personal_space=self.get("scenario.personal_space"),
            spawn_radius=self.get("scenario.spawn_radius"),
            vicsek_radius=self.get("scenario.vicsek_radius"),
            vicsek_noise=self.get("scenario.vicsek_noise"),
            street_speed=self.get("scenario.street_speed"),
            pie_line_offset=self.get("scenario.pie_line_offset"),
            pie_crowd_clearance=self.get("scenario.pie_crowd_clearance"),
            crowd_gain=self.get("scenario.crowd_gain"),
            landmark_seed=self.get("seeds.landmark"),
            bystander_seed=self.get("seeds.bystander"),
        )

    def reward_params(self, scenario_name: str) -> RewardParams:
        if scenario_name not in SCENARIO_REWARD_DEFAULTS:
            raise ConfigurationError(f"no reward weights for scenario {scenario_name!r}")
        return RewardParams(
            threat_weight=self.get(f"reward.{scenario_name}.alpha"),
            distance_weight=self.get(f"reward.{scenario_name}.beta"),
            min_dist=self.get("reward.min_dist"),
            safe_dist=self.get("threat.safe_dist"),
        )

    def rewards(self) -> dict[str, RewardParams]:
        return {name: self.reward_params(name) for name in SCENARIO_REWARD_DEFAULTS}

    def qlb_state(self) -> QlbState:
        return QlbState(
            standoff_radius=self.get("qlb.standoff_radius"),
            gain=self.get("qlb.gain"),
            watch_radius=self.get("qlb.watch_radius"),
        )

    def env_setup(self) -> EnvSetup:
        return EnvSetup(
            physics=self.physics(),
            obs_spec=self.obs_spec(),
            scenario_params=self.scenario_params(),
            threat=self.threat(),
            rewards=self.rewards(),
            qlb=self.qlb_state(),
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            mode=self.get("train.mode"),
            episodes=self.get("train.episodes"),
            gamma=self.get("train.gamma"),
            polyak_decay=self.get("train.polyak_decay"),
            lr=self.get("train.lr"),
            batch_size=self.get("train.batch_size"),
            buffer_capacity=self.get("train.buffer_capacity"),
            episode_length=self.get("train.episode_length"),
            cycles_per_episode=self.get("train.cycles_per_episode"),
            noise_sigma_start=self.get("train.noise_sigma_start"),
            noise_sigma_final=self.get("train.noise_sigma_final"),
            noise_anneal_frac=self.get("train.noise_anneal_frac"),
            checkpoint_interval=self.get("train.checkpoint_interval"),
            grad_clip=self.get("train.grad_clip"),
            value_floor=self.get("train.value_floor"),
            action_reg=self.get("train.action_reg"),
            utterance_reg=self.get("train.utterance_reg"),
        )

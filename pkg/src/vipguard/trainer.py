"""Training and evaluation: episode rollouts, hindsight scenario relabeling,
centralized-critic policy updates, and the mode ladder from fixed-scenario
learners to the scenario-conditioned universal policy.

Modes:
  maddpg_single      one fixed scenario, no scenario input anywhere
  maddpg_sampled     scenarios sampled per episode, still no scenario input
  maupg_no_hindsight scenario one-hot fed to actors and critics
  maupg              same, plus every step stored twice: once with the rolled
                     scenario's rewards and once relabeled under a freshly
                     sampled scenario, which also becomes the next episode's
                     scenario

All randomness flows through named SeedSequence streams keyed off one training
seed, so a rerun with the same config reproduces every file byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .nets import AdamState, Mlp, adam_init, adam_step, mlp_backward, mlp_forward, mlp_init, polyak_update
from .qlb import QlbState, qlb_actions
from .replay import JointTransition, ReplayBuffer
from .scenarios import (
    ALL_SCENARIOS,
    ScenarioId,
    ScenarioInstance,
    ScenarioParams,
    bystander_actions,
    make_scenario,
    post_step,
    vip_action,
)
from .threat import RewardParams, ThreatParams, crt_step, episode_crt, team_rewards
from .world import ConfigurationError, ObservationSpec, PhysicsConfig, WorldState, observe, step_world

MODES = ("maddpg_single", "maddpg_sampled", "maupg_no_hindsight", "maupg")
G_DIM = 4


def _stream(*keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in keys]))


def derive_episode_seed(base_seed: int, episode: int) -> int:
    """Stable per-episode world seed; episode index is mixed in, not added."""
    ss = np.random.SeedSequence([int(base_seed), int(episode)])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class EnvSetup:
    """Everything the trainer needs about the world, bundled once."""

    physics: PhysicsConfig
    obs_spec: ObservationSpec
    scenario_params: ScenarioParams
    threat: ThreatParams
    rewards: dict[str, RewardParams]
    qlb: QlbState = field(default_factory=QlbState)

    @property
    def obs_dim(self) -> int:
        return self.obs_spec.length(self.scenario_params.n_bodyguards)

    @property
    def act_dim(self) -> int:
        return 2 + self.obs_spec.comm_dim

    @property
    def n_agents(self) -> int:
        return self.scenario_params.n_bodyguards


@dataclass
class TrainConfig:
    mode: str = "maupg"
    episodes: int = 5000
    gamma: float = 0.75
    polyak_decay: float = 0.99
    lr: float = 0.001
    batch_size: int = 1024
    buffer_capacity: int = 10_000_000
    episode_length: int = 25
    cycles_per_episode: int = 4
    noise_sigma_start: float = 0.3
    noise_sigma_final: float = 0.05
    noise_anneal_frac: float = 0.5
    checkpoint_interval: int = 500
    grad_clip: float = math.inf
    # Most negative per-step reward in the scenario table is -(alpha+beta) =
    # -5, so no true action value can fall below -5/(1-gamma) = -20 at the
    # default gamma. Bootstrap targets are projected into [value_floor, 0];
    # set to -inf to disable.
    value_floor: float = -20.0
    # L2 anchor on raw actor outputs; see actor_update for why the
    # communication channel needs one.
    action_reg: float = 1e-3
    # Extra L2 on the utterance slice only; keeps the reward-free channel
    # quiet so the critic's action gradient concentrates on the forces.
    utterance_reg: float = 0.1

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown mode {self.mode!r}; choose from {MODES}")
        if self.value_floor > 0.0:
            raise ConfigurationError("value_floor must not be positive")
        if self.action_reg < 0.0:
            raise ConfigurationError("action_reg must be nonnegative")
        if self.utterance_reg < 0.0:
            raise ConfigurationError("utterance_reg must be nonnegative")
        for name in (
            "episodes",
            "gamma",
            "polyak_decay",
            "lr",
            "batch_size",
            "buffer_capacity",
            "episode_length",
            "cycles_per_episode",
        ):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")

    @property
    def uses_scenario_input(self) -> bool:
        return self.mode in ("maupg_no_hindsight", "maupg")


def paper_budget_episodes(mode: str, scenarios: Sequence[ScenarioId]) -> int:
    """Published episode budgets: 8000 for the single random-landmark run,
    5000 for the other single-scenario runs, 9000 for every multi-scenario
    (universal) mode."""
    if mode == "maddpg_single":
        if len(scenarios) == 1 and scenarios[0].name == "random_landmark":
            return 8000
        return 5000
    return 9000


@dataclass
class AgentNets:
    actor: Mlp
    critic: Mlp
    target_actor: Mlp
    target_critic: Mlp
    actor_opt: AdamState
    critic_opt: AdamState


def build_agent_nets(
    n_agents: int,
    obs_dim: int,
    act_dim: int,
    g_dim: int,
    lr: float,
    seed: int,
) -> list[AgentNets]:
    """Per-agent actor/critic pairs with target copies.

    Actors map own observation (plus the scenario one-hot when g_dim > 0) to
    force and utterance. Critics map the concatenation of every agent's
    observation and action (plus the one-hot) to one value and start with a
    zeroed output layer so the first TD targets equal the raw rewards.
    """
    nets = []
    for a in range(n_agents):
        actor = mlp_init(obs_dim + g_dim, act_dim, _stream(seed, a, 0))
        critic = mlp_init(
            n_agents * (obs_dim + act_dim) + g_dim,
            1,
            _stream(seed, a, 1),
            zero_output=True,
        )
        nets.append(
            AgentNets(
                actor=actor,
                critic=critic,
                target_actor=actor.copy(),
                target_critic=critic.copy(),
                actor_opt=adam_init(actor, lr),
                critic_opt=adam_init(critic, lr),
            )
        )
    return nets


@dataclass
class RawStep:
    """One executed step: the post-step world and what the agents saw and did."""

    world: WorldState
    obs: np.ndarray  # (n_agents, obs_dim), observations the actions used
    actions: np.ndarray  # (n_agents, act_dim), as executed (noisy, clamped)
    next_obs: np.ndarray  # (n_agents, obs_dim)


ActFn = Callable[[ScenarioInstance, np.ndarray, int], tuple[np.ndarray, np.ndarray]]


def _observe_team(inst: ScenarioInstance, spec: ObservationSpec) -> np.ndarray:
    return np.stack(
        [observe(inst.world, i, spec) for i in inst.world.bodyguard_indices]
    )


def _rollout(
    inst: ScenarioInstance, act_fn: ActFn, spec: ObservationSpec, steps: int
) -> list[RawStep]:
    """Drive the world for a fixed number of steps; no early termination."""
    trajectory: list[RawStep] = []
    obs = _observe_team(inst, spec)
    world = inst.world
    mobile = list(world.mobile_indices)
    row_of = {e: r for r, e in enumerate(mobile)}
    vip_row = row_of[world.vip_index]
    guard_rows = [row_of[i] for i in world.bodyguard_indices]
    byst_rows = [row_of[i] for i in world.bystander_indices]

    for t in range(steps):
        guard_forces, utterances = act_fn(inst, obs, t)
        forces = np.zeros((len(mobile), 2))
        forces[vip_row] = vip_action(inst)
        forces[byst_rows] = bystander_actions(inst)
        forces[guard_rows] = guard_forces
        inst.world = step_world(inst.world, forces, utterances, inst.physics)
        post_step(inst)
        next_obs = _observe_team(inst, spec)
        actions = np.concatenate([guard_forces, utterances], axis=1)
        trajectory.append(
            RawStep(world=inst.world, obs=obs, actions=actions, next_obs=next_obs)
        )
        obs = next_obs
    return trajectory


def _actor_act_fn(
    nets: Sequence[AgentNets],
    g_onehot: Optional[np.ndarray],
    noise_sigma: float,
    noise_rng: Optional[np.random.Generator],
) -> ActFn:
    def act(inst: ScenarioInstance, obs: np.ndarray, t: int) -> tuple[np.ndarray, np.ndarray]:
        n = len(nets)
        forces = np.zeros((n, 2))
        utterances = np.zeros((n, nets[0].actor.out_dim - 2))
        for slot, agent in enumerate(nets):
            x = obs[slot] if g_onehot is None else np.concatenate([obs[slot], g_onehot])
            y, _ = mlp_forward(agent.actor, x)
            force = y[:2]
            if noise_sigma > 0.0:
                force = force + noise_rng.normal(0.0, noise_sigma, size=2)
            forces[slot] = np.clip(force, -1.0, 1.0)
            utterances[slot] = y[2:]
        return forces, utterances

    return act


def run_episode(
    inst: ScenarioInstance,
    nets: Sequence[AgentNets],
    g_onehot: Optional[np.ndarray],
    noise_sigma: float,
    noise_rng: Optional[np.random.Generator],
    obs_spec: ObservationSpec,
    episode_length: int = 25,
) -> list[RawStep]:
    """Roll one episode under the current actors.

    Gaussian exploration noise lands on the force components only, which are
    then clamped to [-1, 1]; utterances pass through untouched. Pass g_onehot
    as None for the modes whose networks take no scenario input.
    """
    expected = inst.world.utterances.shape[1] + 2
    if nets[0].actor.out_dim != expected:
        raise ConfigurationError(
            f"actor output dim {nets[0].actor.out_dim} does not match force+utterance {expected}"
        )
    in_dim = obs_spec.length(len(nets)) + (0 if g_onehot is None else len(g_onehot))
    if nets[0].actor.in_dim != in_dim:
        raise ConfigurationError(
            f"actor input dim {nets[0].actor.in_dim} does not match observation{'+scenario' if g_onehot is not None else ''} {in_dim}"
        )
    if noise_sigma > 0.0 and noise_rng is None:
        raise ConfigurationError("exploration noise requires a noise rng")
    act = _actor_act_fn(nets, g_onehot, noise_sigma, noise_rng)
    return _rollout(inst, act, obs_spec, episode_length)


def label_trajectory(
    trajectory: Sequence[RawStep],
    scenario: ScenarioId,
    tp: ThreatParams,
    rp: RewardParams,
) -> list[JointTransition]:
    """Joint transitions with rewards recomputed from each stored snapshot."""
    out = []
    hot = scenario.onehot()
    for step in trajectory:
        out.append(
            JointTransition(
                obs=step.obs,
                actions=step.actions,
                rewards=team_rewards(step.world, tp, rp),
                next_obs=step.next_obs,
                scenario_onehot=hot,
            )
        )
    return out


def hindsight_augment(
    trajectory: Sequence[RawStep],
    g: ScenarioId,
    k: ScenarioId,
    tp: ThreatParams,
    rp_g: RewardParams,
    rp_k: RewardParams,
) -> list[JointTransition]:
    """Two stores per step: rewards under g tagged g, rewards under k tagged k.

    The threat geometry is the stored snapshot either way; only the scenario
    weights differ, so relabeled rewards are bitwise reproducible from the
    snapshot. k may equal g, in which case the pair carries equal rewards.
    """
    tagged_g = label_trajectory(trajectory, g, tp, rp_g)
    tagged_k = label_trajectory(trajectory, k, tp, rp_k)
    out = []
    for tg, tk in zip(tagged_g, tagged_k):
        out.append(tg)
        out.append(tk)
    return out


def _critic_input(
    obs: np.ndarray, actions: np.ndarray, scenario: Optional[np.ndarray]
) -> np.ndarray:
    parts = [obs.reshape(obs.shape[0], -1), actions.reshape(actions.shape[0], -1)]
    if scenario is not None:
        parts.append(scenario)
    return np.concatenate(parts, axis=1)


def _clip_grads(grads: list[np.ndarray], max_norm: float) -> list[np.ndarray]:
    if not math.isfinite(max_norm):
        return grads
    total = math.sqrt(sum(float(np.sum(gr * gr)) for gr in grads))
    if total > max_norm and total > 0.0:
        scale = max_norm / total
        grads = [gr * scale for gr in grads]
    return grads


def critic_update(
    nets: Sequence[AgentNets],
    agent: int,
    batch: dict[str, np.ndarray],
    gamma: float,
    use_g: bool,
    grad_clip: float = math.inf,
    value_floor: float = -math.inf,
) -> float:
    """One Adam step on agent's critic toward the one-step TD target.

    Target actions come from every agent's target actor on the batch's next
    observations; the target critic scores them; targets are constants. The
    loss is the mean squared TD error over the batch. A finite value_floor
    projects the bootstrap term into [value_floor, 0] before discounting;
    rewards are never positive, so values outside that range are impossible
    and projecting them out keeps target feedback from compounding.
    """
    S = batch["obs"].shape[0]
    g = batch["scenario"] if use_g else None
    me = nets[agent]

    next_actions = np.empty((S, len(nets), nets[0].actor.out_dim))
    for j, other in enumerate(nets):
        xj = batch["next_obs"][:, j]
        if g is not None:
            xj = np.concatenate([xj, g], axis=1)
        yj, _ = mlp_forward(other.target_actor, xj)
        next_actions[:, j] = yj

    q_next, _ = mlp_forward(
        me.target_critic, _critic_input(batch["next_obs"], next_actions, g)
    )
    q_boot = q_next[:, 0]
    if math.isfinite(value_floor):
        q_boot = np.clip(q_boot, value_floor, 0.0)
    y = batch["rewards"][:, agent] + gamma * q_boot

    q, cache = mlp_forward(me.critic, _critic_input(batch["obs"], batch["actions"], g))
    td = q[:, 0] - y
    loss = float(np.mean(td * td))
    grads, _ = mlp_backward(me.critic, cache, (2.0 / S) * td[:, None])
    adam_step(me.critic, me.critic_opt, _clip_grads(grads, grad_clip))
    return loss


def actor_update(
    nets: Sequence[AgentNets],
    agent: int,
    batch: dict[str, np.ndarray],
    use_g: bool,
    grad_clip: float = math.inf,
    action_reg: float = 0.0,
    utterance_reg: float = 0.0,
) -> float:
    """One Adam step on agent's actor up the critic's action gradient.

    The agent's own batch actions are replaced by fresh actor outputs; the
    scalar -mean(Q) backpropagates through the critic to the action slice and
    on through the actor. Returns the actor gradient L2 norm.

    action_reg adds an L2 penalty on the raw actor outputs (mean square over
    batch and action entries). The outputs need an anchor: utterances are
    unclamped, feed into the other agents' next observations, and nothing in
    the reward touches them, so without the penalty the emit-observe loop can
    cross unit gain and blow up over a rollout.

    utterance_reg piles an extra penalty on the utterance slice alone. No
    reward ever reads an utterance, yet the critic must fit Q against whatever
    the actors emit there; loud utterances soak up the critic's action
    gradient and drown the force components that actually steer. Forces stay
    anchored only by the mild shared term.
    """
    S = batch["obs"].shape[0]
    g = batch["scenario"] if use_g else None
    me = nets[agent]
    obs_dim = batch["obs"].shape[2]
    act_dim = batch["actions"].shape[2]
    n_agents = len(nets)

    x = batch["obs"][:, agent]
    if g is not None:
        x = np.concatenate([x, g], axis=1)
    my_action, actor_cache = mlp_forward(me.actor, x)

    actions = batch["actions"].copy()
    actions[:, agent] = my_action
    q, critic_cache = mlp_forward(me.critic, _critic_input(batch["obs"], actions, g))

    # Descend on -mean(Q); only the action slice of the critic input carries
    # gradient back into the actor.
    d_q = np.full((S, 1), -1.0 / S)
    _, d_input = mlp_backward(me.critic, critic_cache, d_q)
    start = n_agents * obs_dim + agent * act_dim
    d_action = d_input[:, start : start + act_dim]
    if action_reg > 0.0:
        d_action = d_action + (2.0 * action_reg / my_action.size) * my_action
    if utterance_reg > 0.0 and act_dim > 2:
        utter = my_action[:, 2:]
        d_action[:, 2:] += (2.0 * utterance_reg / utter.size) * utter
    grads, _ = mlp_backward(me.actor, actor_cache, d_action)
    grads = _clip_grads(grads, grad_clip)
    adam_step(me.actor, me.actor_opt, grads)
    return math.sqrt(sum(float(np.sum(gr * gr)) for gr in grads))


def polyak_all(nets: Sequence[AgentNets], decay: float) -> None:
    for agent in nets:
        polyak_update(agent.target_actor, agent.actor, decay)
        polyak_update(agent.target_critic, agent.critic, decay)


def noise_sigma_at(episode: int, cfg: TrainConfig) -> float:
    """Linear anneal from sigma_start to sigma_final over the first
    noise_anneal_frac of the run, flat afterwards."""
    horizon = cfg.noise_anneal_frac * cfg.episodes
    if horizon <= 0 or episode >= horizon:
        return cfg.noise_sigma_final
    frac = episode / horizon
    return cfg.noise_sigma_start + (cfg.noise_sigma_final - cfg.noise_sigma_start) * frac


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int
    mode: str
    scenario: str
    mean_agent_reward: float
    episode_crt: float
    noise_sigma: float


@dataclass
class TrainResult:
    records: list[EpisodeRecord]
    nets: list[AgentNets]
    use_g: bool
    stored_transitions: int


def _episode_metrics(
    trajectory: Sequence[RawStep],
    tagged: Sequence[JointTransition],
    env: EnvSetup,
) -> tuple[float, float]:
    crt_values = [crt_step(step.world, env.threat) for step in trajectory]
    ep_crt = episode_crt(crt_values, env.physics.dt)
    total = sum(float(np.sum(t.rewards)) for t in tagged)
    return total / env.n_agents, ep_crt


def train(
    cfg: TrainConfig,
    env: EnvSetup,
    scenarios: Sequence[ScenarioId],
    seed: int,
    on_record: Optional[Callable[[EpisodeRecord], None]] = None,
    on_checkpoint: Optional[Callable[[int, "TrainResult"], None]] = None,
) -> TrainResult:
    """Run the full training loop for one mode.

    Per episode: pick the scenario (fixed, sampled, or carried over from the
    previous hindsight draw), roll it with annealed exploration noise, label
    and store the trajectory, then once the buffer holds a full batch run
    cycles_per_episode optimization cycles of per-agent critic-then-actor
    updates, each cycle ending with one Polyak update of every target.
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise ConfigurationError("at least one scenario required")
    if cfg.mode == "maddpg_single" and len(scenarios) != 1:
        raise ConfigurationError("maddpg_single trains on exactly one scenario")
    if cfg.mode != "maddpg_single" and len(scenarios) < 2:
        raise ConfigurationError(f"{cfg.mode} needs a scenario set to sample from")

    use_g = cfg.uses_scenario_input
    g_dim = G_DIM if use_g else 0
    nets = build_agent_nets(
        env.n_agents, env.obs_dim, env.act_dim, g_dim, cfg.lr, seed
    )
    buffer = ReplayBuffer(
        cfg.buffer_capacity, env.n_agents, env.obs_dim, env.act_dim, n_scenarios=G_DIM
    )
    scenario_rng = _stream(seed, 1)
    noise_rng = _stream(seed, 2)
    batch_rng = _stream(seed, 3)

    def pick() -> ScenarioId:
        return scenarios[int(scenario_rng.integers(len(scenarios)))]

    current = pick() if cfg.mode == "maupg" else None

    records: list[EpisodeRecord] = []
    result = TrainResult(records=records, nets=nets, use_g=use_g, stored_transitions=0)

    for episode in range(cfg.episodes):
        if cfg.mode == "maddpg_single":
            sid = scenarios[0]
        elif cfg.mode == "maupg":
            sid = current
        else:
            sid = pick()
        sigma = noise_sigma_at(episode, cfg)
        inst = make_scenario(
            sid,
            derive_episode_seed(seed, episode),
            env.scenario_params,
            env.physics,
            comm_dim=env.obs_spec.comm_dim,
        )
        trajectory = run_episode(
            inst,
            nets,
            sid.onehot() if use_g else None,
            sigma,
            noise_rng,
            env.obs_spec,
            cfg.episode_length,
        )
        if cfg.mode == "maupg":
            k = pick()
            tagged = hindsight_augment(
                trajectory, sid, k, env.threat, env.rewards[sid.name], env.rewards[k.name]
            )
            own = tagged[0::2]  # the g-tagged half, for the learning curve
            current = k
        else:
            tagged = label_trajectory(trajectory, sid, env.threat, env.rewards[sid.name])
            own = tagged
        for t in tagged:
            buffer.add(t)
        result.stored_transitions += len(tagged)

        mean_reward, ep_crt = _episode_metrics(trajectory, own, env)
        record = EpisodeRecord(
            episode=episode,
            mode=cfg.mode,
            scenario=sid.name,
            mean_agent_reward=mean_reward,
            episode_crt=ep_crt,
            noise_sigma=sigma,
        )
        records.append(record)
        if on_record is not None:
            on_record(record)

        if len(buffer) >= cfg.batch_size:
            for _ in range(cfg.cycles_per_episode):
                for i in range(env.n_agents):
                    batch = buffer.sample(cfg.batch_size, batch_rng)
                    critic_update(
                        nets, i, batch, cfg.gamma, use_g, cfg.grad_clip, cfg.value_floor
                    )
                    actor_update(
                        nets, i, batch, use_g, cfg.grad_clip,
                        cfg.action_reg, cfg.utterance_reg,
                    )
                polyak_all(nets, cfg.polyak_decay)

        if (
            on_checkpoint is not None
            and cfg.checkpoint_interval > 0
            and (episode + 1) % cfg.checkpoint_interval == 0
        ):
            on_checkpoint(episode + 1, result)

    if on_checkpoint is not None:
        on_checkpoint(cfg.episodes, result)
    return result


@dataclass(frozen=True)
class ActorPolicy:
    """Deployed actors: decentralized execution, optionally scenario-aware."""

    nets: Sequence[AgentNets]
    use_g: bool


ControllerSpec = Union[ActorPolicy, str]

SCRIPTED_CONTROLLERS = ("qlb", "none", "random")


@dataclass(frozen=True)
class EvalReport:
    controller: str
    scenario: str
    n_episodes: int
    seed: int
    mean_episode_crt: float
    stddev_episode_crt: float  # population convention (ddof=0)
    mean_agent_reward: float
    episode_crt: tuple[float, ...]
    episode_reward: tuple[float, ...]


def _scripted_act_fn(
    name: str, env: EnvSetup, episode_rng: np.random.Generator
) -> ActFn:
    n = env.n_agents
    c = env.obs_spec.comm_dim
    # Fresh controller state per episode; reusing one QlbState would carry
    # its held heading across episode boundaries.
    qlb_state = QlbState(
        standoff_radius=env.qlb.standoff_radius,
        gain=env.qlb.gain,
        watch_radius=env.qlb.watch_radius,
        heading_hold_speed=env.qlb.heading_hold_speed,
    )

    def act(inst: ScenarioInstance, obs: np.ndarray, t: int) -> tuple[np.ndarray, np.ndarray]:
        utter = np.zeros((n, c))
        if name == "none":
            return np.zeros((n, 2)), utter
        if name == "random":
            return episode_rng.uniform(-1.0, 1.0, size=(n, 2)), utter
        return qlb_actions(inst.world, qlb_state), utter

    return act


def evaluate(
    controller: ControllerSpec,
    scenario: ScenarioId,
    n_episodes: int,
    seed: int,
    env: EnvSetup,
    episode_length: int = 25,
) -> EvalReport:
    """Noise-free rollouts of a controller; reports CRT and reward statistics.

    The controller is either an ActorPolicy (checkpointed actors) or one of
    the scripted names: 'qlb', 'none' (bodyguards parked at spawn), 'random'
    (uniform forces). Episode e uses the world seed derived from (seed, e).
    """
    if n_episodes < 1:
        raise ConfigurationError("n_episodes must be at least 1")
    name = "policy" if isinstance(controller, ActorPolicy) else str(controller)
    crts: list[float] = []
    rewards: list[float] = []
    for e in range(n_episodes):
        inst = make_scenario(
            scenario,
            derive_episode_seed(seed, e),
            env.scenario_params,
            env.physics,
            comm_dim=env.obs_spec.comm_dim,
        )
        if isinstance(controller, ActorPolicy):
            trajectory = run_episode(
                inst,
                controller.nets,
                scenario.onehot() if controller.use_g else None,
                0.0,
                None,
                env.obs_spec,
                episode_length,
            )
        elif controller in SCRIPTED_CONTROLLERS:
            act = _scripted_act_fn(controller, env, _stream(seed, e, 5))
            trajectory = _rollout(inst, act, env.obs_spec, episode_length)
        else:
            raise ConfigurationError(
                f"unknown controller {controller!r}; expected ActorPolicy or one of {SCRIPTED_CONTROLLERS}"
            )
        tagged = label_trajectory(
            trajectory, scenario, env.threat, env.rewards[scenario.name]
        )
        mean_reward, ep_crt = _episode_metrics(trajectory, tagged, env)
        crts.append(ep_crt)
        rewards.append(mean_reward)

    return EvalReport(
        controller=name,
        scenario=scenario.name,
        n_episodes=n_episodes,
        seed=seed,
        mean_episode_crt=float(np.mean(crts)),
        stddev_episode_crt=float(np.std(crts)),
        mean_agent_reward=float(np.mean(rewards)),
        episode_crt=tuple(crts),
        episode_reward=tuple(rewards),
    )

"""Multi-agent VIP protection: simulation, threat model, and trainers."""

from .checkpoint import load_checkpoint, save_checkpoint
from .config import RunConfig
from .geometry import circular_mean, line_of_sight, point_segment_distance, wrap_angle
from .gradcheck import GradCheckReport, run_gradcheck
from .nets import (
    AdamState,
    Mlp,
    adam_init,
    adam_step,
    mlp_backward,
    mlp_forward,
    mlp_init,
    polyak_update,
)
from .qlb import QlbState, qlb_actions
from .replay import JointTransition, ReplayBuffer
from .scenarios import (
    ALL_SCENARIOS,
    SCENARIO_NAMES,
    ScenarioId,
    ScenarioInstance,
    ScenarioParams,
    bystander_actions,
    make_scenario,
    post_step,
    vip_action,
)
from .threat import (
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
from .trainer import (
    MODES,
    ActorPolicy,
    AgentNets,
    EnvSetup,
    EpisodeRecord,
    EvalReport,
    TrainConfig,
    TrainResult,
    actor_update,
    build_agent_nets,
    critic_update,
    derive_episode_seed,
    evaluate,
    hindsight_augment,
    label_trajectory,
    noise_sigma_at,
    paper_budget_episodes,
    polyak_all,
    run_episode,
    train,
)
from .world import (
    ConfigurationError,
    EntityState,
    Kind,
    ObservationSpec,
    PhysicsConfig,
    WorldState,
    observe,
    step_world,
)

__version__ = "0.1.0"

"""Joint-transition replay: one ring buffer shared by all agents.

Each slot stores the whole team's step: every agent's observation, action,
reward, and next observation, plus the scenario one-hot the rewards were
computed under. Backing arrays grow geometrically up to capacity so a desk
run never pays for the full-budget allocation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class JointTransition:
    obs: np.ndarray  # (n_agents, obs_dim)
    actions: np.ndarray  # (n_agents, act_dim)
    rewards: np.ndarray  # (n_agents,)
    next_obs: np.ndarray  # (n_agents, obs_dim)
    scenario_onehot: np.ndarray  # (n_scenarios,)

    def __post_init__(self) -> None:
        hot = self.scenario_onehot
        if not (np.sum(hot == 1.0) == 1 and np.sum(hot == 0.0) == hot.size - 1):
            raise ValueError("scenario_onehot must be exactly one-hot")
        if not (
            self.obs.shape == self.next_obs.shape
            and self.obs.shape[0] == self.actions.shape[0] == self.rewards.shape[0]
        ):
            raise ValueError("inconsistent per-agent dimensions")


class ReplayBuffer:
    """FIFO ring with uniform minibatch sampling without replacement."""

    _INITIAL = 4096

    def __init__(
        self,
        capacity: int,
        n_agents: int,
        obs_dim: int,
        act_dim: int,
        n_scenarios: int = 4,
    ) -> None:
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.n_agents = n_agents
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.n_scenarios = n_scenarios
        self._allocated = min(self._INITIAL, capacity)
        self._size = 0
        self._cursor = 0
        self._alloc(self._allocated)

    def _alloc(self, n: int) -> None:
        self.obs = np.zeros((n, self.n_agents, self.obs_dim))
        self.actions = np.zeros((n, self.n_agents, self.act_dim))
        self.rewards = np.zeros((n, self.n_agents))
        self.next_obs = np.zeros((n, self.n_agents, self.obs_dim))
        self.scenario = np.zeros((n, self.n_scenarios))

    def _grow(self) -> None:
        new = min(self._allocated * 2, self.capacity)
        for name in ("obs", "actions", "rewards", "next_obs", "scenario"):
            old = getattr(self, name)
            fresh = np.zeros((new, *old.shape[1:]))
            fresh[: self._size] = old[: self._size]
            setattr(self, name, fresh)
        self._allocated = new

    def __len__(self) -> int:
        return self._size

    def add(self, t: JointTransition) -> None:
        if self._cursor >= self._allocated and self._allocated < self.capacity:
            self._grow()
        i = self._cursor
        self.obs[i] = t.obs
        self.actions[i] = t.actions
        self.rewards[i] = t.rewards
        self.next_obs[i] = t.next_obs
        self.scenario[i] = t.scenario_onehot
        self._cursor = (self._cursor + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def transition(self, index: int) -> JointTransition:
        if not 0 <= index < self._size:
            raise IndexError(index)
        return JointTransition(
            obs=self.obs[index].copy(),
            actions=self.actions[index].copy(),
            rewards=self.rewards[index].copy(),
            next_obs=self.next_obs[index].copy(),
            scenario_onehot=self.scenario[index].copy(),
        )

    def sample(self, batch_size: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
        """Uniform sample of batch_size distinct stored transitions."""
        if batch_size > self._size:
            raise ValueError(
                f"cannot sample {batch_size} transitions from buffer of {self._size}"
            )
        if batch_size > self._size // 2:
            idx = rng.permutation(self._size)[:batch_size]
        else:
            # Draw-and-dedupe stays O(batch) however large the buffer gets;
            # each round keeps the distinct values, which is the same law as
            # sequential sampling without replacement.
            idx = np.unique(rng.integers(0, self._size, size=batch_size))
            while idx.size < batch_size:
                extra = rng.integers(0, self._size, size=batch_size - idx.size)
                idx = np.unique(np.concatenate([idx, extra]))
        return {
            "obs": self.obs[idx],
            "actions": self.actions[idx],
            "rewards": self.rewards[idx],
            "next_obs": self.next_obs[idx],
            "scenario": self.scenario[idx],
        }

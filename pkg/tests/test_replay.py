import numpy as np
import pytest

from vipguard.replay import JointTransition, ReplayBuffer

N_AGENTS, OBS_DIM, ACT_DIM = 2, 3, 2


def transition(tag: float, hot_index: int = 0) -> JointTransition:
    hot = np.zeros(4)
    hot[hot_index] = 1.0
    return JointTransition(
        obs=np.full((N_AGENTS, OBS_DIM), tag),
        actions=np.full((N_AGENTS, ACT_DIM), -tag),
        rewards=np.full(N_AGENTS, tag),
        next_obs=np.full((N_AGENTS, OBS_DIM), tag + 0.5),
        scenario_onehot=hot,
    )


class TestJointTransition:
    def test_rejects_non_onehot(self):
        base = transition(1.0)
        for bad in (np.zeros(4), np.ones(4), np.array([0.5, 0.5, 0.0, 0.0])):
            with pytest.raises(ValueError):
                JointTransition(
                    obs=base.obs,
                    actions=base.actions,
                    rewards=base.rewards,
                    next_obs=base.next_obs,
                    scenario_onehot=bad,
                )

    def test_rejects_inconsistent_shapes(self):
        base = transition(1.0)
        with pytest.raises(ValueError):
            JointTransition(
                obs=base.obs,
                actions=base.actions,
                rewards=np.zeros(N_AGENTS + 1),
                next_obs=base.next_obs,
                scenario_onehot=base.scenario_onehot,
            )
        with pytest.raises(ValueError):
            JointTransition(
                obs=base.obs,
                actions=base.actions,
                rewards=base.rewards,
                next_obs=np.zeros((N_AGENTS, OBS_DIM + 1)),
                scenario_onehot=base.scenario_onehot,
            )


def make_buffer(capacity: int) -> ReplayBuffer:
    return ReplayBuffer(capacity, N_AGENTS, OBS_DIM, ACT_DIM)


class TestBuffer:
    def test_roundtrip(self):
        buf = make_buffer(16)
        t = transition(3.0, hot_index=2)
        buf.add(t)
        assert len(buf) == 1
        back = buf.transition(0)
        assert np.array_equal(back.obs, t.obs)
        assert np.array_equal(back.actions, t.actions)
        assert np.array_equal(back.rewards, t.rewards)
        assert np.array_equal(back.next_obs, t.next_obs)
        assert np.array_equal(back.scenario_onehot, t.scenario_onehot)

    def test_index_bounds(self):
        buf = make_buffer(16)
        buf.add(transition(1.0))
        with pytest.raises(IndexError):
            buf.transition(1)
        with pytest.raises(IndexError):
            buf.transition(-1)

    def test_capacity_validation(self):
        with pytest.raises(ValueError):
            make_buffer(0)

    def test_fifo_eviction(self):
        buf = make_buffer(8)
        for k in range(9):
            buf.add(transition(float(k)))
        assert len(buf) == 8
        stored = {float(buf.transition(i).rewards[0]) for i in range(8)}
        # The first insert is gone; everything after it survives.
        assert stored == {float(k) for k in range(1, 9)}

    def test_growth_preserves_contents(self):
        # Backing arrays start small and double; contents must survive growth.
        buf = make_buffer(capacity=10_000)
        n = ReplayBuffer._INITIAL + 5
        for k in range(n):
            buf.add(transition(float(k % 97)))
        assert len(buf) == n
        for i in (0, 1, ReplayBuffer._INITIAL - 1, n - 1):
            assert float(buf.transition(i).rewards[0]) == float(i % 97)


class TestSampling:
    def test_sample_covers_buffer_exactly_when_full_batch(self):
        buf = make_buffer(64)
        for k in range(10):
            buf.add(transition(float(k)))
        batch = buf.sample(10, np.random.default_rng(0))
        assert sorted(batch["rewards"][:, 0].tolist()) == [float(k) for k in range(10)]

    def test_sample_without_replacement_small_batch(self):
        buf = make_buffer(4096)
        for k in range(1000):
            buf.add(transition(float(k)))
        batch = buf.sample(100, np.random.default_rng(1))
        vals = batch["rewards"][:, 0].tolist()
        assert len(set(vals)) == 100

    def test_sample_shapes(self):
        buf = make_buffer(64)
        for k in range(20):
            buf.add(transition(float(k), hot_index=k % 4))
        batch = buf.sample(5, np.random.default_rng(2))
        assert batch["obs"].shape == (5, N_AGENTS, OBS_DIM)
        assert batch["actions"].shape == (5, N_AGENTS, ACT_DIM)
        assert batch["rewards"].shape == (5, N_AGENTS)
        assert batch["next_obs"].shape == (5, N_AGENTS, OBS_DIM)
        assert batch["scenario"].shape == (5, 4)

    def test_oversized_sample_rejected(self):
        buf = make_buffer(64)
        buf.add(transition(1.0))
        with pytest.raises(ValueError):
            buf.sample(2, np.random.default_rng(0))

    def test_sample_determinism(self):
        buf = make_buffer(64)
        for k in range(30):
            buf.add(transition(float(k)))
        a = buf.sample(8, np.random.default_rng(7))
        b = buf.sample(8, np.random.default_rng(7))
        assert np.array_equal(a["rewards"], b["rewards"])
        assert np.array_equal(a["obs"], b["obs"])

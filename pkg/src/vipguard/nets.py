"""Minimal MLP toolkit: Xavier init, analytic backprop, Adam, Polyak updates.

Everything is double precision numpy. Networks are fully-connected stacks with
ReLU between layers and an identity output. Backward returns gradients with
respect to the input as well as the parameters, because the policy update
differentiates a critic with respect to the action slice of its input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Mlp:
    """weights[l] has shape (fan_in, fan_out); forward is x @ W + b per layer."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def in_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights[-1].shape[1]

    def parameters(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def copy(self) -> "Mlp":
        return Mlp(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )

    def layer_shapes(self) -> list[tuple[int, int]]:
        return [w.shape for w in self.weights]


def mlp_init(
    in_dim: int,
    out_dim: int,
    seed: int | np.random.Generator,
    zero_output: bool = False,
    hidden: tuple[int, ...] = (64, 64),
) -> Mlp:
    """Xavier-normal weights (variance 2/(fan_in+fan_out)), zero biases.

    zero_output zeroes the final layer so the net outputs exactly 0 until
    trained; used for critics so early TD targets reduce to the reward.
    """
    if in_dim < 1 or out_dim < 1:
        raise ValueError("dims must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    sizes = (in_dim, *hidden, out_dim)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        std = np.sqrt(2.0 / (fan_in + fan_out))
        weights.append(rng.normal(0.0, std, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    if zero_output:
        weights[-1][:] = 0.0
        biases[-1][:] = 0.0
    return Mlp(weights=weights, biases=biases)


def mlp_forward(p: Mlp, x: np.ndarray) -> tuple[np.ndarray, dict]:
    """Forward pass for a single vector or a batch (rows are samples).

    Returns (output, cache); the cache carries per-layer inputs and
    pre-activations for mlp_backward.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    h = x[None, :] if single else x
    if h.shape[1] != p.in_dim:
        raise ValueError(f"expected input dim {p.in_dim}, got {h.shape[1]}")
    inputs = []
    pre_acts = []
    last = len(p.weights) - 1
    for l, (w, b) in enumerate(zip(p.weights, p.biases)):
        inputs.append(h)
        z = h @ w + b
        pre_acts.append(z)
        h = z if l == last else np.maximum(z, 0.0)
    y = h[0] if single else h
    return y, {"inputs": inputs, "pre_acts": pre_acts, "single": single}


def mlp_backward(
    p: Mlp, cache: dict, grad_output: np.ndarray
) -> tuple[list[np.ndarray], np.ndarray]:
    """Exact reverse-mode gradients of sum(output * grad_output).

    Returns (param_grads, input_grads). param_grads follows the order of
    Mlp.parameters(): W0, b0, W1, b1, ... Batched calls sum parameter
    gradients over the batch; input gradients keep the batch shape.
    """
    grad_output = np.asarray(grad_output, dtype=np.float64)
    single = cache["single"]
    d = grad_output[None, :] if single else grad_output
    if d.shape != cache["pre_acts"][-1].shape:
        raise ValueError(
            f"grad_output shape {grad_output.shape} does not match forward output"
        )
    weight_grads: list[np.ndarray] = [None] * len(p.weights)  # type: ignore[list-item]
    bias_grads: list[np.ndarray] = [None] * len(p.biases)  # type: ignore[list-item]
    for l in range(len(p.weights) - 1, -1, -1):
        weight_grads[l] = cache["inputs"][l].T @ d
        bias_grads[l] = d.sum(axis=0)
        d = d @ p.weights[l].T
        if l > 0:
            d = d * (cache["pre_acts"][l - 1] > 0.0)
    param_grads = []
    for wg, bg in zip(weight_grads, bias_grads):
        param_grads.append(wg)
        param_grads.append(bg)
    input_grads = d[0] if single else d
    return param_grads, input_grads


@dataclass
class AdamState:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)


def adam_init(p: Mlp, lr: float = 0.001) -> AdamState:
    params = p.parameters()
    return AdamState(
        lr=lr,
        m=[np.zeros_like(a) for a in params],
        v=[np.zeros_like(a) for a in params],
    )


def adam_step(p: Mlp, state: AdamState, grads: list[np.ndarray]) -> tuple[Mlp, AdamState]:
    """One Adam update with bias correction, in place on p and state."""
    params = p.parameters()
    if len(grads) != len(params):
        raise ValueError("one gradient array per parameter array required")
    state.step += 1
    t = state.step
    correct1 = 1.0 - state.beta1**t
    correct2 = 1.0 - state.beta2**t
    for param, grad, m, v in zip(params, grads, state.m, state.v):
        m[:] = state.beta1 * m + (1.0 - state.beta1) * grad
        v[:] = state.beta2 * v + (1.0 - state.beta2) * (grad * grad)
        m_hat = m / correct1
        v_hat = v / correct2
        param -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return p, state


def polyak_update(target: Mlp, online: Mlp, decay: float) -> Mlp:
    """target <- decay * target + (1 - decay) * online, elementwise, in place."""
    for t_arr, o_arr in zip(target.parameters(), online.parameters()):
        t_arr[:] = decay * t_arr + (1.0 - decay) * o_arr
    return target

"""Central finite-difference verification of the analytic MLP gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nets import Mlp, mlp_backward, mlp_forward, mlp_init

# Inputs are resampled until every hidden pre-activation clears the ReLU kink
# by this margin: central differences at eps straddle the kink otherwise and
# disagree with the (one-sided) analytic derivative through no fault of the
# backward pass.
KINK_MARGIN = 1e-4

# Relative error uses an absolute floor: components whose true gradient is
# near zero sit at the finite-difference noise floor (~1e-10), where a pure
# ratio test measures noise, not correctness. Real backprop bugs show up as
# O(gradient magnitude) errors and sail past this floor.
DENOMINATOR_FLOOR = 1e-3


@dataclass(frozen=True)
class GradCheckReport:
    nets_checked: int
    max_rel_err: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_rel_err <= self.tol


def _loss(p: Mlp, x: np.ndarray, grad_output: np.ndarray) -> float:
    y, _ = mlp_forward(p, x)
    return float(np.sum(y * grad_output))


def finite_difference_gradients(
    p: Mlp, x: np.ndarray, grad_output: np.ndarray, eps: float = 1e-5
) -> tuple[list[np.ndarray], np.ndarray]:
    """Central differences of sum(output * grad_output) over params and input."""
    param_grads = []
    for arr in p.parameters():
        grad = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = grad.reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + eps
            hi = _loss(p, x, grad_output)
            flat[idx] = orig - eps
            lo = _loss(p, x, grad_output)
            flat[idx] = orig
            gflat[idx] = (hi - lo) / (2.0 * eps)
        param_grads.append(grad)

    x = np.asarray(x, dtype=np.float64)
    input_grad = np.zeros_like(x)
    xflat = x.reshape(-1)
    gflat = input_grad.reshape(-1)
    for idx in range(xflat.size):
        orig = xflat[idx]
        xflat[idx] = orig + eps
        hi = _loss(p, x, grad_output)
        xflat[idx] = orig - eps
        lo = _loss(p, x, grad_output)
        xflat[idx] = orig
        gflat[idx] = (hi - lo) / (2.0 * eps)
    return param_grads, input_grad


def max_relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(
        np.maximum(np.abs(analytic), np.abs(numeric)), DENOMINATOR_FLOOR
    )
    if analytic.size == 0:
        return 0.0
    return float(np.max(np.abs(analytic - numeric) / denom))


def _sample_clear_of_kinks(
    p: Mlp, rng: np.random.Generator, max_tries: int = 200
) -> np.ndarray:
    for _ in range(max_tries):
        x = rng.normal(size=p.in_dim)
        _, cache = mlp_forward(p, x)
        hidden = cache["pre_acts"][:-1]
        if all(np.min(np.abs(z)) > KINK_MARGIN for z in hidden):
            return x
    raise RuntimeError("could not sample an input clear of ReLU kinks")


def run_gradcheck(
    n_nets: int = 20,
    seed: int = 7,
    eps: float = 1e-5,
    tol: float = 1e-4,
    max_dim: int = 64,
) -> GradCheckReport:
    """Check n_nets random MLPs (dims up to max_dim) against central differences.

    Covers parameter and input gradients, with a zero-output final layer every
    fourth net to exercise the critic initialization path.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n_nets):
        in_dim = int(rng.integers(1, max_dim + 1))
        out_dim = int(rng.integers(1, max_dim + 1))
        p = mlp_init(in_dim, out_dim, rng, zero_output=(i % 4 == 3))
        x = _sample_clear_of_kinks(p, rng)
        grad_output = rng.normal(size=out_dim)

        _, cache = mlp_forward(p, x)
        analytic_params, analytic_input = mlp_backward(p, cache, grad_output)
        fd_params, fd_input = finite_difference_gradients(p, x, grad_output, eps=eps)

        for a, n in zip(analytic_params, fd_params):
            worst = max(worst, max_relative_error(a, n))
        worst = max(worst, max_relative_error(analytic_input, fd_input))
    return GradCheckReport(nets_checked=n_nets, max_rel_err=worst, tol=tol)

"""
Straight-line reference implementation of the fully-connected layer equations.

Every reduction is accumulated in a fixed ascending order (input neuron for the
forward product, output neuron for W^T delta, batch index for a delta^T) so the
simulated dataflows, which add in the same order, agree bit-for-bit in both
integer and f64 mode.
"""

import numpy as np
from loguru import logger

from gradinterleave.core.activations import apply_activation
from gradinterleave.core.matrix import check_shape, frozen, seeded_matrix, value_class_for
from gradinterleave.errors import ConfigurationError, DimensionError
from gradinterleave.models.core_models import ActivationKind, LayerShape, Precision
from gradinterleave.models.train_models import TrainStepInputs, TrainStepOutputs


def _accumulator(rows: int, cols: int, *operands: np.ndarray) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.result_type(*operands))


def forward(w: np.ndarray, a_prev: np.ndarray, act: ActivationKind) -> tuple[np.ndarray, np.ndarray]:
    """
    z = W a_prev and a = f(z).
    Raises:
        DimensionError: If W.cols differs from a_prev.rows.
    """
    if w.ndim != 2 or a_prev.ndim != 2 or w.shape[1] != a_prev.shape[0]:
        raise DimensionError(f"forward needs W.cols == a_prev.rows, got {w.shape} and {a_prev.shape}")
    z = _accumulator(w.shape[0], a_prev.shape[1], w, a_prev)
    for x in range(w.shape[1]):
        z += w[:, x, None] * a_prev[None, x, :]
    return frozen(z), frozen(apply_activation(act, z))


def backprop_delta(
    w: np.ndarray,
    delta: np.ndarray,
    fprime_z_prev: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """
    grad_a = W^T delta and delta_prev = grad_a (Hadamard) f'(z_prev).
    Raises:
        DimensionError: If the operand shapes are inconsistent.
    """
    n_out, m_in = w.shape
    batch = delta.shape[1] if delta.ndim == 2 else 0
    check_shape(delta, n_out, batch, "delta")
    check_shape(fprime_z_prev, m_in, batch, "fprime_z_prev")
    grad_a = _accumulator(m_in, batch, w, delta)
    for y in range(n_out):
        grad_a += w[y, :, None] * delta[None, y, :]
    return frozen(grad_a), frozen(grad_a * fprime_z_prev)


def weight_grad_t(a_prev: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """
    G^T = a_prev delta^T, i.e. grad_w_t[x][y] = sum over n of a[x, n] * delta[y, n].
    Raises:
        DimensionError: If the batch sizes differ.
    """
    if a_prev.ndim != 2 or delta.ndim != 2 or a_prev.shape[1] != delta.shape[1]:
        raise DimensionError(f"batch mismatch: a_prev {a_prev.shape} vs delta {delta.shape}")
    grad_w_t = _accumulator(a_prev.shape[0], delta.shape[0], a_prev, delta)
    for n in range(a_prev.shape[1]):
        grad_w_t += a_prev[:, n, None] * delta[None, :, n]
    return frozen(grad_w_t)


def sgd_update(w: np.ndarray, grad_w_t: np.ndarray, lr: float | int) -> np.ndarray:
    """
    w_next[y][x] = w[y][x] - lr * grad_w_t[x][y].
    Raises:
        DimensionError: If grad_w_t is not the transpose shape of w.
    """
    check_shape(grad_w_t, w.shape[1], w.shape[0], "grad_w_t")
    return frozen(w - lr * grad_w_t.T)


def train_step(inputs: TrainStepInputs) -> TrainStepOutputs:
    """
    Backward step of one layer: activation gradient, weight gradient and update.
    Raises:
        ConfigurationError: If no learning rate is given.
    """
    if inputs.lr is None:
        raise ConfigurationError("train_step requires a learning rate")
    grad_a, delta_prev = backprop_delta(inputs.w, inputs.delta, inputs.fprime_z_prev)
    grad_w_t = weight_grad_t(inputs.a_prev, inputs.delta)
    w_next = sgd_update(inputs.w, grad_w_t, inputs.lr)
    logger.debug("golden train_step on {} done", inputs.shape)
    return TrainStepOutputs(grad_a=grad_a, delta_prev=delta_prev, grad_w_t=grad_w_t, w_next=w_next)


def surrogate_loss(w: np.ndarray, a_prev: np.ndarray, coeff: np.ndarray) -> float:
    """
    E = sum(coeff * (W a_prev)). Linear in z, so dE/dz = coeff exactly.
    """
    z, _ = forward(w, a_prev, ActivationKind.IDENTITY)
    return float(np.sum(coeff * z))


def finite_difference_grad(w: np.ndarray, a_prev: np.ndarray, coeff: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """
    Central-difference estimate of dE/dW for the surrogate loss, N x M.
    """
    base = np.array(w, dtype=np.float64)
    grad = np.zeros_like(base)
    for y in range(base.shape[0]):
        for x in range(base.shape[1]):
            plus = base.copy()
            plus[y, x] += h
            minus = base.copy()
            minus[y, x] -= h
            grad[y, x] = (surrogate_loss(plus, a_prev, coeff) - surrogate_loss(minus, a_prev, coeff)) / (2 * h)
    return grad


def seeded_inputs(shape: LayerShape, seed: int, precision: Precision, lr: float | int | None) -> TrainStepInputs:
    """
    Deterministic layer inputs: W, a_prev, delta and f'(z_prev) drawn from
    streams seed, seed+1, seed+2 and seed+3.
    """
    value_class = value_class_for(precision)
    return TrainStepInputs(
        w=seeded_matrix(shape.n_out, shape.m_in, seed, value_class),
        a_prev=seeded_matrix(shape.m_in, shape.batch, seed + 1, value_class),
        delta=seeded_matrix(shape.n_out, shape.batch, seed + 2, value_class),
        fprime_z_prev=seeded_matrix(shape.m_in, shape.batch, seed + 3, value_class),
        lr=lr,
    )

"""
Two-layer LSTM with a linear output head, forward and backward in numpy.

Each layer keeps one weight matrix over the concatenated ``[input, hidden]``
vector with the four gate blocks side by side in the order input, forget,
output, candidate. Arrays are batch-major: inputs ``(B, T, input_size)``,
outputs ``(B, T, output_size)``.

Parameters are a plain dict keyed by PARAM_ORDER:

    W1  (input_size + H, 4H)    b1  (4H,)
    W2  (2H, 4H)                b2  (4H,)
    Wy  (H, output_size)        by  (output_size,)
"""

from typing import Dict, List, NamedTuple, Tuple

import numpy as np

Params = Dict[str, np.ndarray]

PARAM_ORDER = ("W1", "b1", "W2", "b2", "Wy", "by")


class LSTMState(NamedTuple):
    """Hidden and cell state of both layers, each ``(B, H)``."""

    h1: np.ndarray
    c1: np.ndarray
    h2: np.ndarray
    c2: np.ndarray


class _CellCache(NamedTuple):
    stacked: np.ndarray
    c_prev: np.ndarray
    i: np.ndarray
    f: np.ndarray
    o: np.ndarray
    g: np.ndarray
    c_new: np.ndarray


class _StepCache(NamedTuple):
    layer1: _CellCache
    layer2: _CellCache
    h2: np.ndarray


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Logistic function without overflow warnings for large negative inputs."""
    return np.asarray(0.5 * (1.0 + np.tanh(0.5 * z)))


def init_params(
    input_size: int, hidden_size: int, output_size: int, rng: np.random.Generator
) -> Params:
    """
    Draw initial parameters.

    Weights are uniform in ``+-1/sqrt(fan_in)``; biases are zero except the
    forget-gate block, which starts at +1.
    """
    if hidden_size < 1:
        raise ValueError(f"hidden_size must be at least 1, got {hidden_size}")
    h = hidden_size

    def uniform(rows: int, cols: int) -> np.ndarray:
        bound = 1.0 / np.sqrt(rows)
        return rng.uniform(-bound, bound, size=(rows, cols))

    def gate_bias() -> np.ndarray:
        bias = np.zeros(4 * h)
        bias[h : 2 * h] = 1.0
        return bias

    return {
        "W1": uniform(input_size + h, 4 * h),
        "b1": gate_bias(),
        "W2": uniform(2 * h, 4 * h),
        "b2": gate_bias(),
        "Wy": uniform(h, output_size),
        "by": np.zeros(output_size),
    }


def hidden_size_of(params: Params) -> int:
    """H inferred from the output head."""
    return int(params["Wy"].shape[0])


def zero_state(batch: int, hidden_size: int) -> LSTMState:
    """All-zero state for a batch."""
    zeros = np.zeros((batch, hidden_size))
    return LSTMState(zeros, zeros.copy(), zeros.copy(), zeros.copy())


def _cell_forward(
    x: np.ndarray, h: np.ndarray, c: np.ndarray, w: np.ndarray, b: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, _CellCache]:
    stacked = np.concatenate([x, h], axis=1)
    gates = stacked @ w + b
    zi, zf, zo, zg = np.split(gates, 4, axis=1)
    i, f, o, g = sigmoid(zi), sigmoid(zf), sigmoid(zo), np.tanh(zg)
    c_new = f * c + i * g
    h_new = o * np.tanh(c_new)
    return h_new, c_new, _CellCache(stacked, c, i, f, o, g, c_new)


def _cell_backward(
    dh: np.ndarray, dc: np.ndarray, cache: _CellCache, w: np.ndarray, input_size: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    tanh_c = np.tanh(cache.c_new)
    d_o = dh * tanh_c
    dc = dc + dh * cache.o * (1.0 - tanh_c * tanh_c)
    d_i = dc * cache.g
    d_g = dc * cache.i
    d_f = dc * cache.c_prev
    dc_prev = dc * cache.f

    d_gates = np.concatenate(
        [
            d_i * cache.i * (1.0 - cache.i),
            d_f * cache.f * (1.0 - cache.f),
            d_o * cache.o * (1.0 - cache.o),
            d_g * (1.0 - cache.g * cache.g),
        ],
        axis=1,
    )
    dw = cache.stacked.T @ d_gates
    db = d_gates.sum(axis=0)
    d_stacked = d_gates @ w.T
    return d_stacked[:, :input_size], d_stacked[:, input_size:], dc_prev, dw, db


def step(params: Params, x: np.ndarray, state: LSTMState) -> Tuple[np.ndarray, LSTMState]:
    """
    One time step for a batch.

    Args:
        params: Network parameters
        x: ``(B, input_size)`` inputs
        state: Incoming state

    Returns:
        ``(B, output_size)`` outputs and the next state
    """
    h1, c1, _ = _cell_forward(x, state.h1, state.c1, params["W1"], params["b1"])
    h2, c2, _ = _cell_forward(h1, state.h2, state.c2, params["W2"], params["b2"])
    return h2 @ params["Wy"] + params["by"], LSTMState(h1, c1, h2, c2)


def sequence_forward(
    params: Params, inputs: np.ndarray, state: LSTMState
) -> Tuple[np.ndarray, LSTMState, List[_StepCache]]:
    """Unroll over ``(B, T, input_size)`` inputs, keeping caches for backprop."""
    outputs = []
    caches = []
    h1, c1, h2, c2 = state
    for t in range(inputs.shape[1]):
        h1, c1, cache1 = _cell_forward(inputs[:, t], h1, c1, params["W1"], params["b1"])
        h2, c2, cache2 = _cell_forward(h1, h2, c2, params["W2"], params["b2"])
        outputs.append(h2 @ params["Wy"] + params["by"])
        caches.append(_StepCache(cache1, cache2, h2))
    batch = inputs.shape[0]
    stacked = np.stack(outputs, axis=1) if outputs else np.zeros((batch, 0, params["by"].size))
    return stacked, LSTMState(h1, c1, h2, c2), caches


def sequence_backward(
    params: Params, caches: List[_StepCache], d_outputs: np.ndarray
) -> Params:
    """
    Backpropagation through time from output gradients ``(B, T, output_size)``.

    The initial state is treated as a constant.
    """
    grads = {name: np.zeros_like(params[name]) for name in PARAM_ORDER}
    if not caches:
        return grads
    input_size = params["W1"].shape[0] - hidden_size_of(params)
    hidden = hidden_size_of(params)
    batch = d_outputs.shape[0]
    dh1_next = np.zeros((batch, hidden))
    dc1_next = np.zeros((batch, hidden))
    dh2_next = np.zeros((batch, hidden))
    dc2_next = np.zeros((batch, hidden))

    for t in reversed(range(len(caches))):
        cache = caches[t]
        dy = d_outputs[:, t]
        grads["Wy"] += cache.h2.T @ dy
        grads["by"] += dy.sum(axis=0)
        dh2 = dy @ params["Wy"].T + dh2_next

        dh1_from_2, dh2_next, dc2_next, dw2, db2 = _cell_backward(
            dh2, dc2_next, cache.layer2, params["W2"], hidden
        )
        grads["W2"] += dw2
        grads["b2"] += db2

        _, dh1_next, dc1_next, dw1, db1 = _cell_backward(
            dh1_from_2 + dh1_next, dc1_next, cache.layer1, params["W1"], input_size
        )
        grads["W1"] += dw1
        grads["b1"] += db1
    return grads


def sequence_loss(
    params: Params, inputs: np.ndarray, targets: np.ndarray
) -> Tuple[float, Params]:
    """
    Mean squared error of a teacher-forced unroll and its gradients.

    Args:
        params: Network parameters
        inputs: ``(B, T, input_size)`` normalized inputs
        targets: ``(B, T, output_size)`` normalized targets

    Returns:
        (loss, gradients); a zero-length sequence gives loss 0 and zero gradients
    """
    if inputs.shape[1] == 0:
        return 0.0, {name: np.zeros_like(params[name]) for name in PARAM_ORDER}
    state = zero_state(inputs.shape[0], hidden_size_of(params))
    outputs, _, caches = sequence_forward(params, inputs, state)
    diff = outputs - targets
    loss = float(np.mean(diff * diff))
    grads = sequence_backward(params, caches, 2.0 * diff / diff.size)
    return loss, grads

"""Adam optimizer with bias-corrected moment estimates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError

__all__ = ["AdamState", "init_adam_state", "adam_step", "Adam"]


@dataclass
class AdamState:
    """Per-parameter first/second moment accumulators and the step counter."""

    first: list[np.ndarray]
    second: list[np.ndarray]
    step_count: int = 0


def init_adam_state(params) -> AdamState:
    return AdamState(
        first=[np.zeros_like(p) for p in params],
        second=[np.zeros_like(p) for p in params],
    )


def adam_step(params, grads, state: AdamState, learning_rate: float = 0.001,
              beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8) -> None:
    """Apply one bias-corrected Adam update to `params` in place."""
    if len(params) != len(grads) or len(params) != len(state.first):
        raise ShapeError("params, grads, and Adam state differ in length")
    state.step_count += 1
    correction1 = 1.0 - beta1 ** state.step_count
    correction2 = 1.0 - beta2 ** state.step_count
    for p, g, m, v in zip(params, grads, state.first, state.second):
        if p.shape != g.shape or p.shape != m.shape:
            raise ShapeError(f"gradient/state shape mismatch for parameter of shape {p.shape}")
        # single scratch buffer; the update is memory-bound on large layers
        buf = np.multiply(g, g)
        np.multiply(v, beta2, out=v)
        buf *= 1.0 - beta2
        v += buf
        np.multiply(m, beta1, out=m)
        np.multiply(g, 1.0 - beta1, out=buf)
        m += buf
        np.divide(v, correction2, out=buf)
        np.sqrt(buf, out=buf)
        buf += epsilon
        np.divide(m, buf, out=buf)
        buf *= learning_rate / correction1
        p -= buf


@dataclass
class Adam:
    """Stateful wrapper bound to one parameter list."""

    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    state: AdamState | None = field(default=None, repr=False)

    def step(self, params, grads) -> None:
        if self.state is None:
            self.state = init_adam_state(params)
        adam_step(params, grads, self.state, self.learning_rate,
                  self.beta1, self.beta2, self.epsilon)

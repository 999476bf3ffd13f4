"""Per-joint two-neuron oscillators driving the active hinges.

Each joint owns an (x, y) neuron pair cross-coupled by two weights and an
output neuron squashing x through tanh.  Weight layout per joint i is
(w_xy[i], w_yx[i], w_out[i]), flattened to a single 3N vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .morphology import BodyPlan

INITIAL_STATE = math.sqrt(2.0) / 2.0
STATE_CLIP = 10.0
WEIGHTS_PER_JOINT = 3


class DimensionMismatch(ValueError):
    """Weight vector length does not match 3 * joint count."""


def _advance(x: np.ndarray, y: np.ndarray, w_xy: np.ndarray, w_yx: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """One explicit Euler step; the y update sees the pre-update x."""
    x_new = np.clip(x + dt * w_yx * y, -STATE_CLIP, STATE_CLIP)
    y_new = np.clip(y + dt * w_xy * x, -STATE_CLIP, STATE_CLIP)
    return x_new, y_new


@dataclass
class CpgNetwork:
    """Oscillator bank for one body; mutable state, confined to one evaluation."""

    w_xy: np.ndarray
    w_yx: np.ndarray
    w_out: np.ndarray
    x: np.ndarray
    y: np.ndarray

    @property
    def n(self) -> int:
        return self.w_xy.size

    def outputs(self) -> np.ndarray:
        """Joint outputs at the current state, in (-1, 1)."""
        return np.tanh(self.w_out * self.x)

    def step(self, dt: float) -> np.ndarray:
        """Advance the state by dt and return the new joint outputs."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.x, self.y = _advance(self.x, self.y, self.w_xy, self.w_yx, dt)
        return self.outputs()


def init_network(body: BodyPlan, weights) -> CpgNetwork:
    """Build the network for a body; every neuron pair starts at (sqrt(2)/2, sqrt(2)/2)."""
    n = body.n_joints
    w = np.asarray(weights, dtype=float).ravel()
    if w.size != WEIGHTS_PER_JOINT * n:
        raise DimensionMismatch(f"expected {WEIGHTS_PER_JOINT * n} weights for {n} joints, got {w.size}")
    per_joint = w.reshape(n, WEIGHTS_PER_JOINT)
    state = np.full(n, INITIAL_STATE)
    return CpgNetwork(
        w_xy=per_joint[:, 0].copy(),
        w_yx=per_joint[:, 1].copy(),
        w_out=per_joint[:, 2].copy(),
        x=state.copy(),
        y=state.copy(),
    )


def integrate_outputs(weights, n_steps: int, dt: float) -> np.ndarray:
    """Joint outputs over a whole horizon for a batch of weight vectors.

    weights has shape (B, 3N) or (3N,); the result has shape (B, n_steps + 1, N)
    with row 0 holding the outputs at the initial state.  Row b is bit-identical
    to stepping a CpgNetwork built from weights[b].
    """
    w = np.atleast_2d(np.asarray(weights, dtype=float))
    batch = w.shape[0]
    if w.shape[1] % WEIGHTS_PER_JOINT != 0:
        raise DimensionMismatch("weight vectors must have length 3N")
    n = w.shape[1] // WEIGHTS_PER_JOINT
    per_joint = w.reshape(batch, n, WEIGHTS_PER_JOINT)
    w_xy = per_joint[:, :, 0].copy()
    w_yx = per_joint[:, :, 1].copy()
    w_out = per_joint[:, :, 2].copy()
    x = np.full((batch, n), INITIAL_STATE)
    y = np.full((batch, n), INITIAL_STATE)
    xs = np.empty((batch, n_steps + 1, n))
    xs[:, 0] = x
    for t in range(1, n_steps + 1):
        x, y = _advance(x, y, w_xy, w_yx, dt)
        xs[:, t] = x
    return np.tanh(w_out[:, None, :] * xs)

"""State estimate and error-covariance propagation under switched observations.

When the switch closes the players receive the exact state, so the
filtered estimate jumps to it and the error covariance drops to the
exact zero matrix.  When it stays open the observation is an erasure
and the prediction is carried forward unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import GameSpec


class Erasure:
    """Tagged observation value for an open switch (never a numeric vector)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "erasure"


ERASURE = Erasure()


@dataclass(frozen=True)
class EstimatorState:
    """Filtered and predicted estimate/covariance at one stage."""

    xhat: np.ndarray
    xhat_pred: np.ndarray
    M: np.ndarray
    M_pred: np.ndarray
    t: int


def predict_state(xhat, u1, u2, spec: GameSpec) -> np.ndarray:
    """One-step state prediction A xhat + B1 u1 + B2 u2."""
    return spec.A @ xhat + spec.B1 @ u1 + spec.B2 @ u2


def update_state(xhat_pred, delta: int, observation) -> np.ndarray:
    """Filtered estimate: the observed state on closure, else the prediction."""
    if delta:
        if isinstance(observation, Erasure):
            raise ValueError("protocol violation: switch closed but observation is an erasure")
        return observation
    if not isinstance(observation, Erasure):
        raise ValueError("protocol violation: switch open but a state vector was observed")
    return xhat_pred


def predict_cov(M, spec: GameSpec) -> np.ndarray:
    """Predicted error covariance A M A' + S, symmetrized."""
    out = spec.A @ M @ spec.A.T + spec.S
    return 0.5 * (out + out.T)


def update_cov(M_pred, delta: int) -> np.ndarray:
    """Filtered error covariance: exactly zero on closure, else unchanged."""
    if delta:
        return np.zeros_like(M_pred)
    return M_pred


def filter_stage(xhat_pred, M_pred, delta: int, observation, t: int) -> EstimatorState:
    """Apply the stage-t switching outcome to the predicted quantities."""
    return EstimatorState(
        xhat=update_state(xhat_pred, delta, observation),
        xhat_pred=xhat_pred,
        M=update_cov(M_pred, delta),
        M_pred=M_pred,
        t=t,
    )


def predict_stage(state: EstimatorState, u1, u2, spec: GameSpec):
    """Priors for stage t+1 from the filtered stage-t state and applied controls."""
    return predict_state(state.xhat, u1, u2, spec), predict_cov(state.M, spec)


def covariance_path(spec: GameSpec, schedule) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic covariance sequences under a fixed switching schedule.

    Returns (M_pred, M), each of shape (T+1, n, n).  The stage-0
    predicted covariance is Sigma0 by convention; the terminal stage has
    no switching action.
    """
    T, n = spec.T, spec.n
    if len(schedule) != T:
        raise ValueError(f"schedule must have length T={T}, got {len(schedule)}")
    M_pred = np.empty((T + 1, n, n))
    M = np.empty((T + 1, n, n))
    M_pred[0] = spec.Sigma0
    for t in range(T + 1):
        delta = int(schedule[t]) if t < T else 0
        M[t] = update_cov(M_pred[t], delta)
        if t < T:
            M_pred[t + 1] = predict_cov(M[t], spec)
    return M_pred, M

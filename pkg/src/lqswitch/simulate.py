"""Seeded closed-loop Monte Carlo roll-outs under the equilibrium strategies.

Per-run noise streams are pure functions of (seed, run index), so results
are bit-identical for a fixed (seed, n_runs) no matter how the runs are
executed.  Covariance square roots come from an eigendecomposition with
negative eigenvalues clamped at zero, which keeps singular S or Sigma0
(including exact zeros) legal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimator import ERASURE, filter_stage, predict_stage
from .model import GameSpec
from .riccati import RiccatiSolution
from .switching import (
    INIT,
    SwitchPolicy,
    backward_induction,
    never_close_policy,
    schedule_cost,
    since,
)


@dataclass
class TrajectoryRecord:
    """Per-stage quantities of one roll-out.

    x, xhat, xhat_pred have shape (T+1, n); u1, u2 (T, m); w (T, n);
    delta (T+1,) with delta[T] = 0; y is a list of state vectors or
    ERASURE; c1, c2 (T+1,) are the realized per-stage costs.
    """

    x: np.ndarray
    xhat: np.ndarray
    xhat_pred: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    w: np.ndarray
    delta: np.ndarray
    y: list
    c1: np.ndarray
    c2: np.ndarray

    def total_cost(self, player: int) -> float:
        return float(np.sum(self.c1 if player == 1 else self.c2))


@dataclass(frozen=True)
class SimSummary:
    """Monte Carlo aggregate for one policy."""

    n_runs: int
    mean_cost1: float
    mean_cost2: float
    se1: float
    se2: float
    closure_count: int
    analytic1: float
    analytic2: float


@dataclass(frozen=True)
class ComparisonTable:
    """Equilibrium policy versus the forced-open baseline, same noise."""

    switching: SimSummary
    never_close: SimSummary
    ratio_analytic1: float
    ratio_analytic2: float
    ratio_empirical1: float
    ratio_empirical2: float


def psd_factor(M: np.ndarray) -> np.ndarray:
    """Square root F with F F' = M for symmetric PSD M (eigenvalues clamped at 0)."""
    vals, vecs = np.linalg.eigh(M)
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


def noise_for_run(spec: GameSpec, seed: int, run: int) -> tuple[np.ndarray, np.ndarray]:
    """Initial state and process-noise draws for one run.

    The stream is a pure function of (seed, run): a fresh PCG64 generator
    is keyed by the pair, the initial state is drawn first, then one row
    per stage.
    """
    F0 = psd_factor(spec.Sigma0)
    FS = psd_factor(spec.S)
    rng = np.random.default_rng([seed, run])
    x0 = F0 @ rng.standard_normal(spec.n)
    w = rng.standard_normal((spec.T, spec.n)) @ FS.T
    return x0, w


def _quad(v: np.ndarray, Q: np.ndarray) -> float:
    return float(v @ Q @ v)


def rollout(
    spec: GameSpec,
    ric: RiccatiSolution,
    policy: SwitchPolicy,
    x0: np.ndarray,
    w: np.ndarray,
) -> TrajectoryRecord:
    """One closed-loop roll-out with the given noise draws.

    Stage order: read the joint decision, form the observation, update
    the estimate, apply u_i = -L_i xhat (no control at the terminal
    stage), accrue the realized costs, step the dynamics.
    """
    T, n, m = spec.T, spec.n, spec.m
    xs = np.empty((T + 1, n))
    xhats = np.empty((T + 1, n))
    xpreds = np.empty((T + 1, n))
    u1s = np.empty((T, m))
    u2s = np.empty((T, m))
    deltas = np.zeros(T + 1, dtype=int)
    ys: list = []
    c1s = np.empty(T + 1)
    c2s = np.empty(T + 1)

    x = np.array(x0, dtype=float)
    xhat_pred = np.zeros(n)
    M_pred = np.array(spec.Sigma0, dtype=float)
    age = INIT
    for t in range(T + 1):
        delta = policy.delta(t, age) if t < T else 0
        y = x.copy() if delta else ERASURE
        state = filter_stage(xhat_pred, M_pred, delta, y, t)
        xhat = state.xhat
        xs[t], xhats[t], xpreds[t] = x, xhat, xhat_pred
        deltas[t] = delta
        ys.append(y)
        if t == T:
            c1s[t] = _quad(x, spec.Q1)
            c2s[t] = _quad(x, spec.Q2)
            break
        u1 = -(ric.L1[t] @ xhat)
        u2 = -(ric.L2[t] @ xhat)
        u1s[t], u2s[t] = u1, u2
        c1s[t] = _quad(x, spec.Q1) + _quad(u1, spec.Q11) + _quad(u2, spec.Q12) + spec.lambda1 * delta
        c2s[t] = _quad(x, spec.Q2) + _quad(u2, spec.Q22) + _quad(u1, spec.Q21) + spec.lambda2 * delta
        x = spec.A @ x + spec.B1 @ u1 + spec.B2 @ u2 + w[t]
        xhat_pred, M_pred = predict_stage(state, u1, u2, spec)
        age = since(1) if delta else age.successor()

    return TrajectoryRecord(
        x=xs, xhat=xhats, xhat_pred=xpreds, u1=u1s, u2=u2s, w=np.array(w, dtype=float),
        delta=deltas, y=ys, c1=c1s, c2=c2s,
    )


def draw_noise_batch(spec: GameSpec, seed: int, n_runs: int):
    """Stacked (x0, w) draws for runs 0..n_runs-1, one substream per run."""
    F0 = psd_factor(spec.Sigma0)
    FS = psd_factor(spec.S)
    X0 = np.empty((n_runs, spec.n))
    W = np.empty((n_runs, spec.T, spec.n))
    for r in range(n_runs):
        rng = np.random.default_rng([seed, r])
        X0[r] = F0 @ rng.standard_normal(spec.n)
        W[r] = rng.standard_normal((spec.T, spec.n)) @ FS.T
    return X0, W


def batch_rollout(
    spec: GameSpec,
    ric: RiccatiSolution,
    schedule,
    X0: np.ndarray,
    W: np.ndarray,
):
    """All runs stepped together under one fixed schedule.

    Returns (X, Xhat, cost1, cost2): per-stage stacked states and
    estimates of shape (T+1, n_runs, n) and total realized costs per run.
    The schedule is shared by every run, which is exactly the closed-loop
    situation (the policy depends only on the observation age).
    """
    T, n = spec.T, spec.n
    n_runs = X0.shape[0]
    X = np.empty((T + 1, n_runs, n))
    Xhat = np.empty((T + 1, n_runs, n))
    cost1 = np.zeros(n_runs)
    cost2 = np.zeros(n_runs)

    def quad(V, Q):
        return np.einsum("ri,ij,rj->r", V, Q, V)

    x = X0.copy()
    xhat_pred = np.zeros((n_runs, n))
    for t in range(T + 1):
        delta = int(schedule[t]) if t < T else 0
        xhat = x.copy() if delta else xhat_pred
        X[t], Xhat[t] = x, xhat
        cost1 += quad(x, spec.Q1)
        cost2 += quad(x, spec.Q2)
        if t == T:
            break
        u1 = -(xhat @ ric.L1[t].T)
        u2 = -(xhat @ ric.L2[t].T)
        cost1 += quad(u1, spec.Q11) + quad(u2, spec.Q12) + spec.lambda1 * delta
        cost2 += quad(u2, spec.Q22) + quad(u1, spec.Q21) + spec.lambda2 * delta
        drive = u1 @ spec.B1.T + u2 @ spec.B2.T
        x = x @ spec.A.T + drive + W[:, t]
        xhat_pred = xhat @ spec.A.T + drive
    return X, Xhat, cost1, cost2


def monte_carlo(
    spec: GameSpec,
    ric: RiccatiSolution,
    policy: SwitchPolicy,
    seed: int,
    n_runs: int,
) -> SimSummary:
    """Means and standard errors of the realized costs over seeded runs.

    Aggregation is a fixed-order pairwise sum over the run index, so the
    summary is reproducible bit for bit.
    """
    if n_runs < 2:
        raise ValueError("n_runs must be >= 2")
    schedule = policy.replay()
    X0, W = draw_noise_batch(spec, seed, n_runs)
    _, _, cost1, cost2 = batch_rollout(spec, ric, schedule, X0, W)
    analytic1, analytic2 = schedule_cost(spec, ric, schedule)
    return SimSummary(
        n_runs=n_runs,
        mean_cost1=float(np.mean(cost1)),
        mean_cost2=float(np.mean(cost2)),
        se1=float(np.std(cost1, ddof=1) / math.sqrt(n_runs)),
        se2=float(np.std(cost2, ddof=1) / math.sqrt(n_runs)),
        closure_count=int(np.sum(schedule)),
        analytic1=analytic1,
        analytic2=analytic2,
    )


def compare_baselines(
    spec: GameSpec, ric: RiccatiSolution, seed: int, n_runs: int
) -> ComparisonTable:
    """Equilibrium switching versus never closing, on identical noise.

    The baseline forces delta = 0 everywhere (no numeric infinity is
    involved), which is what infinite switching fees would induce.
    """
    _, policy = backward_induction(spec, ric)
    eq = monte_carlo(spec, ric, policy, seed, n_runs)
    base = monte_carlo(spec, ric, never_close_policy(spec.T), seed, n_runs)
    return ComparisonTable(
        switching=eq,
        never_close=base,
        ratio_analytic1=eq.analytic1 / base.analytic1,
        ratio_analytic2=eq.analytic2 / base.analytic2,
        ratio_empirical1=eq.mean_cost1 / base.mean_cost1,
        ratio_empirical2=eq.mean_cost2 / base.mean_cost2,
    )

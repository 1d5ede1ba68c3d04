"""Coupled Riccati backward pass for the feedback control equilibrium.

The two players' linear feedback gains solve a pair of mutual
best-response equations at every stage.  Stacking the two identities
gives one 2m x 2m linear system which is solved directly (no fixed-point
iteration), after which the quadratic cost matrices P1, P2 are stepped
backward.  Neither the gains nor the cost matrices depend on the
switching behaviour, so this pass runs once per game.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import GameSpec

# Condition-number guard for the stacked best-response system.
COND_LIMIT = 1e12


class SingularSystemError(RuntimeError):
    """The stacked best-response system has no unique solution."""


@dataclass(frozen=True)
class RiccatiSolution:
    """Per-stage cost matrices and gains.

    P1, P2 have shape (T+1, n, n) indexed by stage t = 0..T with
    P[T] equal to the terminal state weight.  L1, L2 have shape
    (T, m, n); L[t] is the gain applied at stage t.
    """

    P1: np.ndarray
    P2: np.ndarray
    L1: np.ndarray
    L2: np.ndarray

    def P(self, player: int) -> np.ndarray:
        return self.P1 if player == 1 else self.P2

    def L(self, player: int) -> np.ndarray:
        return self.L1 if player == 1 else self.L2

    @property
    def horizon(self) -> int:
        return self.L1.shape[0]


def solve_gains_at(
    P1_next: np.ndarray, P2_next: np.ndarray, spec: GameSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Gains (L1, L2) at one stage, given the next-stage cost matrices.

    The mutual best responses

        (Q11 + B1' P1 B1) L1 + B1' P1 B2 L2 = B1' P1 A
        B2' P2 B1 L1 + (Q22 + B2' P2 B2) L2 = B2' P2 A

    are assembled into one stacked system and solved.  Raises
    SingularSystemError (with a condition estimate) when the stacked
    matrix is numerically singular, i.e. the best responses do not
    determine the gains uniquely.
    """
    B1, B2 = spec.B1, spec.B2
    m = spec.m
    top = np.hstack([spec.Q11 + B1.T @ P1_next @ B1, B1.T @ P1_next @ B2])
    bot = np.hstack([B2.T @ P2_next @ B1, spec.Q22 + B2.T @ P2_next @ B2])
    stacked = np.vstack([top, bot])
    rhs = np.vstack([B1.T @ P1_next @ spec.A, B2.T @ P2_next @ spec.A])

    cond = np.linalg.cond(stacked)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularSystemError(
            f"stacked best-response system is singular (condition estimate {cond:.3e})"
        )
    gains = np.linalg.solve(stacked, rhs)
    return gains[:m], gains[m:]


def riccati_step(
    P1_next: np.ndarray,
    P2_next: np.ndarray,
    L1: np.ndarray,
    L2: np.ndarray,
    spec: GameSpec,
) -> tuple[np.ndarray, np.ndarray]:
    """One backward step of the coupled cost recursion.

    P_i = Q_i + L_i' Q_ii L_i + L_j' Q_ij L_j + Acl' P_i_next Acl with
    Acl the closed loop A - B1 L1 - B2 L2.  Results are symmetrized to
    keep round-off from accumulating.
    """
    Acl = spec.A - spec.B1 @ L1 - spec.B2 @ L2
    P1 = spec.Q1 + L1.T @ spec.Q11 @ L1 + L2.T @ spec.Q12 @ L2 + Acl.T @ P1_next @ Acl
    P2 = spec.Q2 + L2.T @ spec.Q22 @ L2 + L1.T @ spec.Q21 @ L1 + Acl.T @ P2_next @ Acl
    return 0.5 * (P1 + P1.T), 0.5 * (P2 + P2.T)


def solve_riccati(spec: GameSpec) -> RiccatiSolution:
    """Backward pass over the whole horizon.

    Parameters
    ----------
    spec : GameSpec
        A validated game description.

    Returns
    -------
    RiccatiSolution
        P[T] = terminal weights exactly; for t = T-1..0 the gains are
        solved first and then the cost matrices stepped backward.
    """
    n, m, T = spec.n, spec.m, spec.T
    P1 = np.empty((T + 1, n, n))
    P2 = np.empty((T + 1, n, n))
    L1 = np.empty((T, m, n))
    L2 = np.empty((T, m, n))
    P1[T] = spec.Q1
    P2[T] = spec.Q2
    for t in range(T - 1, -1, -1):
        try:
            L1[t], L2[t] = solve_gains_at(P1[t + 1], P2[t + 1], spec)
        except SingularSystemError as exc:
            raise SingularSystemError(f"stage {t}: {exc}") from exc
        P1[t], P2[t] = riccati_step(P1[t + 1], P2[t + 1], L1[t], L2[t], spec)
    out = RiccatiSolution(P1=P1, P2=P2, L1=L1, L2=L2)
    for arr in (out.P1, out.P2, out.L1, out.L2):
        arr.setflags(write=False)
    return out

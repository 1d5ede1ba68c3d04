"""Backward induction over the reachable covariance tree.

Because the switch either resets the error covariance to zero or lets it
grow along the deterministic map f(M) = A M A' + S, every covariance that
can occur at stage k is an f-chain from either the zero matrix or the
initial covariance.  Nodes are therefore keyed by the observation age
(stages since the last closure, or "init" when none has happened) rather
than by matrix content, which keeps the per-stage node count at k+1 and
the total number of stored value evaluations within T(T+3).

The joint closure decision at a node is 1 only when the closed branch is
strictly cheaper for BOTH players; exact ties stay open.  The same tree
also carries the centralized welfare benchmark and the per-node social
loss (price of anarchy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .estimator import covariance_path, predict_cov
from .model import GameSpec
from .riccati import RiccatiSolution


@dataclass(frozen=True)
class ObsAge:
    """Stages since the switch last closed; tau=None if it never has."""

    tau: int | None = None

    def __post_init__(self):
        if self.tau is not None and self.tau < 1:
            raise ValueError("observation age must be >= 1 (or None for init)")

    @property
    def is_init(self) -> bool:
        return self.tau is None

    def successor(self) -> "ObsAge":
        """Age after one more open stage; init stays init."""
        return self if self.is_init else ObsAge(self.tau + 1)

    @property
    def label(self) -> str:
        return "init" if self.is_init else str(self.tau)

    def __repr__(self) -> str:
        return f"ObsAge({self.label})"


INIT = ObsAge(None)


def since(tau: int) -> ObsAge:
    return ObsAge(tau)


@dataclass
class CovNode:
    """One reachable predicted-covariance node with its values and decisions."""

    k: int
    age: ObsAge
    M_pred: np.ndarray
    V1: float = math.nan
    V2: float = math.nan
    delta_star: int = 0
    Vw: float | None = None
    delta_central: int | None = None
    poa: float | None = None

    def V(self, player: int) -> float:
        return self.V1 if player == 1 else self.V2


@dataclass
class ValueTables:
    """Per-stage reachable nodes plus the stored-evaluation counter."""

    nodes: list[dict[ObsAge, CovNode]]
    eval_count: int = 0

    @property
    def horizon(self) -> int:
        return len(self.nodes) - 1

    def node(self, k: int, age: ObsAge) -> CovNode:
        if k < 0 or k > self.horizon or age not in self.nodes[k]:
            raise KeyError(f"unreachable node (k={k}, age={age.label if isinstance(age, ObsAge) else age})")
        return self.nodes[k][age]

    def all_nodes(self):
        for stage in self.nodes:
            yield from stage.values()


@dataclass(frozen=True)
class SwitchPolicy:
    """Joint closure decision per (stage, observation age); both players play it."""

    T: int
    decision: Mapping[tuple[int, ObsAge], int]

    def delta(self, k: int, age: ObsAge) -> int:
        try:
            return self.decision[(k, age)]
        except KeyError:
            raise KeyError(f"no decision stored for (k={k}, age={age.label})") from None

    def replay(self) -> list[int]:
        """Forward replay from the init node; deterministic schedule of length T."""
        age = INIT
        out = []
        for k in range(self.T):
            d = self.delta(k, age)
            out.append(d)
            age = since(1) if d else age.successor()
        return out


def never_close_policy(T: int) -> SwitchPolicy:
    """The forced-open baseline: delta = 0 at every reachable node."""
    decision = {}
    for k in range(T):
        decision[(k, INIT)] = 0
        for tau in range(1, k + 1):
            decision[(k, since(tau))] = 0
    return SwitchPolicy(T=T, decision=decision)


def stage_cost(
    M_pred: np.ndarray,
    delta: int,
    t: int,
    player: int,
    ric: RiccatiSolution,
    spec: GameSpec,
) -> float:
    """Reduced per-stage cost in covariance space.

    Open:   tr(Q_i M_pred).
    Closed: tr(M_pred P_i[t]) + lambda_i  (the estimate-jump penalty plus
    the switching fee; the stage error cost vanishes because the error is
    reset to zero).  The terminal stage admits no closure.
    """
    if not 0 <= t <= spec.T:
        raise ValueError(f"stage {t} outside 0..{spec.T}")
    if t == spec.T:
        if delta:
            raise ValueError("no switching action at the terminal stage")
        return float(np.trace(spec.Q(player) @ M_pred))
    if delta:
        return float(np.trace(M_pred @ ric.P(player)[t])) + spec.lam(player)
    return float(np.trace(spec.Q(player) @ M_pred))


def reachable_nodes(spec: GameSpec) -> list[dict[ObsAge, np.ndarray]]:
    """Predicted covariances of every reachable node, stage by stage.

    Stage 0 holds only the init node (M_pred = Sigma0).  Each later stage
    holds the one-stage-old node (M_pred = f(0) = S symmetrized) plus the
    aged successor of every previous node.  Matrices are built
    incrementally so each one is exactly the f-chain from its root.
    """
    zero = np.zeros((spec.n, spec.n))
    stages: list[dict[ObsAge, np.ndarray]] = [{INIT: np.array(spec.Sigma0, dtype=float)}]
    for k in range(spec.T):
        nxt = {since(1): predict_cov(zero, spec)}
        for age, M in stages[k].items():
            nxt[age.successor()] = predict_cov(M, spec)
        stages.append(nxt)
    return stages


def _build_nodes(spec: GameSpec) -> list[dict[ObsAge, CovNode]]:
    return [
        {age: CovNode(k=k, age=age, M_pred=M) for age, M in stage.items()}
        for k, stage in enumerate(reachable_nodes(spec))
    ]


def backward_induction(
    spec: GameSpec, ric: RiccatiSolution
) -> tuple[ValueTables, SwitchPolicy]:
    """Equilibrium values and the best joint switching policy.

    At each node both branches are evaluated against the next-stage
    equilibrium values: the closed branch continues at the one-stage-old
    node, the open branch at the aged node.  delta_star = 1 iff the closed
    branch is strictly smaller for both players (ties stay open), and the
    node stores the values of the branch actually played.
    """
    T = spec.T
    nodes = _build_nodes(spec)
    for node in nodes[T].values():
        node.V1 = stage_cost(node.M_pred, 0, T, 1, ric, spec)
        node.V2 = stage_cost(node.M_pred, 0, T, 2, ric, spec)
        node.delta_star = 0
    eval_count = 0
    decision: dict[tuple[int, ObsAge], int] = {}
    for k in range(T - 1, -1, -1):
        closed_child = nodes[k + 1][since(1)]
        # n_k open-branch children plus the shared closed-branch child,
        # for each of the two players.
        eval_count += 2 * (len(nodes[k]) + 1)
        for age, node in nodes[k].items():
            open_child = nodes[k + 1][age.successor()]
            closed1 = stage_cost(node.M_pred, 1, k, 1, ric, spec) + closed_child.V1
            closed2 = stage_cost(node.M_pred, 1, k, 2, ric, spec) + closed_child.V2
            open1 = stage_cost(node.M_pred, 0, k, 1, ric, spec) + open_child.V1
            open2 = stage_cost(node.M_pred, 0, k, 2, ric, spec) + open_child.V2
            close = closed1 < open1 and closed2 < open2
            node.delta_star = int(close)
            node.V1, node.V2 = (closed1, closed2) if close else (open1, open2)
            decision[(k, age)] = node.delta_star
    return ValueTables(nodes=nodes, eval_count=eval_count), SwitchPolicy(T=T, decision=decision)


def switch_decision(k: int, age: ObsAge, tables: ValueTables) -> int:
    """The stored joint equilibrium decision at a reachable node."""
    if k >= tables.horizon:
        raise ValueError("no switching action at the terminal stage")
    return tables.node(k, age).delta_star


def _branch_values(k, age, tables, ric, spec, player):
    node = tables.node(k, age)
    closed_child = tables.node(k + 1, since(1))
    open_child = tables.node(k + 1, age.successor())
    closed = stage_cost(node.M_pred, 1, k, player, ric, spec) + closed_child.V(player)
    opened = stage_cost(node.M_pred, 0, k, player, ric, spec) + open_child.V(player)
    return closed, opened


def switching_threshold(
    k: int,
    age: ObsAge,
    tables: ValueTables,
    ric: RiccatiSolution,
    spec: GameSpec,
    player: int,
    on_propagated_cov: bool = False,
) -> float:
    """Largest switching fee for which the player strictly prefers closing.

    Expanding the branch comparison gives

        lambda_i < V_open_child - V_closed_child - tr((P_i[k] - Q_i) M)

    with M the node's predicted covariance.  `on_propagated_cov` instead
    places the trace on the one-step-propagated covariance f(M); that
    variant is a diagnostic only and is not used for decisions.
    """
    if k >= tables.horizon:
        raise ValueError("no switching action at the terminal stage")
    node = tables.node(k, age)
    v_open = tables.node(k + 1, age.successor()).V(player)
    v_closed = tables.node(k + 1, since(1)).V(player)
    arg = tables.node(k + 1, age.successor()).M_pred if on_propagated_cov else node.M_pred
    penalty = float(np.trace((ric.P(player)[k] - spec.Q(player)) @ arg))
    return v_open - v_closed - penalty


def switching_ratio(
    k: int,
    age: ObsAge,
    tables: ValueTables,
    ric: RiccatiSolution,
    spec: GameSpec,
    player: int,
) -> float:
    """Open-branch over closed-branch cost ratio (> 1 means closing is cheaper)."""
    closed, opened = _branch_values(k, age, tables, ric, spec, player)
    return opened / closed


def centralized_induction(
    spec: GameSpec,
    ric: RiccatiSolution,
    tables: ValueTables | None = None,
) -> tuple[ValueTables, SwitchPolicy]:
    """Welfare benchmark: one agent controls the switch to minimize the cost sum.

    Runs the same recursion on the welfare objective (sum of the two
    players' reduced stage costs, so a closure pays both fees) and closes
    iff the closed branch is strictly smaller; ties stay open.  Fills Vw
    and delta_central on the given tables (or a fresh node set) and
    returns them with the centralized policy.  Per-player components are
    tracked so Vw is exactly the sum of the two players' costs under the
    centralized policy.
    """
    T = spec.T
    if tables is None:
        tables = ValueTables(nodes=_build_nodes(spec))
    nodes = tables.nodes
    comp: dict[ObsAge, tuple[float, float]] = {}
    for age, node in nodes[T].items():
        c1 = stage_cost(node.M_pred, 0, T, 1, ric, spec)
        c2 = stage_cost(node.M_pred, 0, T, 2, ric, spec)
        node.Vw = c1 + c2
        node.delta_central = 0
        comp[age] = (c1, c2)
    decision: dict[tuple[int, ObsAge], int] = {}
    for k in range(T - 1, -1, -1):
        nxt: dict[ObsAge, tuple[float, float]] = {}
        closed_comp = comp[since(1)]
        for age, node in nodes[k].items():
            open_comp = comp[age.successor()]
            closed1 = stage_cost(node.M_pred, 1, k, 1, ric, spec) + closed_comp[0]
            closed2 = stage_cost(node.M_pred, 1, k, 2, ric, spec) + closed_comp[1]
            open1 = stage_cost(node.M_pred, 0, k, 1, ric, spec) + open_comp[0]
            open2 = stage_cost(node.M_pred, 0, k, 2, ric, spec) + open_comp[1]
            close = (closed1 + closed2) < (open1 + open2)
            node.delta_central = int(close)
            pair = (closed1, closed2) if close else (open1, open2)
            node.Vw = pair[0] + pair[1]
            nxt[age] = pair
            decision[(k, age)] = node.delta_central
        comp = nxt
    return tables, SwitchPolicy(T=T, decision=decision)


def price_of_anarchy(tables: ValueTables) -> dict[tuple[int, str], float]:
    """Per-node social loss l = V1 + V2 - Vw; fills node.poa and returns the map."""
    out: dict[tuple[int, str], float] = {}
    for node in tables.all_nodes():
        if node.Vw is None:
            raise ValueError("welfare values missing: run centralized_induction first")
        node.poa = (node.V1 + node.V2) - node.Vw
        out[(node.k, node.age.label)] = node.poa
    return out


def expected_total_cost(tables: ValueTables) -> tuple[float, float]:
    """Expected equilibrium cost of each player from stage 0.

    Equals the init-node values: the omitted quadratic term in the
    initial prediction vanishes under the zero-mean initial state.
    """
    root = tables.node(0, INIT)
    return root.V1, root.V2


def schedule_cost(
    spec: GameSpec, ric: RiccatiSolution, schedule
) -> tuple[float, float]:
    """Expected per-player cost of playing a fixed schedule, by direct summation.

    Walks the deterministic covariance path and sums the reduced stage
    costs (accumulated from the terminal stage backward so the result is
    comparable with the recursion at full precision).  No value tables
    are involved.
    """
    M_pred, _ = covariance_path(spec, schedule)
    total1 = total2 = 0.0
    for t in range(spec.T, -1, -1):
        delta = int(schedule[t]) if t < spec.T else 0
        total1 = stage_cost(M_pred[t], delta, t, 1, ric, spec) + total1
        total2 = stage_cost(M_pred[t], delta, t, 2, ric, spec) + total2
    return total1, total2

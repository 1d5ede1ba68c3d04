"""Shared fixtures: the two shipped configurations and randomized games."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from lqswitch import (
    GameSpec,
    RiccatiSolution,
    SwitchPolicy,
    ValueTables,
    backward_induction,
    centralized_induction,
    load_spec,
    price_of_anarchy,
    solve_riccati,
    validate_spec,
)

ROOT = Path(__file__).resolve().parents[1]
EXAMPLES = ROOT / "examples"


def load_config(name: str) -> GameSpec:
    return validate_spec(load_spec((EXAMPLES / name).read_text()))


@dataclass(frozen=True)
class Solved:
    spec: GameSpec
    ric: RiccatiSolution
    tables: ValueTables
    policy: SwitchPolicy
    central: SwitchPolicy


def solve_all(spec: GameSpec) -> Solved:
    ric = solve_riccati(spec)
    tables, policy = backward_induction(spec, ric)
    _, central = centralized_induction(spec, ric, tables)
    price_of_anarchy(tables)
    return Solved(spec=spec, ric=ric, tables=tables, policy=policy, central=central)


@pytest.fixture(scope="session")
def paper_spec() -> GameSpec:
    return load_config("paper_sim.json")


@pytest.fixture(scope="session")
def scalar_spec() -> GameSpec:
    return load_config("scalar.json")


@pytest.fixture(scope="session")
def paper_solved(paper_spec) -> Solved:
    return solve_all(paper_spec)


@pytest.fixture(scope="session")
def scalar_solved(scalar_spec) -> Solved:
    return solve_all(scalar_spec)


def _psd(rng, k: int, scale: float = 1.0, singular_ok: bool = True) -> np.ndarray:
    rank = k if not singular_ok or rng.random() < 0.7 else max(1, k - 1)
    F = rng.normal(size=(k, rank))
    M = scale * (F @ F.T) / k
    return 0.5 * (M + M.T)


def random_game(rng, n=None, m=None, T=None, symmetric=False) -> GameSpec:
    """A validated random game; `symmetric` builds bitwise-equal players."""
    n = n if n is not None else int(rng.integers(1, 5))
    m = m if m is not None else int(rng.integers(1, 5))
    T = T if T is not None else int(rng.integers(1, 11))
    A = rng.normal(size=(n, n))
    rho = float(np.max(np.abs(np.linalg.eigvals(A))))
    if rho > 0:
        A = A / rho * rng.uniform(0.6, 1.15)
    B1 = rng.normal(size=(n, m))
    B2 = B1.copy() if symmetric else rng.normal(size=(n, m))
    S = _psd(rng, n, 0.5)
    Sigma0 = _psd(rng, n, 0.5) if rng.random() < 0.7 else np.zeros((n, n))
    Q1 = _psd(rng, n)
    Q2 = Q1.copy() if symmetric else _psd(rng, n)
    Q11 = _psd(rng, m, 0.5, singular_ok=False) + np.eye(m) * rng.uniform(0.2, 1.0)
    if symmetric:
        # fully interchangeable players: equal dynamics channels, equal
        # state weights, and all four control weights identical
        Q22, Q12, Q21 = Q11.copy(), Q11.copy(), Q11.copy()
    else:
        Q22 = _psd(rng, m, 0.5, singular_ok=False) + np.eye(m) * rng.uniform(0.2, 1.0)
        Q12 = np.zeros((m, m)) if rng.random() < 0.5 else _psd(rng, m, 0.3)
        Q21 = np.zeros((m, m)) if rng.random() < 0.5 else _psd(rng, m, 0.3)
    lam1 = float(rng.uniform(0.05, 3.0))
    lam2 = lam1 if symmetric else float(rng.uniform(0.05, 3.0))
    spec = GameSpec(
        n=n, m=m, T=T, A=A, B1=B1, B2=B2, S=S, Sigma0=Sigma0,
        Q1=Q1, Q2=Q2, Q11=Q11, Q22=Q22, Q12=Q12, Q21=Q21,
        lambda1=lam1, lambda2=lam2,
    )
    return validate_spec(spec)

"""Game description: parameters of the two-player LQ game and their validation.

A game is specified by the linear dynamics (A, B1, B2), the process and
initial-state covariances (S, Sigma0), the quadratic cost weights
(Q1, Q2, Q11, Q22, Q12, Q21) and the per-closure switching fees
(lambda1, lambda2).  The horizon T counts stages 0..T; controls and
switching decisions exist for stages 0..T-1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

import numpy as np

# Symmetry / eigenvalue tolerance for double-precision inputs.
CHECK_TOL = 1e-10

_MATRIX_SHAPES = {
    "A": ("n", "n"),
    "B1": ("n", "m"),
    "B2": ("n", "m"),
    "S": ("n", "n"),
    "Sigma0": ("n", "n"),
    "Q1": ("n", "n"),
    "Q2": ("n", "n"),
    "Q11": ("m", "m"),
    "Q22": ("m", "m"),
    "Q12": ("m", "m"),
    "Q21": ("m", "m"),
}

_SYMMETRIC = ("S", "Sigma0", "Q1", "Q2", "Q11", "Q22", "Q12", "Q21")
_PSD = ("S", "Sigma0", "Q1", "Q2", "Q12", "Q21")
_PD = ("Q11", "Q22")


class SpecFormatError(ValueError):
    """The configuration document is malformed or has inconsistent shapes."""


class SpecValidationError(ValueError):
    """The game parameters violate the model assumptions."""


@dataclass(frozen=True)
class GameSpec:
    """All parameters of one game instance.

    Matrices are float64 numpy arrays; the instance is treated as
    immutable after validation and may be shared freely.
    """

    n: int
    m: int
    T: int
    A: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    S: np.ndarray
    Sigma0: np.ndarray
    Q1: np.ndarray
    Q2: np.ndarray
    Q11: np.ndarray
    Q22: np.ndarray
    Q12: np.ndarray
    Q21: np.ndarray
    lambda1: float
    lambda2: float

    def B(self, player: int) -> np.ndarray:
        return self.B1 if player == 1 else self.B2

    def Q(self, player: int) -> np.ndarray:
        return self.Q1 if player == 1 else self.Q2

    def Qown(self, player: int) -> np.ndarray:
        """Weight on the player's own control."""
        return self.Q11 if player == 1 else self.Q22

    def Qcross(self, player: int) -> np.ndarray:
        """Weight the player pays on the opponent's control."""
        return self.Q12 if player == 1 else self.Q21

    def lam(self, player: int) -> float:
        return self.lambda1 if player == 1 else self.lambda2


def load_spec(text: str) -> GameSpec:
    """Parse a JSON configuration document into a GameSpec.

    Matrices are given as row-major nested arrays whose shapes must match
    the declared dimensions n, m.  Raises SpecFormatError on malformed
    documents or shape mismatches.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"configuration is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecFormatError("configuration must be a JSON object")

    def _int(key):
        if key not in doc:
            raise SpecFormatError(f"missing field: {key}")
        v = doc[key]
        if not isinstance(v, int) or isinstance(v, bool):
            raise SpecFormatError(f"{key}: expected an integer, got {v!r}")
        return v

    def _float(key):
        if key not in doc:
            raise SpecFormatError(f"missing field: {key}")
        v = doc[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SpecFormatError(f"{key}: expected a number, got {v!r}")
        return float(v)

    n, m, T = _int("n"), _int("m"), _int("T")
    dims = {"n": n, "m": m}

    def _matrix(key):
        if key not in doc:
            raise SpecFormatError(f"missing field: {key}")
        rows_name, cols_name = _MATRIX_SHAPES[key]
        rows, cols = dims[rows_name], dims[cols_name]
        v = doc[key]
        if not isinstance(v, list) or len(v) != rows or any(
            not isinstance(r, list) or len(r) != cols for r in v
        ):
            raise SpecFormatError(
                f"{key}: expected a {rows}x{cols} nested array ({rows_name}x{cols_name})"
            )
        try:
            return np.array(v, dtype=float)
        except (TypeError, ValueError) as exc:
            raise SpecFormatError(f"{key}: non-numeric entry: {exc}") from exc

    matrices = {key: _matrix(key) for key in _MATRIX_SHAPES}
    return GameSpec(
        n=n,
        m=m,
        T=T,
        lambda1=_float("lambda1"),
        lambda2=_float("lambda2"),
        **matrices,
    )


def dump_spec(spec: GameSpec) -> str:
    """Serialize a GameSpec back to the JSON document format.

    Round-trips bit-exactly with load_spec (floats are emitted with
    shortest round-trippable repr).
    """
    doc = {"n": spec.n, "m": spec.m, "T": spec.T}
    for key in _MATRIX_SHAPES:
        doc[key] = getattr(spec, key).tolist()
    doc["lambda1"] = spec.lambda1
    doc["lambda2"] = spec.lambda2
    return json.dumps(doc, indent=2)


def validate_spec(spec: GameSpec) -> GameSpec:
    """Check all model assumptions; return the spec unchanged if they hold.

    Collects every violation and raises a single SpecValidationError
    naming each one.  Symmetry is checked within CHECK_TOL in max norm,
    semidefiniteness via the smallest eigenvalue.
    """
    problems: list[str] = []

    for key, bound in (("n", spec.n), ("m", spec.m), ("T", spec.T)):
        if not isinstance(bound, (int, np.integer)) or bound <= 0:
            problems.append(f"{key}: must be a positive integer")
    if problems:
        raise SpecValidationError("; ".join(problems))

    dims = {"n": spec.n, "m": spec.m}
    for key, (rn, cn) in _MATRIX_SHAPES.items():
        mat = getattr(spec, key)
        expected = (dims[rn], dims[cn])
        if not isinstance(mat, np.ndarray) or mat.shape != expected:
            problems.append(f"{key}: dimension mismatch, expected shape {expected}")
    if problems:
        raise SpecValidationError("; ".join(problems))

    for key in _SYMMETRIC:
        mat = getattr(spec, key)
        if np.max(np.abs(mat - mat.T)) > CHECK_TOL:
            problems.append(f"{key}: not symmetric")
    for key in _PSD:
        mat = getattr(spec, key)
        if np.min(np.linalg.eigvalsh(0.5 * (mat + mat.T))) < -CHECK_TOL:
            problems.append(f"{key}: not positive semidefinite")
    for key in _PD:
        mat = getattr(spec, key)
        if np.min(np.linalg.eigvalsh(0.5 * (mat + mat.T))) <= CHECK_TOL:
            problems.append(f"{key}: not positive definite")
    if spec.lambda1 <= 0:
        problems.append("lambda1: nonpositive switch cost")
    if spec.lambda2 <= 0:
        problems.append("lambda2: nonpositive switch cost")

    if problems:
        raise SpecValidationError("; ".join(problems))
    return spec


def spec_fields() -> tuple[str, ...]:
    return tuple(f.name for f in fields(GameSpec))

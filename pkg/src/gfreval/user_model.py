"""Attention decay and per-rank utility of the cascade user model."""

from __future__ import annotations

import enum
from typing import Sequence

import numpy as np

from .core import MAX_GRADE
from .errors import DomainError

DEFAULT_DECAY_PHI = 0.85
DEFAULT_IRBU_PHI = 0.99


class DecayKind(str, enum.Enum):
    ERR = "err"
    RBP = "rbp"


class UtilityKind(str, enum.Enum):
    ERR = "err"
    IRBU = "irbu"

    @property
    def label(self) -> str:
        return "ERR" if self is UtilityKind.ERR else "iRBU"


def _check_phi(phi: float) -> None:
    if not (0.0 < phi < 1.0):
        raise DomainError(f"patience {phi!r} outside (0, 1)")


def rel_prob(grade: int) -> float:
    """Probability that an item of this grade satisfies the user."""
    if grade < 0:
        raise DomainError(f"negative grade {grade!r}")
    g = min(int(grade), MAX_GRADE)
    return (2.0**g - 1.0) / 2.0**g


def cascade_decay(stop_probs: Sequence[float]) -> np.ndarray:
    """Probability that the user stops exactly at each rank."""
    probs = np.asarray(stop_probs, dtype=float)
    out = np.empty_like(probs)
    reach = 1.0
    for k, p in enumerate(probs):
        out[k] = p * reach
        reach *= 1.0 - p
    return out


def err_decay_sequence(grades: Sequence[int]) -> np.ndarray:
    if len(grades) == 0:
        raise DomainError("empty grade sequence")
    return cascade_decay([rel_prob(g) for g in grades])


def rbp_decay_sequence(length: int, phi: float = DEFAULT_DECAY_PHI) -> np.ndarray:
    if length < 1:
        raise DomainError("decay sequence needs at least one rank")
    _check_phi(phi)
    return (1.0 - phi) * phi ** np.arange(length, dtype=float)


def decay_sequence(
    kind: DecayKind | str,
    length: int,
    grades: Sequence[int] | None = None,
    phi: float = DEFAULT_DECAY_PHI,
) -> np.ndarray:
    kind = DecayKind(kind)
    if kind is DecayKind.RBP:
        return rbp_decay_sequence(length, phi)
    if grades is None:
        raise DomainError("ERR-based decay needs relevance grades")
    if len(grades) != length:
        raise DomainError("one grade per rank is required")
    return err_decay_sequence(grades)


def utility(kind: UtilityKind | str, k: int, phi: float = DEFAULT_IRBU_PHI) -> float:
    """Utility of stopping at rank ``k``: 1/k (ERR) or phi**k (iRBU)."""
    if k < 1:
        raise DomainError("ranks start at 1")
    if UtilityKind(kind) is UtilityKind.ERR:
        return 1.0 / k
    _check_phi(phi)
    return phi**k


def utility_sequence(kind: UtilityKind | str, length: int, phi: float = DEFAULT_IRBU_PHI) -> np.ndarray:
    return np.array([utility(kind, k, phi) for k in range(1, length + 1)])

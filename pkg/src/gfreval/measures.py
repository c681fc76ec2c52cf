"""Group fairness (GF), its combination with relevance (GFR), polarity and
intersectional aggregation.

GF for one attribute set is the decay-weighted sum, over ranks k, of the
similarity between the average membership of the top k items and the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .core import AttributeSet, Distribution
from .divergence import DivergenceKind, check_kind, jsd, nmd, rnod
from .errors import DomainError
from .user_model import (
    DEFAULT_DECAY_PHI,
    DEFAULT_IRBU_PHI,
    DecayKind,
    UtilityKind,
    decay_sequence,
    err_decay_sequence,
    utility_sequence,
)

WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True, order=True)
class TopicScore:
    run: str
    topic: str
    measure: str
    value: float


_ARRAY_DIV = {DivergenceKind.JSD: jsd, DivergenceKind.NMD: nmd, DivergenceKind.RNOD: rnod}


@dataclass(frozen=True)
class GfConfig:
    """Settings for GF/GFR scoring.

    ``divergences`` maps attribute-set names to the divergence used for that
    set; its order is the order of ``weights[1:]``. ``weights`` is
    ``(w_0, w_1, ..., w_M)`` with ``w_0`` the relevance weight; ``None`` means
    equal weights over the available components.
    """

    divergences: Mapping[str, DivergenceKind] = field(default_factory=dict)
    cutoff: int = 10
    decay: DecayKind = DecayKind.ERR
    decay_phi: float = DEFAULT_DECAY_PHI
    utility: UtilityKind = UtilityKind.ERR
    utility_phi: float = DEFAULT_IRBU_PHI
    weights: tuple[float, ...] | None = None
    has_relevance: bool = True

    def __post_init__(self):
        object.__setattr__(
            self,
            "divergences",
            MappingProxyType({k: DivergenceKind(v) for k, v in self.divergences.items()}),
        )
        object.__setattr__(self, "decay", DecayKind(self.decay))
        object.__setattr__(self, "utility", UtilityKind(self.utility))
        if self.cutoff < 1:
            raise DomainError("cutoff must be at least 1")
        if not self.has_relevance and self.decay is DecayKind.ERR:
            raise DomainError("ERR-based decay needs relevance judgments; use RBP decay")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
            self.weight_vector()

    @property
    def set_names(self) -> list[str]:
        return list(self.divergences)

    def weight_vector(self) -> np.ndarray:
        m = len(self.divergences)
        if self.weights is None:
            if self.has_relevance:
                return np.full(m + 1, 1.0 / (m + 1))
            if m == 0:
                raise DomainError("nothing to weight: no relevance and no attribute sets")
            return np.concatenate([[0.0], np.full(m, 1.0 / m)])
        w = check_weights(self.weights, m + 1)
        if not self.has_relevance and w[0] != 0.0:
            raise DomainError("w_0 must be 0 when no relevance judgments are available")
        return w


def check_weights(weights: Sequence[float], expected: int) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (expected,):
        raise DomainError(f"expected {expected} weights, got {len(w)}")
    if np.any(w < 0):
        raise DomainError("weights must be non-negative")
    if abs(math.fsum(w) - 1.0) > WEIGHT_TOLERANCE:
        raise DomainError(f"weights sum to {math.fsum(w)!r}, not 1")
    return w


def _membership_matrix(memberships: Sequence[Distribution], aset: AttributeSet) -> np.ndarray:
    for m in memberships:
        if m.attribute_set != aset:
            raise DomainError(
                f"membership over {m.attribute_set.name!r} compared with a target over {aset.name!r}"
            )
    return np.array([m.probs for m in memberships], dtype=float).reshape(len(memberships), len(aset))


def prefix_similarities(
    memberships: Sequence[Distribution], pstar: Distribution, kind: DivergenceKind | str
) -> np.ndarray:
    """DistrSim between the achieved distribution at each rank and ``pstar``."""
    kind = check_kind(kind, pstar.attribute_set)
    mat = _membership_matrix(memberships, pstar.attribute_set)
    if len(mat) == 0:
        raise DomainError("empty ranked list")
    prefix = np.cumsum(mat, axis=0) / np.arange(1, len(mat) + 1)[:, None]
    gold = pstar.as_array()
    div = _ARRAY_DIV[kind]
    return np.array([1.0 - div(row, gold) for row in prefix])


def gf(
    memberships: Sequence[Distribution],
    decay: Sequence[float],
    pstar: Distribution,
    kind: DivergenceKind | str = DivergenceKind.JSD,
) -> float:
    """Group fairness of a ranked list for one attribute set."""
    decay = np.asarray(decay, dtype=float)
    if len(decay) != len(memberships):
        raise DomainError("one decay weight per rank is required")
    sims = prefix_similarities(memberships, pstar, kind)
    return float(np.dot(decay, sims))


def relevance_score(
    kind: UtilityKind | str, grades: Sequence[int], phi: float = DEFAULT_IRBU_PHI
) -> float:
    """ERR or iRBU: ERR-based decay times per-rank utility."""
    decay = err_decay_sequence(grades)
    return float(np.dot(decay, utility_sequence(kind, len(grades), phi)))


def gfr(weights: Sequence[float], relevance: float | None, gf_scores: Sequence[float]) -> float:
    """Weighted average of relevance (``weights[0]``) and per-set GF scores."""
    w = check_weights(weights, len(gf_scores) + 1)
    if relevance is None:
        if w[0] != 0.0:
            raise DomainError("relevance weight is non-zero but no relevance score was given")
        relevance = 0.0
    return float(w[0] * relevance + np.dot(w[1:], np.asarray(gf_scores, dtype=float)))


def gfr_integrated(
    config: GfConfig,
    grades: Sequence[int] | None,
    memberships: Mapping[str, Sequence[Distribution]],
    targets: Mapping[str, Distribution],
) -> float:
    """GFR in a single pass over ranks: sum of decay times the weighted
    mix of per-rank utility and per-set similarity."""
    w = config.weight_vector()
    names = config.set_names
    length = len(memberships[names[0]]) if names else len(grades or ())
    if length == 0:
        raise DomainError("empty ranked list")
    decay = decay_sequence(config.decay, length, grades, config.decay_phi)
    per_rank = np.zeros(length)
    if w[0] != 0.0:
        if grades is None:
            raise DomainError("relevance weight is non-zero but no grades were given")
        per_rank += w[0] * utility_sequence(config.utility, length, config.utility_phi)
    for wm, name in zip(w[1:], names):
        if len(memberships[name]) != length:
            raise DomainError("all attribute sets need one membership per rank")
        per_rank += wm * prefix_similarities(memberships[name], targets[name], config.divergences[name])
    return float(np.dot(decay, per_rank))


def evaluate_list(
    config: GfConfig,
    grades: Sequence[int] | None,
    memberships: Mapping[str, Sequence[Distribution]],
    targets: Mapping[str, Distribution],
) -> dict[str, float]:
    """All GF/GFR measures for one ranked list already cut at ``config.cutoff``.

    Keys are ``GF_<DIV>@<set>``, the relevance measure name (when judged)
    and ``GFR``.
    """
    names = config.set_names
    length = len(memberships[names[0]]) if names else len(grades or ())
    out: dict[str, float] = {}
    if length == 0:
        raise DomainError("empty ranked list")
    decay = decay_sequence(config.decay, length, grades, config.decay_phi)
    gf_scores = []
    for name in names:
        score = gf(memberships[name], decay, targets[name], config.divergences[name])
        out[f"GF_{config.divergences[name].label}@{name}"] = score
        gf_scores.append(score)
    relevance = None
    if config.has_relevance and grades is not None:
        relevance = relevance_score(config.utility, grades, config.utility_phi)
        out[config.utility.label] = relevance
    out["GFR"] = gfr(config.weight_vector(), relevance, gf_scores)
    return out


def delta_gf(
    memberships: Sequence[Distribution],
    decay: Sequence[float],
    kind: DivergenceKind | str = DivergenceKind.JSD,
    aset: AttributeSet | None = None,
) -> float:
    """Polarity of a list over a binary attribute set.

    GF against an all-first-value target minus GF against an all-second-value
    target; positive means the list leans towards the first value.
    """
    if aset is None:
        if not memberships:
            raise DomainError("empty ranked list")
        aset = memberships[0].attribute_set
    if not aset.is_binary:
        raise DomainError(f"polarity needs a binary attribute set, {aset.name!r} has {len(aset)} values")
    first, second = aset.values
    return gf(memberships, decay, aset.one_hot(first), kind) - gf(memberships, decay, aset.one_hot(second), kind)


def intersectional_score(gf_scores: Sequence[float], weights: Sequence[float] | None = None) -> float:
    """Combine GF scores from several attribute sets without relevance."""
    if len(gf_scores) < 2:
        raise DomainError("intersectional scoring needs at least two attribute sets")
    if weights is None:
        weights = [1.0 / len(gf_scores)] * len(gf_scores)
    return gfr([0.0, *weights], None, gf_scores)

"""Prior-art measures used for comparison with GF/GFR.

Skew and NDKL (KL-based), mean attention / attention bias ratio / expected
cumulative exposure (geometric attention), nDCG, and the diversity measures
intent recall, D-nDCG and D#-nDCG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Distribution, TopicIntents, exponential_gain
from .divergence import DEFAULT_EPSILON, kld
from .errors import DomainError, UndefinedMeasureError


@dataclass(frozen=True)
class AttentionParams:
    """Geometric attention ``100 * p * (1 - p)**(k - 1)`` at rank k."""

    p: float = 0.15

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise DomainError(f"attention parameter {self.p!r} outside (0, 1)")

    def weights(self, length: int) -> np.ndarray:
        return 100.0 * self.p * (1.0 - self.p) ** np.arange(length, dtype=float)


def _value_index(d: Distribution, value: str | int) -> int:
    return value if isinstance(value, int) else d.attribute_set.index(value)


def skew(p_k: Distribution, pstar: Distribution, value: str | int, epsilon: float = 0.0) -> float:
    """Log ratio of achieved to target proportion for one attribute value.

    With ``epsilon > 0``, zero proportions on either side are replaced by
    ``epsilon``. Without smoothing a zero target is an error and a zero
    achieved proportion gives ``-inf``.
    """
    if p_k.attribute_set != pstar.attribute_set:
        raise DomainError("distributions are over different attribute sets")
    i = _value_index(p_k, value)
    achieved, target = p_k.probs[i], pstar.probs[i]
    if target == 0.0:
        if epsilon <= 0.0:
            raise UndefinedMeasureError("skew undefined for a value with zero target proportion")
        target = epsilon
    if achieved == 0.0:
        if epsilon <= 0.0:
            return -math.inf
        achieved = epsilon
    return math.log(achieved / target)


def skew_extremes(p_k: Distribution, pstar: Distribution, epsilon: float = 0.0) -> tuple[float, float]:
    skews = [skew(p_k, pstar, i, epsilon) for i in range(len(p_k.probs))]
    return min(skews), max(skews)


def _prefixes(memberships: Sequence[Distribution]) -> np.ndarray:
    if len(memberships) == 0:
        raise DomainError("empty ranked list")
    aset = memberships[0].attribute_set
    if any(m.attribute_set != aset for m in memberships):
        raise DomainError("memberships span different attribute sets")
    mat = np.array([m.probs for m in memberships], dtype=float)
    return np.cumsum(mat, axis=0) / np.arange(1, len(mat) + 1)[:, None]


def ndkl(memberships: Sequence[Distribution], pstar: Distribution, epsilon: float = DEFAULT_EPSILON) -> float:
    """Normalised discounted KL divergence over all prefixes of the list."""
    if memberships and memberships[0].attribute_set != pstar.attribute_set:
        raise DomainError("memberships and target are over different attribute sets")
    prefixes = _prefixes(memberships)
    discounts = 1.0 / np.log2(np.arange(2, len(prefixes) + 2))
    gold = pstar.as_array()
    klds = np.array([kld(row, gold, epsilon) for row in prefixes])
    return float(np.dot(discounts, klds) / discounts.sum())


def _membership_columns(memberships: Sequence[Distribution]) -> np.ndarray:
    if len(memberships) == 0:
        raise DomainError("empty ranked list")
    return np.array([m.probs for m in memberships], dtype=float)


def mean_attention(
    memberships: Sequence[Distribution], value: str | int, params: AttentionParams = AttentionParams()
) -> float:
    """Attention averaged over the ranks where ``value`` has membership mass."""
    mat = _membership_columns(memberships)
    col = mat[:, _value_index(memberships[0], value)]
    mass = col.sum()
    if mass == 0.0:
        raise UndefinedMeasureError(f"attribute value {value!r} never appears in the list")
    return float(np.dot(col, params.weights(len(col))) / mass)


def abr(memberships: Sequence[Distribution], params: AttentionParams = AttentionParams()) -> float:
    """Attention bias ratio: lowest over highest mean attention.

    A value that never appears counts as zero attention, so the ratio is 0.
    """
    mas = []
    for i in range(len(memberships[0].probs) if memberships else 0):
        try:
            mas.append(mean_attention(memberships, i, params))
        except UndefinedMeasureError:
            mas.append(0.0)
    if not mas:
        raise DomainError("empty ranked list")
    return min(mas) / max(mas)


def ece(
    memberships: Sequence[Distribution],
    params: AttentionParams = AttentionParams(),
    normalize: bool = False,
) -> np.ndarray:
    """Expected cumulative exposure per attribute value."""
    mat = _membership_columns(memberships)
    exposure = params.weights(len(mat)) @ mat
    if normalize:
        exposure = exposure / exposure.sum()
    return exposure


def dcg(gains: Sequence[float], cutoff: int) -> float:
    g = np.asarray(gains, dtype=float)[:cutoff]
    return float(np.sum(g / np.log2(np.arange(2, len(g) + 2))))


def ndcg_from_gains(gains: Sequence[float], ideal_pool: Sequence[float], cutoff: int) -> float:
    """nDCG@cutoff, every rank discounted by 1/log2(rank + 1)."""
    ideal = dcg(sorted(ideal_pool, reverse=True), cutoff)
    if ideal == 0.0:
        raise UndefinedMeasureError("ideal DCG is zero")
    return dcg(gains, cutoff) / ideal


def ndcg(grades: Sequence[int], ideal_grades: Sequence[int], cutoff: int) -> float:
    """nDCG over exponential gains; ``ideal_grades`` are all judged grades of the topic."""
    return ndcg_from_gains(
        [exponential_gain(g) for g in grades], [exponential_gain(g) for g in ideal_grades], cutoff
    )


def global_gain(item: str, intents: TopicIntents) -> float:
    """Intent-probability-weighted sum of the item's per-intent gains."""
    return math.fsum(p * intents.gain(item, i) for i, p in intents.probs.items())


def intent_recall(items: Sequence[str], intents: TopicIntents, cutoff: int) -> float:
    """Fraction of intents covered by at least one item in the top ``cutoff``."""
    top = items[:cutoff]
    covered = sum(1 for i in intents.probs if any(intents.gain(d, i) > 0 for d in top))
    return covered / len(intents.probs)


def d_ndcg(items: Sequence[str], intents: TopicIntents, cutoff: int) -> float:
    gains = [global_gain(d, intents) for d in items]
    ideal = [global_gain(d, intents) for d in intents.gains]
    return ndcg_from_gains(gains, ideal, cutoff)


def dsharp_ndcg(items: Sequence[str], intents: TopicIntents, cutoff: int) -> float:
    """Average of intent recall and D-nDCG."""
    return (intent_recall(items, intents, cutoff) + d_ndcg(items, intents, cutoff)) / 2.0

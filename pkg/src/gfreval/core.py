"""Domain types: attribute sets, distributions, runs, judgments, intents.

Everything here is immutable once constructed. Membership vectors are plain
:class:`Distribution` objects; hard membership is simply a one-hot vector.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError

#: Tolerance on the sum of a probability vector read from outside.
INGEST_TOLERANCE = 1e-6
#: Grades above this are clipped before exponentiation.
MAX_GRADE = 15


class Scale(str, enum.Enum):
    NOMINAL = "nominal"
    ORDINAL = "ordinal"


@dataclass(frozen=True)
class AttributeSet:
    """A named group of attribute values.

    For ordinal sets, ``values`` is given in ordinal order.
    """

    name: str
    values: tuple[str, ...]
    scale: Scale = Scale.NOMINAL

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "scale", Scale(self.scale))
        if len(self.values) < 2:
            raise DomainError(f"attribute set {self.name!r} needs at least 2 values")
        if len(set(self.values)) != len(self.values):
            raise DomainError(f"attribute set {self.name!r} has duplicate values")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def is_binary(self) -> bool:
        return len(self.values) == 2

    @property
    def supports_order(self) -> bool:
        """True when order-aware divergences (NMD, RNOD) are meaningful."""
        return self.scale is Scale.ORDINAL or self.is_binary

    def index(self, value: str) -> int:
        try:
            return self.values.index(value)
        except ValueError:
            raise DomainError(f"{value!r} is not a value of attribute set {self.name!r}") from None

    def uniform(self) -> "Distribution":
        n = len(self.values)
        return Distribution(self, (1.0 / n,) * n)

    def one_hot(self, value: str) -> "Distribution":
        probs = [0.0] * len(self.values)
        probs[self.index(value)] = 1.0
        return Distribution(self, probs)


def _normalise(probs: Sequence[float], tolerance: float) -> tuple[float, ...]:
    probs = tuple(float(p) for p in probs)
    for p in probs:
        if not (0.0 <= p <= 1.0):
            raise DomainError(f"probability {p!r} outside [0, 1]")
    total = math.fsum(probs)
    if abs(total - 1.0) > tolerance:
        raise DomainError(f"probabilities sum to {total!r}, not 1")
    # Anything within a few ulps is already normalised; skipping it keeps
    # renormalisation idempotent across parse/emit round-trips.
    if abs(total - 1.0) > len(probs) * 2.0**-52:
        probs = tuple(p / total for p in probs)
    return probs


@dataclass(frozen=True)
class Distribution:
    """A probability mass function over the values of one attribute set."""

    attribute_set: AttributeSet
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.probs) != len(self.attribute_set):
            raise DomainError(
                f"{len(self.probs)} probabilities for attribute set "
                f"{self.attribute_set.name!r} with {len(self.attribute_set)} values"
            )
        object.__setattr__(self, "probs", _normalise(self.probs, INGEST_TOLERANCE))

    @classmethod
    def from_mapping(cls, aset: AttributeSet, probs: Mapping[str, float]) -> "Distribution":
        vec = [0.0] * len(aset)
        for value, p in probs.items():
            vec[aset.index(value)] = p
        return cls(aset, vec)

    def __getitem__(self, value: str) -> float:
        return self.probs[self.attribute_set.index(value)]

    def as_array(self) -> np.ndarray:
        return np.array(self.probs, dtype=float)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.attribute_set.values, self.probs))


@dataclass(frozen=True)
class MembershipTable:
    """Group membership of items, keyed by (item id, attribute set name)."""

    entries: Mapping[tuple[str, str], Distribution] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))

    def get(self, item: str, aset_name: str) -> Distribution | None:
        return self.entries.get((item, aset_name))

    def __len__(self) -> int:
        return len(self.entries)


def resolve_membership(item: str, aset: AttributeSet, table: MembershipTable) -> Distribution:
    """Membership of ``item`` in ``aset``; uniform when the item is not labelled."""
    found = table.get(item, aset.name)
    if found is None:
        return aset.uniform()
    if found.attribute_set != aset:
        raise DomainError(f"membership of {item!r} refers to a different {aset.name!r} definition")
    return found


def achieved_distribution(memberships: Sequence[Distribution]) -> Distribution:
    """Average membership vector over a ranking prefix."""
    if len(memberships) == 0:
        raise DomainError("achieved distribution of an empty prefix")
    aset = memberships[0].attribute_set
    if any(m.attribute_set != aset for m in memberships):
        raise DomainError("memberships span different attribute sets")
    first = memberships[0].probs
    if all(m.probs == first for m in memberships):
        return memberships[0]
    mat = np.array([m.probs for m in memberships], dtype=float)
    return Distribution(aset, mat.mean(axis=0))


BINARY = AttributeSet("binary", ("a1", "a2"))


def membership_from_bias(b: float, aset: AttributeSet = BINARY) -> Distribution:
    """Convert a bias score in [-1, 1] to a binary membership vector.

    The first value receives ``(1 + b) / 2``.
    """
    if not aset.is_binary:
        raise DomainError("bias scores need a binary attribute set")
    if not (-1.0 <= b <= 1.0):
        raise DomainError(f"bias score {b!r} outside [-1, 1]")
    first = (1.0 + b) / 2.0
    return Distribution(aset, (first, 1.0 - first))


def membership_from_intent_gains(gains: Sequence[float], aset: AttributeSet | None = None) -> Distribution:
    """Soft membership over intents, proportional to per-intent gain.

    Items with no gain on any intent get the uniform distribution.
    """
    gains = [float(g) for g in gains]
    if any(g < 0 for g in gains):
        raise DomainError("per-intent gains must be non-negative")
    if aset is None:
        aset = AttributeSet("intents", tuple(f"i{j + 1}" for j in range(len(gains))))
    if len(gains) != len(aset):
        raise DomainError("one gain per intent is required")
    total = math.fsum(gains)
    if total == 0.0:
        return aset.uniform()
    return Distribution(aset, [g / total for g in gains])


def exponential_gain(grade: int) -> float:
    """Gain ``2**g - 1`` of a ``g``-relevant item."""
    if grade < 0:
        raise DomainError(f"negative grade {grade!r}")
    return float(2 ** min(int(grade), MAX_GRADE) - 1)


_NUM = re.compile(r"(\d+)")


def topic_sort_key(topic: str):
    """Natural sort so that topic '2' precedes topic '10'."""
    return [(0, int(t), "") if t.isdigit() else (1, 0, t) for t in _NUM.split(topic) if t]


@dataclass(frozen=True)
class Run:
    """Per-topic ranked lists. Order is rebuilt from scores: descending score,
    ties by ascending item id."""

    tag: str
    rankings: Mapping[str, tuple[tuple[str, float], ...]]

    def __post_init__(self):
        ordered = {}
        for topic, entries in self.rankings.items():
            entries = [(str(item), float(score)) for item, score in entries]
            items = [item for item, _ in entries]
            if len(set(items)) != len(items):
                raise DomainError(f"duplicate item in run {self.tag!r}, topic {topic!r}")
            ordered[topic] = tuple(sorted(entries, key=lambda e: (-e[1], e[0])))
        object.__setattr__(self, "rankings", MappingProxyType(ordered))

    @property
    def topics(self) -> list[str]:
        return sorted(self.rankings, key=topic_sort_key)

    def items(self, topic: str) -> list[str]:
        return [item for item, _ in self.rankings.get(topic, ())]


@dataclass(frozen=True)
class Qrels:
    """Graded judgments. Negative grades are stored as 0; unjudged items are 0."""

    grades: Mapping[str, Mapping[str, int]]

    def __post_init__(self):
        clean = {
            topic: MappingProxyType({item: max(0, int(g)) for item, g in judged.items()})
            for topic, judged in self.grades.items()
        }
        object.__setattr__(self, "grades", MappingProxyType(clean))

    @property
    def topics(self) -> list[str]:
        return sorted(self.grades, key=topic_sort_key)

    def grade(self, topic: str, item: str) -> int:
        return self.grades.get(topic, {}).get(item, 0)

    def judged(self, topic: str) -> frozenset[str]:
        return frozenset(self.grades.get(topic, {}))

    def grades_for(self, topic: str, items: Iterable[str]) -> list[int]:
        judged = self.grades.get(topic, {})
        return [judged.get(item, 0) for item in items]


@dataclass(frozen=True)
class TopicIntents:
    """Intents of one topic: probabilities Pr(i|q) and per-intent gains."""

    probs: Mapping[str, float]
    gains: Mapping[str, Mapping[str, float]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.probs:
            raise DomainError("a topic needs at least one intent")
        total = math.fsum(self.probs.values())
        if abs(total - 1.0) > INGEST_TOLERANCE or any(p < 0 for p in self.probs.values()):
            raise DomainError(f"intent probabilities sum to {total!r}, not 1")
        gains = {}
        for item, per_intent in self.gains.items():
            for intent, g in per_intent.items():
                if intent not in self.probs:
                    raise DomainError(f"gain for unknown intent {intent!r}")
                if g < 0:
                    raise DomainError("per-intent gains must be non-negative")
            gains[item] = MappingProxyType(dict(per_intent))
        object.__setattr__(self, "probs", MappingProxyType(dict(self.probs)))
        object.__setattr__(self, "gains", MappingProxyType(gains))

    @property
    def intents(self) -> list[str]:
        return list(self.probs)

    def gain(self, item: str, intent: str) -> float:
        return self.gains.get(item, {}).get(intent, 0.0)

    def gain_vector(self, item: str) -> list[float]:
        return [self.gain(item, i) for i in self.probs]

    def as_attribute_set(self, name: str = "intents") -> AttributeSet:
        if len(self.probs) < 2:
            raise DomainError("a single intent cannot form an attribute set")
        return AttributeSet(name, tuple(self.probs), Scale.NOMINAL)

    def target(self, name: str = "intents") -> Distribution:
        """Intent probabilities viewed as a target distribution."""
        return Distribution(self.as_attribute_set(name), list(self.probs.values()))

    def membership(self, item: str, name: str = "intents") -> Distribution:
        return membership_from_intent_gains(self.gain_vector(item), self.as_attribute_set(name))


@dataclass(frozen=True)
class IntentSet:
    topics: Mapping[str, TopicIntents]

    def __post_init__(self):
        object.__setattr__(self, "topics", MappingProxyType(dict(self.topics)))

    def __getitem__(self, topic: str) -> TopicIntents:
        return self.topics[topic]

    def __contains__(self, topic: str) -> bool:
        return topic in self.topics


def topic_grade(per_intent_grades: Iterable[int]) -> int:
    """Per-topic grade derived from per-intent grades (their maximum)."""
    return max((max(0, int(g)) for g in per_intent_grades), default=0)


"""Synthetic corpora, a brute-force GF oracle, and the two local-search rerankers.

The synthetic corpus mimics a local-search setting: each topic has a pool of
items carrying a binary stance label, a review-count group (ordinal, four
bins) and an owning company. Items with zero reviews get a mean rating of 0.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import io as gio
from .core import (
    AttributeSet,
    Distribution,
    IntentSet,
    MembershipTable,
    Qrels,
    Run,
    Scale,
    TopicIntents,
    exponential_gain,
)
from .io import ItemInfo, Targets

#: Statistical-parity target over review-count groups (0, 1-10, 11-100, >100).
REVCNT_TARGET = (0.452239, 0.220319, 0.227721, 0.0997214)
REVCNT_BOUNDS = (0, 10, 100)

STANCE = AttributeSet("stance", ("PRO", "CON"), Scale.NOMINAL)
REVCNT = AttributeSet("revcnt", ("g1", "g2", "g3", "g4"), Scale.ORDINAL)


@dataclass(frozen=True)
class SynthConfig:
    topics: int = 100
    runs: int = 18
    pool: int = 30
    depth: int = 20
    grade_probs: tuple[float, ...] = (0.5, 0.25, 0.15, 0.1)
    hardness: str = "hard"
    unlabelled_rate: float = 0.05
    chain_rate: float = 0.35
    seed: int = 1

    def __post_init__(self):
        if self.hardness not in ("hard", "soft"):
            raise ValueError("hardness must be 'hard' or 'soft'")
        if self.depth > self.pool:
            raise ValueError("depth cannot exceed pool size")


@dataclass
class SyntheticCorpus:
    attrsets: dict[str, AttributeSet]
    runs: list[Run]
    qrels: Qrels
    membership: MembershipTable
    targets: Targets
    items: dict[str, ItemInfo] = field(default_factory=dict)

    def texts(self) -> dict[str, str]:
        """Every file of the corpus, rendered in the toolkit's formats."""
        out = {}
        for name, writer, obj in (
            ("attrsets.txt", gio.emit_attrsets, self.attrsets),
            ("qrels.txt", gio.emit_qrels, self.qrels),
            ("membership.tsv", gio.emit_membership, self.membership),
            ("targets.tsv", gio.emit_targets, self.targets),
            ("items.tsv", gio.emit_items, self.items),
        ):
            buf = io.StringIO()
            writer(obj, buf)
            out[name] = buf.getvalue()
        for run in self.runs:
            buf = io.StringIO()
            gio.emit_run(run, buf)
            out[f"runs/{run.tag}.run"] = buf.getvalue()
        return out

    def write(self, out_dir: str | Path) -> list[Path]:
        out_dir = Path(out_dir)
        written = []
        for name, text in self.texts().items():
            path = out_dir / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8", newline="\n")
            written.append(path)
        return written


def revcnt_group(reviews: int) -> str:
    for value, bound in zip(REVCNT.values, REVCNT_BOUNDS):
        if reviews <= bound:
            return value
    return REVCNT.values[-1]


def _quantised_simplex(rng: np.random.Generator, n: int, resolution: int = 1000) -> list[float]:
    """Dirichlet draw rounded to multiples of 1/resolution, summing to exactly 1."""
    raw = rng.dirichlet(np.ones(n)) * resolution
    units = np.floor(raw).astype(int)
    for i in np.argsort(-(raw - units))[: resolution - units.sum()]:
        units[i] += 1
    return [u / resolution for u in units]


def _sample_reviews(rng: np.random.Generator) -> int:
    group = rng.choice(4, p=REVCNT_TARGET / np.sum(REVCNT_TARGET))
    if group == 0:
        return 0
    if group == 1:
        return int(rng.integers(1, 11))
    if group == 2:
        return int(rng.integers(11, 101))
    return int(rng.integers(101, 2000))


def gen_synthetic(config: SynthConfig = SynthConfig()) -> SyntheticCorpus:
    """Build a deterministic corpus from ``config.seed``."""
    rng = np.random.default_rng(config.seed)
    companies = [f"co{c:02d}" for c in range(8)]
    grade_p = np.asarray(config.grade_probs) / np.sum(config.grade_probs)

    entries: dict[tuple[str, str], Distribution] = {}
    items: dict[str, ItemInfo] = {}
    grades: dict[str, dict[str, int]] = {}
    pools: dict[str, list[str]] = {}
    for t in range(1, config.topics + 1):
        topic = str(t)
        pool = [f"t{t}-d{j:02d}" for j in range(config.pool)]
        pools[topic] = pool
        grades[topic] = {}
        for item in pool:
            grades[topic][item] = int(rng.choice(len(grade_p), p=grade_p))
            reviews = _sample_reviews(rng)
            rating = 0.0 if reviews == 0 else round(float(np.clip(2.5 + 0.4 * math.log1p(reviews) + rng.normal(0, 0.6), 1, 5)), 2)
            owner = str(rng.choice(companies)) if rng.random() < config.chain_rate else item
            items[item] = ItemInfo(owner, reviews, rating)
            entries[(item, REVCNT.name)] = REVCNT.one_hot(revcnt_group(reviews))
            if rng.random() < config.unlabelled_rate:
                continue
            if config.hardness == "hard":
                stance = STANCE.values[int(rng.random() < 0.4)]
                entries[(item, STANCE.name)] = STANCE.one_hot(stance)
            else:
                entries[(item, STANCE.name)] = Distribution(STANCE, _quantised_simplex(rng, 2))

    runs = []
    for r in range(config.runs):
        noise = 0.3 + 1.7 * rng.random()
        pro_bias = rng.normal(0, 0.5)
        rankings = {}
        for topic, pool in pools.items():
            scored = []
            for item in pool:
                stance = entries.get((item, STANCE.name))
                lean = pro_bias * (stance.probs[0] - 0.5) if stance else 0.0
                score = grades[topic][item] + lean + rng.normal(0, noise)
                scored.append((item, round(float(score), 4)))
            scored.sort(key=lambda e: (-e[1], e[0]))
            rankings[topic] = tuple(scored[: config.depth])
        runs.append(Run(f"run{r:02d}", rankings))

    targets = Targets(
        {
            STANCE.name: STANCE.uniform(),
            REVCNT.name: Distribution(REVCNT, REVCNT_TARGET),
        }
    )
    return SyntheticCorpus(
        attrsets={STANCE.name: STANCE, REVCNT.name: REVCNT},
        runs=runs,
        qrels=Qrels(grades),
        membership=MembershipTable(entries),
        targets=targets,
        items=items,
    )


def parse_corpus(texts: Mapping[str, str]) -> SyntheticCorpus:
    """Inverse of :meth:`SyntheticCorpus.texts`."""
    attrsets = gio.parse_attrsets(io.StringIO(texts["attrsets.txt"]))
    runs = [
        gio.parse_run(io.StringIO(text))
        for name, text in sorted(texts.items())
        if name.startswith("runs/")
    ]
    return SyntheticCorpus(
        attrsets=attrsets,
        runs=runs,
        qrels=gio.parse_qrels(io.StringIO(texts["qrels.txt"])),
        membership=gio.parse_membership(io.StringIO(texts["membership.tsv"]), attrsets),
        targets=gio.parse_targets(io.StringIO(texts["targets.tsv"]), attrsets),
        items=gio.parse_items(io.StringIO(texts["items.tsv"])),
    )


# --- brute-force oracle -------------------------------------------------------


def naive_jsd(p: Sequence[float], q: Sequence[float]) -> float:
    total = 0.0
    for a, b in zip(p, q):
        m = (a + b) / 2
        if a > 0:
            total += 0.5 * a * math.log2(a / m)
        if b > 0:
            total += 0.5 * b * math.log2(b / m)
    return total


def naive_nmd(p: Sequence[float], q: Sequence[float]) -> float:
    n = len(p)
    return sum(abs(sum(p[: i + 1]) - sum(q[: i + 1])) for i in range(n - 1)) / (n - 1)


def naive_rnod(p: Sequence[float], gold: Sequence[float]) -> float:
    n = len(p)
    support = [i for i in range(n) if gold[i] > 0]
    dw = [sum(abs(i - j) * (p[j] - gold[j]) ** 2 for j in range(n)) for i in support]
    return math.sqrt(sum(dw) / len(dw) / (n - 1))


NAIVE_DIVERGENCES: dict[str, Callable[[Sequence[float], Sequence[float]], float]] = {
    "jsd": naive_jsd,
    "nmd": naive_nmd,
    "rnod": naive_rnod,
}


def oracle_gf(
    memberships: Sequence[Sequence[float]],
    decay: Sequence[float],
    target: Sequence[float],
    kind: str,
) -> float:
    """GF by direct summation: every prefix averaged from scratch."""
    div = NAIVE_DIVERGENCES[str(getattr(kind, "value", kind))]
    total = 0.0
    for k in range(1, len(memberships) + 1):
        achieved = [sum(m[i] for m in memberships[:k]) / k for i in range(len(target))]
        total += decay[k - 1] * (1.0 - div(achieved, target))
    return total


# --- rerankers ----------------------------------------------------------------


def unique_entity_filter(items: Sequence[str], owner: Mapping[str, str], cutoff: int) -> list[str]:
    """Keep the first item of each owner among the top ``cutoff`` items."""
    seen = set()
    kept = []
    for item in items[:cutoff]:
        who = owner[item]
        if who not in seen:
            seen.add(who)
            kept.append(item)
    return kept


def rerank_by_attribute(items: Sequence[str], score: Mapping[str, float], cutoff: int) -> list[str]:
    """Stable sort of the top ``cutoff`` items by descending score."""
    return sorted(items[:cutoff], key=lambda d: -score[d])


def run_from_lists(tag: str, lists: Mapping[str, Sequence[str]]) -> Run:
    """A run whose scores reproduce the given orders (n, n-1, ..., 1)."""
    return Run(tag, {t: tuple((d, float(len(ds) - i)) for i, d in enumerate(ds)) for t, ds in lists.items()})


def intents_from_labels(qrels: Qrels, membership: MembershipTable, aset: AttributeSet) -> IntentSet:
    """Treat each value of a hard attribute set as an intent with uniform
    probability; an item's gain counts only for the intent it is labelled with."""
    probs = {v: 1.0 / len(aset) for v in aset.values}
    topics = {}
    for topic in qrels.topics:
        gains = {}
        for item, grade in qrels.grades[topic].items():
            label = membership.get(item, aset.name)
            if label is None:
                gains[item] = {}
                continue
            gains[item] = {v: p * exponential_gain(grade) for v, p in label.as_dict().items() if p > 0}
        topics[topic] = TopicIntents(probs, gains)
    return IntentSet(topics)

"""Readers and writers for every file format the toolkit consumes or emits.

Inputs
    run         ``topic Q0 item rank score tag`` (whitespace separated)
    qrels       ``topic 0 item grade``
    attrsets    ``name scale value1 value2 ...``
    membership  ``item<TAB>attribute_set<TAB>attribute_value<TAB>probability``
    targets     ``topic|*<TAB>attribute_set<TAB>attribute_value<TAB>probability``
    intents     ``prob<TAB>topic<TAB>intent<TAB>probability`` and
                ``gain<TAB>topic<TAB>intent<TAB>item<TAB>gain``
    items       ``item<TAB>owner<TAB>reviews<TAB>rating``

Outputs are CSV: per-topic scores, topic x system matrices, generic tables,
pairwise p-values and discriminative power curves.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .core import (
    AttributeSet,
    Distribution,
    IntentSet,
    MembershipTable,
    Qrels,
    Run,
    Scale,
    TopicIntents,
    topic_sort_key,
)
from .errors import DomainError, EvaluationError, FormatError
from .measures import TopicScore
from .stats import PairwiseResult, ScoreMatrix

GLOBAL_TOPIC = "*"
MEAN_TOPIC = "ALL"


def _name(stream: IO[str]) -> str:
    return getattr(stream, "name", "<stream>")


def _lines(stream: IO[str]) -> Iterator[tuple[int, str]]:
    """Non-blank lines with their 1-based numbers; accepts \\n and \\r\\n."""
    for no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if line.strip():
            yield no, line


def _fields(stream: IO[str], sep: str | None = None) -> Iterator[tuple[int, list[str]]]:
    for no, line in _lines(stream):
        parts = line.split(sep) if sep else line.split()
        yield no, [p.strip() for p in parts] if sep else parts


def _float(text: str, what: str, file: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise FormatError(f"{what} {text!r} is not a number", file, line) from None
    if not math.isfinite(value):
        raise FormatError(f"{what} {text!r} is not finite", file, line)
    return value


def _int(text: str, what: str, file: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise FormatError(f"{what} {text!r} is not an integer", file, line) from None


# --- runs and qrels ---------------------------------------------------------


def parse_run(stream: IO[str], tag: str | None = None) -> Run:
    """Read a TREC run. The rank column is ignored; order comes from scores."""
    file = _name(stream)
    rankings: dict[str, dict[str, float]] = defaultdict(dict)
    seen_tag = None
    for no, parts in _fields(stream):
        if len(parts) != 6:
            raise FormatError(f"expected 6 fields, got {len(parts)}", file, no)
        topic, _, item, rank, score, run_tag = parts
        _int(rank, "rank", file, no)
        value = _float(score, "score", file, no)
        if seen_tag is None:
            seen_tag = run_tag
        elif run_tag != seen_tag:
            raise FormatError(f"run tag {run_tag!r} differs from {seen_tag!r}", file, no)
        if item in rankings[topic]:
            raise FormatError(f"duplicate item {item!r} for topic {topic!r}", file, no)
        rankings[topic][item] = value
    if seen_tag is None and tag is None:
        raise FormatError("run file is empty", file)
    return Run(tag or seen_tag, {t: tuple(d.items()) for t, d in rankings.items()})


def emit_run(run: Run, stream: IO[str]) -> None:
    for topic in run.topics:
        for rank, (item, score) in enumerate(run.rankings[topic], start=1):
            stream.write(f"{topic} Q0 {item} {rank} {score!r} {run.tag}\n")


def parse_qrels(stream: IO[str]) -> Qrels:
    """Read ``topic 0 item grade`` lines; negative grades become 0."""
    file = _name(stream)
    grades: dict[str, dict[str, int]] = defaultdict(dict)
    for no, parts in _fields(stream):
        if len(parts) != 4:
            raise FormatError(f"expected 4 fields, got {len(parts)}", file, no)
        topic, _, item, grade_text = parts
        grade = _int(grade_text, "grade", file, no)
        previous = grades[topic].get(item)
        if previous is not None and previous != grade:
            raise FormatError(f"conflicting grades for {topic!r}/{item!r}", file, no)
        grades[topic][item] = grade
    return Qrels(grades)


def emit_qrels(qrels: Qrels, stream: IO[str]) -> None:
    for topic in qrels.topics:
        for item in sorted(qrels.grades[topic]):
            stream.write(f"{topic} 0 {item} {qrels.grades[topic][item]}\n")


# --- attribute sets, memberships, targets -----------------------------------


def parse_attrsets(stream: IO[str]) -> dict[str, AttributeSet]:
    file = _name(stream)
    out: dict[str, AttributeSet] = {}
    for no, parts in _fields(stream):
        if len(parts) < 4:
            raise FormatError("expected: name scale value1 value2 [...]", file, no)
        name, scale, *values = parts
        if name in out:
            raise FormatError(f"attribute set {name!r} defined twice", file, no)
        try:
            out[name] = AttributeSet(name, tuple(values), Scale(scale))
        except (DomainError, ValueError) as exc:
            raise FormatError(str(exc), file, no) from None
    return out


def emit_attrsets(attrsets: Mapping[str, AttributeSet], stream: IO[str]) -> None:
    for aset in attrsets.values():
        stream.write(" ".join([aset.name, aset.scale.value, *aset.values]) + "\n")


def _assemble(
    rows: Mapping[tuple, dict[str, float]],
    last_line: Mapping[tuple, int],
    attrsets: Mapping[str, AttributeSet],
    file: str,
) -> dict[tuple, Distribution]:
    out = {}
    for key, probs in rows.items():
        aset = attrsets[key[-1]]
        try:
            out[key] = Distribution.from_mapping(aset, probs)
        except DomainError as exc:
            raise FormatError(f"{'/'.join(key)}: {exc}", file, last_line[key]) from None
    return out


def _prob_rows(stream: IO[str], attrsets: Mapping[str, AttributeSet]):
    file = _name(stream)
    rows: dict[tuple, dict[str, float]] = {}
    last_line: dict[tuple, int] = {}
    for no, parts in _fields(stream, "\t"):
        if len(parts) != 4:
            raise FormatError(f"expected 4 tab-separated fields, got {len(parts)}", file, no)
        owner, set_name, value, prob_text = parts
        aset = attrsets.get(set_name)
        if aset is None:
            raise FormatError(f"unknown attribute set {set_name!r}", file, no)
        if value not in aset.values:
            raise FormatError(f"unknown value {value!r} for attribute set {set_name!r}", file, no)
        prob = _float(prob_text, "probability", file, no)
        key = (owner, set_name)
        group = rows.setdefault(key, {})
        if value in group:
            raise FormatError(f"duplicate row for {owner!r}/{set_name!r}/{value!r}", file, no)
        group[value] = prob
        last_line[key] = no
    return _assemble(rows, last_line, attrsets, file)


def parse_membership(stream: IO[str], attrsets: Mapping[str, AttributeSet]) -> MembershipTable:
    """Rows per (item, set) form one distribution; absent values get 0."""
    return MembershipTable(_prob_rows(stream, attrsets))


def _emit_prob_rows(entries: Mapping[tuple[str, str], Distribution], order, stream: IO[str]) -> None:
    for key in sorted(entries, key=order):
        dist = entries[key]
        for value, p in zip(dist.attribute_set.values, dist.probs):
            if p > 0.0:
                stream.write(f"{key[0]}\t{key[1]}\t{value}\t{p!r}\n")


def emit_membership(table: MembershipTable, stream: IO[str]) -> None:
    _emit_prob_rows(table.entries, lambda k: k, stream)


@dataclass(frozen=True)
class Targets:
    """Target distributions: global (``*``) rows plus per-topic overrides."""

    global_: Mapping[str, Distribution] = field(default_factory=dict)
    per_topic: Mapping[tuple[str, str], Distribution] = field(default_factory=dict)

    def has(self, topic: str, set_name: str) -> bool:
        return (topic, set_name) in self.per_topic or set_name in self.global_

    def for_topic(self, topic: str, set_name: str) -> Distribution:
        found = self.per_topic.get((topic, set_name))
        if found is None:
            found = self.global_.get(set_name)
        if found is None:
            raise EvaluationError(f"no target distribution for attribute set {set_name!r} on topic {topic!r}")
        return found

    def entries(self) -> dict[tuple[str, str], Distribution]:
        out = {(GLOBAL_TOPIC, name): d for name, d in self.global_.items()}
        out.update(self.per_topic)
        return out


def parse_targets(stream: IO[str], attrsets: Mapping[str, AttributeSet]) -> Targets:
    rows = _prob_rows(stream, attrsets)
    global_ = {s: d for (t, s), d in rows.items() if t == GLOBAL_TOPIC}
    per_topic = {(t, s): d for (t, s), d in rows.items() if t != GLOBAL_TOPIC}
    return Targets(global_, per_topic)


def emit_targets(targets: Targets, stream: IO[str]) -> None:
    def order(key):
        topic, name = key
        return (topic != GLOBAL_TOPIC, topic_sort_key(topic), name)

    _emit_prob_rows(targets.entries(), order, stream)


# --- intents ----------------------------------------------------------------


def parse_intents(stream: IO[str]) -> IntentSet:
    file = _name(stream)
    probs: dict[str, dict[str, float]] = defaultdict(dict)
    gains: dict[str, dict[str, dict[str, float]]] = defaultdict(lambda: defaultdict(dict))
    first_line: dict[str, int] = {}
    for no, parts in _fields(stream, "\t"):
        kind = parts[0]
        if kind == "prob" and len(parts) == 4:
            _, topic, intent, p = parts
            if intent in probs[topic]:
                raise FormatError(f"duplicate probability for intent {intent!r}", file, no)
            probs[topic][intent] = _float(p, "probability", file, no)
            first_line.setdefault(topic, no)
        elif kind == "gain" and len(parts) == 5:
            _, topic, intent, item, g = parts
            if intent in gains[topic][item]:
                raise FormatError(f"duplicate gain for {item!r}/{intent!r}", file, no)
            gains[topic][item][intent] = _float(g, "gain", file, no)
            first_line.setdefault(topic, no)
        else:
            raise FormatError("expected 'prob topic intent p' or 'gain topic intent item g'", file, no)
    topics = {}
    for topic in set(probs) | set(gains):
        try:
            topics[topic] = TopicIntents(probs.get(topic, {}), gains.get(topic, {}))
        except DomainError as exc:
            raise FormatError(f"topic {topic!r}: {exc}", file, first_line[topic]) from None
    return IntentSet(topics)


def emit_intents(intents: IntentSet, stream: IO[str]) -> None:
    for topic in sorted(intents.topics, key=topic_sort_key):
        ti = intents[topic]
        for intent, p in ti.probs.items():
            stream.write(f"prob\t{topic}\t{intent}\t{p!r}\n")
        for item in sorted(ti.gains):
            for intent, g in ti.gains[item].items():
                stream.write(f"gain\t{topic}\t{intent}\t{item}\t{g!r}\n")


# --- item metadata ----------------------------------------------------------


@dataclass(frozen=True)
class ItemInfo:
    owner: str
    reviews: int
    rating: float


def parse_items(stream: IO[str]) -> dict[str, ItemInfo]:
    file = _name(stream)
    out = {}
    for no, parts in _fields(stream, "\t"):
        if len(parts) != 4:
            raise FormatError(f"expected 4 tab-separated fields, got {len(parts)}", file, no)
        item, owner, reviews, rating = parts
        if item in out:
            raise FormatError(f"duplicate item {item!r}", file, no)
        out[item] = ItemInfo(owner, _int(reviews, "review count", file, no), _float(rating, "rating", file, no))
    return out


def emit_items(items: Mapping[str, ItemInfo], stream: IO[str]) -> None:
    for item in sorted(items):
        info = items[item]
        stream.write(f"{item}\t{info.owner}\t{info.reviews}\t{info.rating!r}\n")


# --- CSV outputs --------------------------------------------------------------


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def mean_scores(scores: Iterable[TopicScore]) -> list[TopicScore]:
    """Per (run, measure) mean over topics, with topic id ``ALL``."""
    sums: dict[tuple[str, str], list[float]] = {}
    for s in scores:
        if s.topic != MEAN_TOPIC:
            sums.setdefault((s.run, s.measure), []).append(s.value)
    return [TopicScore(run, MEAN_TOPIC, measure, math.fsum(v) / len(v)) for (run, measure), v in sums.items()]


def emit_scores(scores: Sequence[TopicScore], stream: IO[str], with_means: bool = True) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["run", "topic", "measure", "value"])
    rows = list(scores)
    if with_means:
        rows += mean_scores(scores)
    for s in rows:
        writer.writerow([s.run, s.topic, s.measure, _fmt(s.value)])


def parse_scores(stream: IO[str]) -> list[TopicScore]:
    file = _name(stream)
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != ["run", "topic", "measure", "value"]:
        raise FormatError("expected header run,topic,measure,value", file, 1)
    out = []
    for no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise FormatError(f"expected 4 columns, got {len(row)}", file, no)
        out.append(TopicScore(row[0], row[1], row[2], _float(row[3], "value", file, no)))
    return out


def scores_to_matrix(scores: Iterable[TopicScore], measure: str) -> ScoreMatrix:
    """Topic x run matrix for one measure; missing cells are 0 and flagged."""
    cells = {}
    runs: list[str] = []
    topics: set[str] = set()
    for s in scores:
        if s.measure != measure or s.topic == MEAN_TOPIC:
            continue
        if s.run not in runs:
            runs.append(s.run)
        topics.add(s.topic)
        cells[(s.topic, s.run)] = s.value
    if not cells:
        raise EvaluationError(f"no scores for measure {measure!r}")
    return ScoreMatrix.from_cells(cells, sorted(topics, key=topic_sort_key), runs)


def scores_to_means_table(scores: Iterable[TopicScore]) -> tuple[list[str], list[str], np.ndarray]:
    """Run x measure table of mean scores."""
    means = mean_scores(scores)
    runs = list(dict.fromkeys(s.run for s in means))
    measures = list(dict.fromkeys(s.measure for s in means))
    table = np.full((len(runs), len(measures)), np.nan)
    for s in means:
        table[runs.index(s.run), measures.index(s.measure)] = s.value
    return runs, measures, table


def emit_matrix(matrix: ScoreMatrix, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["topic", *matrix.systems])
    for topic, row in zip(matrix.topics, matrix.scores):
        writer.writerow([topic, *(_fmt(v) for v in row)])


def emit_table(row_label: str, rows: Sequence[str], columns: Sequence[str], values: np.ndarray, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([row_label, *columns])
    for name, row in zip(rows, values):
        writer.writerow([name, *("" if np.isnan(v) else _fmt(v) for v in row)])


def parse_table(stream: IO[str]) -> tuple[list[str], list[str], np.ndarray]:
    """Generic CSV with a header; first column holds row ids. Empty cells are NaN."""
    file = _name(stream)
    reader = csv.reader(stream)
    header = next(reader, None)
    if not header or len(header) < 2:
        raise FormatError("expected a header with at least two columns", file, 1)
    rows, values = [], []
    for no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise FormatError(f"expected {len(header)} columns, got {len(row)}", file, no)
        rows.append(row[0])
        values.append([math.nan if c == "" else _float(c, "value", file, no) for c in row[1:]])
    return rows, header[1:], np.array(values, dtype=float).reshape(len(rows), len(header) - 1)


def parse_matrix(stream: IO[str]) -> ScoreMatrix:
    file = _name(stream)
    topics, systems, values = parse_table(stream)
    if np.isnan(values).any():
        raise FormatError("score matrix has empty cells", file)
    return ScoreMatrix(topics, systems, values)


def emit_pairs(results: Sequence[PairwiseResult], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["run_a", "run_b", "mean_diff", "p_value"])
    for r in results:
        writer.writerow([r.system_a, r.system_b, _fmt(r.mean_diff), _fmt(r.p_value)])


def emit_curve(curve: Sequence[tuple[float, float]], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["alpha", "fraction"])
    for alpha, frac in curve:
        writer.writerow([f"{alpha:.3f}", _fmt(frac)])

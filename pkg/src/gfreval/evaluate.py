"""Score whole runs topic by topic.

These functions glue the measures to the file-level data: they cut each
ranked list at the cutoff, resolve memberships, look up targets and grades,
and return flat :class:`TopicScore` records in a deterministic order
(runs as given, topics in natural order).
"""

from __future__ import annotations

import logging
from typing import Mapping, Sequence

from . import baselines as bl
from .core import (
    AttributeSet,
    IntentSet,
    MembershipTable,
    Qrels,
    Run,
    achieved_distribution,
    resolve_membership,
)
from .divergence import DEFAULT_EPSILON, DivergenceKind, check_kind
from .errors import UndefinedMeasureError
from .io import Targets
from .measures import GfConfig, TopicScore, delta_gf, evaluate_list
from .user_model import DecayKind, decay_sequence

log = logging.getLogger(__name__)


def _topics(run: Run, qrels: Qrels | None) -> list[str]:
    topics = run.topics
    if qrels is not None:
        judged = set(qrels.grades)
        skipped = [t for t in topics if t not in judged]
        if skipped:
            log.warning("run %s: %d topics without judgments skipped", run.tag, len(skipped))
        topics = [t for t in topics if t in judged]
    return topics


def _memberships(items: Sequence[str], aset: AttributeSet, table: MembershipTable):
    return [resolve_membership(d, aset, table) for d in items]


def evaluate_runs(
    runs: Sequence[Run],
    config: GfConfig,
    attrsets: Mapping[str, AttributeSet],
    membership: MembershipTable,
    targets: Targets,
    qrels: Qrels | None = None,
) -> list[TopicScore]:
    """GF per attribute set, the relevance measure and GFR for every topic."""
    for name, kind in config.divergences.items():
        check_kind(kind, attrsets[name])
    out = []
    for run in runs:
        for topic in _topics(run, qrels):
            items = run.items(topic)[: config.cutoff]
            if not items:
                continue
            grades = qrels.grades_for(topic, items) if qrels is not None else None
            mems = {n: _memberships(items, attrsets[n], membership) for n in config.set_names}
            tgts = {n: targets.for_topic(topic, n) for n in config.set_names}
            for measure, value in evaluate_list(config, grades, mems, tgts).items():
                out.append(TopicScore(run.tag, topic, measure, value))
    return out


def polarity_runs(
    runs: Sequence[Run],
    aset: AttributeSet,
    membership: MembershipTable,
    qrels: Qrels | None = None,
    kind: DivergenceKind = DivergenceKind.JSD,
    cutoff: int = 10,
    phi: float = 0.85,
) -> list[TopicScore]:
    """Polarity of every ranked list; ERR decay when judged, RBP otherwise."""
    decay_kind = DecayKind.ERR if qrels is not None else DecayKind.RBP
    measure = f"dGF_{DivergenceKind(kind).label}@{aset.name}"
    out = []
    for run in runs:
        for topic in _topics(run, qrels):
            items = run.items(topic)[:cutoff]
            if not items:
                continue
            grades = qrels.grades_for(topic, items) if qrels is not None else None
            decay = decay_sequence(decay_kind, len(items), grades, phi)
            value = delta_gf(_memberships(items, aset, membership), decay, kind, aset)
            out.append(TopicScore(run.tag, topic, measure, value))
    return out


def baseline_runs(
    runs: Sequence[Run],
    attrsets: Mapping[str, AttributeSet],
    membership: MembershipTable,
    targets: Targets,
    qrels: Qrels | None = None,
    intents: IntentSet | None = None,
    cutoff: int = 10,
    attention: bl.AttentionParams = bl.AttentionParams(),
    epsilon: float = DEFAULT_EPSILON,
) -> list[TopicScore]:
    """Skew extremes, NDKL, MA, ABR and ECE per attribute set; nDCG with
    judgments; intent recall, D-nDCG and D#-nDCG with intents."""
    out = []
    skipped: dict[str, int] = {}

    def add(run, topic, measure, fn):
        try:
            out.append(TopicScore(run.tag, topic, measure, float(fn())))
        except UndefinedMeasureError as exc:
            log.debug("run %s topic %s: %s skipped (%s)", run.tag, topic, measure, exc)
            skipped[measure] = skipped.get(measure, 0) + 1

    for run in runs:
        for topic in _topics(run, qrels):
            items = run.items(topic)[:cutoff]
            if not items:
                continue
            for name, aset in attrsets.items():
                mems = _memberships(items, aset, membership)
                target = targets.for_topic(topic, name) if targets.has(topic, name) else None
                if target is not None:
                    achieved = achieved_distribution(mems)
                    add(run, topic, f"SkewMin@{name}", lambda: bl.skew_extremes(achieved, target, epsilon)[0])
                    add(run, topic, f"SkewMax@{name}", lambda: bl.skew_extremes(achieved, target, epsilon)[1])
                    add(run, topic, f"NDKL@{name}", lambda: bl.ndkl(mems, target, epsilon))
                for value in aset.values:
                    add(run, topic, f"MA@{name}={value}", lambda: bl.mean_attention(mems, value, attention))
                add(run, topic, f"ABR@{name}", lambda: bl.abr(mems, attention))
                raw = bl.ece(mems, attention)
                for value, e in zip(aset.values, raw):
                    out.append(TopicScore(run.tag, topic, f"ECE@{name}={value}", float(e)))
                for value, e in zip(aset.values, raw / raw.sum()):
                    out.append(TopicScore(run.tag, topic, f"ECEnorm@{name}={value}", float(e)))
            if qrels is not None:
                grades = qrels.grades_for(topic, items)
                ideal = list(qrels.grades[topic].values())
                add(run, topic, "nDCG", lambda: bl.ndcg(grades, ideal, cutoff))
            if intents is not None and topic in intents:
                ti = intents[topic]
                add(run, topic, "IntentRecall", lambda: bl.intent_recall(items, ti, cutoff))
                add(run, topic, "D-nDCG", lambda: bl.d_ndcg(items, ti, cutoff))
                add(run, topic, "D#-nDCG", lambda: bl.dsharp_ndcg(items, ti, cutoff))
    for measure, count in skipped.items():
        log.warning("%s undefined for %d ranked list(s); those rows are omitted", measure, count)
    return out

"""Command-line interface: ``gfreval <subcommand> ...``.

Exit status is 0 on success, 1 on a malformed input file, 2 when evaluation
cannot proceed.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from pathlib import Path
from typing import IO, Iterator, Sequence

import numpy as np

from . import io as gio
from .baselines import AttentionParams
from .divergence import DEFAULT_EPSILON, DivergenceKind
from .errors import DomainError, EvaluationError, FormatError
from .evaluate import baseline_runs, evaluate_runs, polarity_runs
from .harness import SynthConfig, gen_synthetic, rerank_by_attribute, run_from_lists, unique_entity_filter
from .measures import GfConfig
from .stats import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    default_alphas,
    disc_power_curve,
    kendall_tau,
    randomised_tukey_hsd,
    tau_ci,
)
from .user_model import DEFAULT_DECAY_PHI, DEFAULT_IRBU_PHI, DecayKind, UtilityKind

log = logging.getLogger("gfreval")


def _open(path: str) -> IO[str]:
    return open(path, encoding="utf-8", newline="")


@contextlib.contextmanager
def _output(path: str | None) -> Iterator[IO[str]]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _read(parser, path: str, *args):
    with _open(path) as fh:
        return parser(fh, *args)


def _parse_divergences(spec: Sequence[str] | None, names: Sequence[str]) -> dict[str, DivergenceKind]:
    """``jsd`` for every set, or ``set=kind`` pairs (comma or space separated)."""
    kinds = {name: DivergenceKind.JSD for name in names}
    for token in ",".join(spec or []).split(","):
        token = token.strip()
        if not token:
            continue
        if "=" in token:
            name, kind = token.split("=", 1)
            if name not in kinds:
                raise DomainError(f"--divergence names unknown attribute set {name!r}")
            kinds[name] = DivergenceKind(kind.lower())
        else:
            kind = DivergenceKind(token.lower())
            kinds = {name: kind for name in names}
    return kinds


def _parse_weights(text: str | None) -> tuple[float, ...] | None:
    if text is None:
        return None
    try:
        return tuple(float(w) for w in text.split(","))
    except ValueError:
        raise DomainError(f"--weights {text!r} is not a comma-separated list of numbers") from None


def _select_sets(attrsets, wanted: Sequence[str] | None):
    if not wanted:
        return attrsets
    missing = [w for w in wanted if w not in attrsets]
    if missing:
        raise DomainError(f"unknown attribute set(s): {', '.join(missing)}")
    return {w: attrsets[w] for w in wanted}


def cmd_eval(args) -> None:
    declared = _read(gio.parse_attrsets, args.attrsets)
    attrsets = _select_sets(declared, args.attrset)
    membership = _read(gio.parse_membership, args.membership, declared)
    targets = _read(gio.parse_targets, args.targets, declared)
    runs = [_read(gio.parse_run, path) for path in args.run]
    qrels = _read(gio.parse_qrels, args.qrels) if args.qrels else None
    decay = args.decay or ("err" if qrels is not None else "rbp")
    config = GfConfig(
        divergences=_parse_divergences(args.divergence, list(attrsets)),
        cutoff=args.cutoff,
        decay=DecayKind(decay),
        decay_phi=args.phi,
        utility=UtilityKind(args.utility),
        utility_phi=args.irbu_phi,
        weights=_parse_weights(args.weights),
        has_relevance=qrels is not None,
    )
    scores = evaluate_runs(runs, config, attrsets, membership, targets, qrels)
    with _output(args.output) as out:
        gio.emit_scores(scores, out)


def cmd_polarity(args) -> None:
    attrsets = _read(gio.parse_attrsets, args.attrsets)
    if args.attrset not in attrsets:
        raise DomainError(f"unknown attribute set {args.attrset!r}")
    membership = _read(gio.parse_membership, args.membership, attrsets)
    runs = [_read(gio.parse_run, path) for path in args.run]
    qrels = _read(gio.parse_qrels, args.qrels) if args.qrels else None
    scores = polarity_runs(
        runs,
        attrsets[args.attrset],
        membership,
        qrels,
        DivergenceKind(args.divergence),
        args.cutoff,
        args.phi,
    )
    with _output(args.output) as out:
        gio.emit_scores(scores, out)


def cmd_baselines(args) -> None:
    declared = _read(gio.parse_attrsets, args.attrsets)
    attrsets = _select_sets(declared, args.attrset)
    membership = _read(gio.parse_membership, args.membership, declared)
    targets = _read(gio.parse_targets, args.targets, declared)
    runs = [_read(gio.parse_run, path) for path in args.run]
    qrels = _read(gio.parse_qrels, args.qrels) if args.qrels else None
    intents = _read(gio.parse_intents, args.intents) if args.intents else None
    scores = baseline_runs(
        runs,
        attrsets,
        membership,
        targets,
        qrels,
        intents,
        args.cutoff,
        AttentionParams(args.attention_p),
        args.epsilon,
    )
    with _output(args.output) as out:
        gio.emit_scores(scores, out)


def cmd_matrix(args) -> None:
    scores = _read(gio.parse_scores, args.scores)
    with _output(args.output) as out:
        if args.means:
            runs, measures, table = gio.scores_to_means_table(scores)
            gio.emit_table("run", runs, measures, table, out)
        else:
            if not args.measure:
                raise DomainError("matrix needs --measure (or --means)")
            gio.emit_matrix(gio.scores_to_matrix(scores, args.measure), out)


def cmd_tau(args) -> None:
    with _open(args.matrix) as fh:
        _, columns, values = gio.parse_table(fh)
    for col in (args.measure_a, args.measure_b):
        if col not in columns:
            raise DomainError(f"column {col!r} not in {args.matrix}")
    a = values[:, columns.index(args.measure_a)]
    b = values[:, columns.index(args.measure_b)]
    keep = ~(np.isnan(a) | np.isnan(b))
    a, b = a[keep], b[keep]
    tau = kendall_tau(a, b, args.variant)
    with _output(args.output) as out:
        out.write("measure_a,measure_b,n,tau,ci_low,ci_high\n")
        if len(a) >= 5 and abs(tau) < 1:
            low, high = tau_ci(tau, len(a))
            out.write(f"{args.measure_a},{args.measure_b},{len(a)},{tau:.6f},{low:.6f},{high:.6f}\n")
        else:
            out.write(f"{args.measure_a},{args.measure_b},{len(a)},{tau:.6f},,\n")


def cmd_discpower(args) -> None:
    matrix = _read(gio.parse_matrix, args.matrix)
    if matrix.filled is not None and matrix.filled.any():
        log.warning("%d missing cells were filled with 0", int(matrix.filled.sum()))
    results = randomised_tukey_hsd(matrix, args.trials, args.seed, args.jobs)
    curve = disc_power_curve(results, default_alphas(args.alpha_max))
    with _output(args.pairs_out) as out:
        gio.emit_pairs(results, out)
    if args.pairs_out is None and args.curve_out is None:
        sys.stdout.write("\n")
    with _output(args.curve_out) as out:
        gio.emit_curve(curve, out)


def cmd_synth(args) -> None:
    config = SynthConfig(
        topics=args.topics,
        runs=args.runs,
        pool=args.pool,
        depth=args.depth,
        hardness=args.hardness,
        seed=args.seed,
    )
    for path in gen_synthetic(config).write(args.out_dir):
        log.info("wrote %s", path)


def cmd_rerank(args) -> None:
    run = _read(gio.parse_run, args.run)
    items = _read(gio.parse_items, args.items)
    lists = {}
    for topic in run.topics:
        ranked = run.items(topic)
        missing = [d for d in ranked[: args.cutoff] if d not in items]
        if missing:
            raise EvaluationError(f"topic {topic!r}: no item metadata for {missing[0]!r}")
        if args.mode == "rating":
            lists[topic] = rerank_by_attribute(ranked, {d: items[d].rating for d in items}, args.cutoff)
        else:
            lists[topic] = unique_entity_filter(ranked, {d: items[d].owner for d in items}, args.cutoff)
    tag = args.tag or f"{run.tag}-{'rating' if args.mode == 'rating' else 'uc'}"
    with _output(args.output) as out:
        gio.emit_run(run_from_lists(tag, lists), out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gfreval", description="Group fairness and relevance evaluation of ranked lists."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, targets=True):
        p.add_argument("--run", nargs="+", required=True, metavar="FILE", help="TREC run file(s)")
        p.add_argument("--membership", required=True, metavar="FILE")
        if targets:
            p.add_argument("--targets", required=True, metavar="FILE")
        p.add_argument("--qrels", metavar="FILE")
        p.add_argument("--cutoff", type=int, default=10)
        p.add_argument("--output", "-o", metavar="FILE", help="write CSV here instead of stdout")

    p = sub.add_parser("eval", help="GF per attribute set, relevance and GFR per topic")
    common(p)
    p.add_argument("--attrsets", required=True, metavar="FILE")
    p.add_argument("--attrset", action="append", metavar="NAME", help="restrict to these attribute sets")
    p.add_argument("--decay", choices=["err", "rbp"], help="default: err with --qrels, else rbp")
    p.add_argument("--phi", type=float, default=DEFAULT_DECAY_PHI, help="RBP decay patience")
    p.add_argument("--divergence", nargs="+", metavar="KIND", help="jsd|nmd|rnod, or set=kind pairs")
    p.add_argument("--utility", choices=["err", "irbu"], default="err")
    p.add_argument("--irbu-phi", type=float, default=DEFAULT_IRBU_PHI)
    p.add_argument("--weights", metavar="W0,W1,...")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("polarity", help="polarity (delta GF) on a binary attribute set")
    common(p, targets=False)
    p.add_argument("--attrsets", required=True, metavar="FILE")
    p.add_argument("--attrset", required=True, metavar="NAME")
    p.add_argument("--divergence", choices=["jsd", "nmd", "rnod"], default="jsd")
    p.add_argument("--phi", type=float, default=DEFAULT_DECAY_PHI)
    p.set_defaults(func=cmd_polarity)

    p = sub.add_parser("baselines", help="Skew, NDKL, MA/ABR, ECE, nDCG, intent recall, D#-nDCG")
    common(p)
    p.add_argument("--attrsets", required=True, metavar="FILE")
    p.add_argument("--attrset", action="append", metavar="NAME")
    p.add_argument("--intents", metavar="FILE")
    p.add_argument("--attention-p", type=float, default=0.15)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON, help="smoothing for zero target cells")
    p.set_defaults(func=cmd_baselines)

    p = sub.add_parser("matrix", help="turn a scores CSV into a topic x run matrix or a mean table")
    p.add_argument("--scores", required=True, metavar="FILE")
    p.add_argument("--measure")
    p.add_argument("--means", action="store_true", help="run x measure table of mean scores")
    p.add_argument("--output", "-o", metavar="FILE")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("tau", help="Kendall's tau between two columns with a 95%% CI")
    p.add_argument("--matrix", required=True, metavar="FILE")
    p.add_argument("--measure-a", required=True, metavar="COL")
    p.add_argument("--measure-b", required=True, metavar="COL")
    p.add_argument("--variant", choices=["a", "b"], default="b")
    p.add_argument("--output", "-o", metavar="FILE")
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("discpower", help="randomised Tukey HSD and discriminative power curve")
    p.add_argument("--matrix", required=True, metavar="FILE")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--alpha-max", type=float, default=0.20)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--pairs-out", metavar="FILE")
    p.add_argument("--curve-out", metavar="FILE")
    p.set_defaults(func=cmd_discpower)

    p = sub.add_parser("synth", help="write a synthetic corpus")
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--topics", type=int, default=100)
    p.add_argument("--runs", type=int, default=18)
    p.add_argument("--pool", type=int, default=30)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--hardness", choices=["hard", "soft"], default="hard")
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("rerank", help="rating reranker or unique-entity filter over a run")
    p.add_argument("--run", required=True, metavar="FILE")
    p.add_argument("--items", required=True, metavar="FILE", help="item, owner, reviews, rating TSV")
    p.add_argument("--mode", choices=["rating", "unique"], required=True)
    p.add_argument("--cutoff", type=int, default=20)
    p.add_argument("--tag")
    p.add_argument("--output", "-o", metavar="FILE")
    p.set_defaults(func=cmd_rerank)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        args.func(args)
    except FormatError as exc:
        print(f"gfreval: format error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, EvaluationError, ValueError) as exc:
        print(f"gfreval: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"gfreval: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

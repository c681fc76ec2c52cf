"""System-comparison statistics.

Kendall's tau (tau-b by default) with a Fisher-z confidence interval, the
randomised Tukey HSD test over a topics x systems score matrix, and
discriminative power curves built from its p-values.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, UndefinedMeasureError

#: Variance constant of the Fisher-z interval for Kendall's tau.
TAU_Z_VARIANCE = 0.437
DEFAULT_TRIALS = 5000
DEFAULT_SEED = 42


@dataclass
class ScoreMatrix:
    """Per-topic scores, one column per system. ``filled`` flags cells that
    were absent and set to 0."""

    topics: list[str]
    systems: list[str]
    scores: np.ndarray
    filled: np.ndarray | None = None

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=float)
        if self.scores.shape != (len(self.topics), len(self.systems)):
            raise DomainError(
                f"score matrix shape {self.scores.shape} does not match "
                f"{len(self.topics)} topics x {len(self.systems)} systems"
            )
        if self.filled is None:
            self.filled = np.zeros(self.scores.shape, dtype=bool)

    @classmethod
    def from_cells(
        cls, cells: dict[tuple[str, str], float], topics: Sequence[str], systems: Sequence[str]
    ) -> "ScoreMatrix":
        scores = np.zeros((len(topics), len(systems)))
        filled = np.zeros_like(scores, dtype=bool)
        for i, t in enumerate(topics):
            for j, s in enumerate(systems):
                if (t, s) in cells:
                    scores[i, j] = cells[(t, s)]
                else:
                    filled[i, j] = True
        return cls(list(topics), list(systems), scores, filled)

    def means(self) -> np.ndarray:
        return self.scores.mean(axis=0)


@dataclass(frozen=True)
class PairwiseResult:
    system_a: str
    system_b: str
    mean_diff: float
    p_value: float


def _tau_counts(x: Sequence[float], y: Sequence[float]):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("kendall_tau needs two vectors of equal length")
    n = len(x)
    if n < 2:
        raise DomainError("kendall_tau needs at least two observations")
    dx = np.sign(x[:, None] - x[None, :])
    dy = np.sign(y[:, None] - y[None, :])
    upper = np.triu_indices(n, k=1)
    sx, sy = dx[upper], dy[upper]
    s = int(np.sum(sx * sy))
    n0 = len(sx)
    n1 = int(np.sum(sx == 0))
    n2 = int(np.sum(sy == 0))
    return s, n0, n1, n2


def kendall_tau(x: Sequence[float], y: Sequence[float], variant: str = "b") -> float:
    """Kendall's rank correlation between paired observations.

    ``variant`` is ``"b"`` (tie-corrected) or ``"a"``.
    """
    s, n0, n1, n2 = _tau_counts(x, y)
    if n1 == n0 or n2 == n0:
        raise UndefinedMeasureError("kendall_tau is undefined when one side is entirely tied")
    if variant == "a":
        return s / n0
    if variant != "b":
        raise DomainError(f"unknown tau variant {variant!r}")
    return s / math.sqrt((n0 - n1) * (n0 - n2))


def tau_ci(tau: float, n: int, level: float = 0.95) -> tuple[float, float]:
    """Fisher-z confidence interval for Kendall's tau.

    Standard error on the z scale is ``sqrt(0.437 / (n - 4))``.
    """
    if n < 5:
        raise DomainError("tau_ci needs n >= 5")
    if not (-1.0 < tau < 1.0):
        raise DomainError(f"tau {tau!r} must lie strictly inside (-1, 1)")
    z = math.atanh(tau)
    half = NormalDist().inv_cdf(0.5 + level / 2.0) * math.sqrt(TAU_Z_VARIANCE / (n - 4))
    return math.tanh(z - half), math.tanh(z + half)


def _trial_ranges(scores: np.ndarray, seed: int, trials: Iterable[int]) -> list[float]:
    out = []
    for t in trials:
        rng = np.random.default_rng([seed, t])
        means = rng.permuted(scores, axis=1).mean(axis=0)
        out.append(float(means.max() - means.min()))
    return out


def permutation_ranges(matrix: ScoreMatrix, trials: int, seed: int, n_jobs: int = 1) -> np.ndarray:
    """Range of system means under each randomised trial.

    Each trial shuffles every topic's scores across systems. Trial ``t``
    draws from a generator seeded with ``(seed, t)``, so the result does not
    depend on ``n_jobs``.
    """
    if trials < 1:
        raise DomainError("at least one trial is needed")
    if n_jobs <= 1:
        return np.array(_trial_ranges(matrix.scores, seed, range(trials)))
    chunks = np.array_split(np.arange(trials), n_jobs)
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        parts = pool.map(lambda c: _trial_ranges(matrix.scores, seed, c.tolist()), chunks)
        return np.array([v for part in parts for v in part])


def randomised_tukey_hsd(
    matrix: ScoreMatrix, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, n_jobs: int = 1
) -> list[PairwiseResult]:
    """Randomised Tukey HSD p-values for every pair of systems."""
    if len(matrix.systems) < 2:
        raise DomainError("at least two systems are needed")
    if len(matrix.topics) < 2:
        raise DomainError("at least two topics are needed")
    ranges = np.sort(permutation_ranges(matrix, trials, seed, n_jobs))
    means = matrix.means()
    results = []
    for i, j in itertools.combinations(range(len(matrix.systems)), 2):
        diff = float(means[i] - means[j])
        # Guard against summation-order noise when a trial ties the observed gap.
        threshold = abs(diff) - 1e-12
        count = len(ranges) - int(np.searchsorted(ranges, threshold, side="left"))
        results.append(PairwiseResult(matrix.systems[i], matrix.systems[j], diff, count / len(ranges)))
    return results


def default_alphas(alpha_max: float = 0.20, step: float = 0.001) -> np.ndarray:
    n = int(round(alpha_max / step))
    return np.round(np.arange(1, n + 1) * step, 10)


def disc_power_curve(
    pvalues: Sequence[PairwiseResult] | Sequence[float], alphas: Sequence[float] | None = None
) -> list[tuple[float, float]]:
    """Fraction of system pairs with ``p <= alpha`` for each alpha."""
    ps = np.array([r.p_value if isinstance(r, PairwiseResult) else r for r in pvalues], dtype=float)
    if ps.size == 0:
        raise DomainError("no p-values")
    if alphas is None:
        alphas = default_alphas()
    ps.sort()
    return [
        (float(a), int(np.searchsorted(ps, a, side="right")) / ps.size) for a in alphas
    ]


def significant_wins(results: Sequence[PairwiseResult], alpha: float = 0.05) -> dict[str, list[str]]:
    """Per system, the systems it significantly outperforms at ``alpha``."""
    wins: dict[str, list[str]] = {}
    for r in results:
        if r.p_value <= alpha and r.mean_diff != 0:
            hi, lo = (r.system_a, r.system_b) if r.mean_diff > 0 else (r.system_b, r.system_a)
            wins.setdefault(hi, []).append(lo)
    return wins

"""Divergences between an achieved and a target distribution.

JSD is nominal; NMD and RNOD respect the order of the attribute values and
are only accepted for ordinal or binary attribute sets. Plain sequences are
accepted wherever a :class:`Distribution` is, and are then taken to be
ordered and already on the simplex.
"""

from __future__ import annotations

import enum
import math
from typing import Sequence, Union

import numpy as np

from .core import AttributeSet, Distribution
from .errors import DomainError, UndefinedMeasureError

DistLike = Union[Distribution, Sequence[float], np.ndarray]

DEFAULT_EPSILON = 1e-6


class DivergenceKind(str, enum.Enum):
    JSD = "jsd"
    NMD = "nmd"
    RNOD = "rnod"

    @property
    def label(self) -> str:
        return self.name


def _pair(p: DistLike, q: DistLike, *, ordered: bool = False) -> tuple[np.ndarray, np.ndarray]:
    aset: AttributeSet | None = None
    arrays = []
    for d in (p, q):
        if isinstance(d, Distribution):
            if aset is not None and d.attribute_set != aset:
                raise DomainError("distributions are over different attribute sets")
            aset = d.attribute_set
            arrays.append(d.as_array())
        else:
            arrays.append(np.asarray(d, dtype=float))
    a, b = arrays
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError("distributions must be vectors of equal length")
    if ordered and aset is not None and not aset.supports_order:
        raise DomainError(
            f"attribute set {aset.name!r} is nominal with {len(aset)} values; use JSD"
        )
    return a, b


def _kl2(p: np.ndarray, m: np.ndarray) -> float:
    # m >= p / 2, so m == 0 only when p underflows; such terms are zero.
    mask = (p > 0) & (m > 0)
    return float(np.sum(p[mask] * np.log2(p[mask] / m[mask])))


def jsd(p: DistLike, q: DistLike) -> float:
    """Jensen-Shannon divergence, base 2, so the value is in [0, 1]."""
    a, b = _pair(p, q)
    m = (a + b) / 2.0
    # The sum is formed in a fixed order so that jsd(p, q) == jsd(q, p).
    left, right = _kl2(a, m), _kl2(b, m)
    lo, hi = sorted((left, right))
    return min(1.0, max(0.0, (lo + hi) / 2.0))


def nmd(p: DistLike, q: DistLike) -> float:
    """Normalised match distance: L1 gap between cumulative distributions,
    divided by the number of steps between the extreme classes."""
    a, b = _pair(p, q, ordered=True)
    steps = len(a) - 1
    cp, cq = np.cumsum(a)[:-1], np.cumsum(b)[:-1]
    return float(np.sum(np.abs(cp - cq))) / steps


def rnod(p: DistLike, pstar: DistLike) -> float:
    """Root normalised order-aware divergence, anchored on the gold ``pstar``.

    Distance-weighted squared errors are averaged over the classes where the
    gold distribution has mass.
    """
    a, gold = _pair(p, pstar, ordered=True)
    support = np.flatnonzero(gold > 0)
    if support.size == 0:
        raise DomainError("gold distribution has no mass")
    n = len(a)
    idx = np.arange(n)
    dist = np.abs(idx[:, None] - idx[None, :])
    sq = (a - gold) ** 2
    dw = dist[support] @ sq
    od = float(np.mean(dw))
    return math.sqrt(od / (n - 1))


def kld(p: DistLike, pstar: DistLike, epsilon: float = 0.0) -> float:
    """KL divergence with natural log.

    Where ``p`` has mass and ``pstar`` has none, ``pstar`` is replaced by
    ``epsilon``; with ``epsilon == 0`` that case is undefined.
    """
    if epsilon < 0:
        raise DomainError("epsilon must be non-negative")
    a, gold = _pair(p, pstar)
    mask = a > 0
    g = gold[mask]
    if np.any(g == 0):
        if epsilon == 0:
            raise UndefinedMeasureError("KLD undefined: target has zero mass where achieved has some")
        g = np.where(g == 0, epsilon, g)
    return float(np.sum(a[mask] * np.log(a[mask] / g)))


_FUNCS = {DivergenceKind.JSD: jsd, DivergenceKind.NMD: nmd, DivergenceKind.RNOD: rnod}


def divergence(kind: DivergenceKind | str, p: DistLike, pstar: DistLike) -> float:
    return _FUNCS[DivergenceKind(kind)](p, pstar)


def distr_sim(kind: DivergenceKind | str, p: DistLike, pstar: DistLike) -> float:
    """Similarity of achieved ``p`` to target ``pstar``: one minus the divergence."""
    return 1.0 - divergence(kind, p, pstar)


def check_kind(kind: DivergenceKind | str, aset: AttributeSet) -> DivergenceKind:
    kind = DivergenceKind(kind)
    if kind is not DivergenceKind.JSD and not aset.supports_order:
        raise DomainError(f"{kind.label} needs an ordinal or binary attribute set, got {aset.name!r}")
    return kind

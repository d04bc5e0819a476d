"""Closed-form mechanisms and DP-parameter extraction.

The additive-slack family: for parameters ``(eps, delta)`` the curve

    max(0, 1 - delta - e^eps * a, e^-eps * (1 - delta - a))

is the tightest trade-off compatible with the usual indistinguishability
constraint, and its canonical channel has four columns: a revealing
``delta`` column per row plus a two-column randomised-response core.
Also here: uniform and truncated-geometric noise channels, the Poisson
sub-sampling pre-processor, additive-slack extraction at a given eps,
pure-DP extraction from a curve's boundary slopes, and the canonical
decomposition of symmetric curves into randomised-response mixtures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    Channel2,
    DomainError,
    FdpError,
    GeneralChannel,
    TradeoffFunction,
    canonical_sort,
    evaluate,
    policy,
    tolerance,
    tradeoff_from_points,
    tradeoff_leq,
)
from .canonical import channel_of
from .compose import visible_choice
from .tradeoff import tradeoff_of

__all__ = [
    "NotSymmetric",
    "EpsDelta",
    "SymmetricDecomposition",
    "eps_delta_tradeoff",
    "canonical_eps_delta",
    "uniform_channel",
    "truncated_geometric",
    "subsample_poisson",
    "epsdelta_delta_at",
    "satisfies_fdp",
    "pure_dp_extract",
    "symmetric_decompose",
    "decomposition_channel",
]

_EXP_CAP = 700.0  # beyond this e^eps overflows a double; treat as infinite


class NotSymmetric(FdpError):
    """The trade-off function is not its own inverse."""


@dataclass(frozen=True)
class EpsDelta:
    """An additive-slack privacy parameter pair; ``eps`` may be infinite."""

    eps: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        if not (self.eps >= 0.0):
            raise DomainError(f"eps must be >= 0, got {self.eps}")
        if not (0.0 <= self.delta <= 1.0):
            raise DomainError(f"delta must lie in [0, 1], got {self.delta}")


@dataclass(frozen=True)
class SymmetricDecomposition:
    """A symmetric curve's canonical mixture: pairwise-distinct pure
    parameters with weights summing to 1."""

    parts: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        t = policy().atol
        total = sum(w for _, w in self.parts)
        if abs(total - 1.0) > t * (len(self.parts) + 1.0):
            raise DomainError(f"weights sum to {total}, expected 1")
        eps_values = [e for e, _ in self.parts]
        if len(set(eps_values)) != len(eps_values):
            raise DomainError("eps values must be distinct")
        if any(w < -t or w > 1.0 + t for _, w in self.parts):
            raise DomainError("weights must lie in [0, 1]")


def _as_eps_delta(ed: EpsDelta | tuple[float, float]) -> EpsDelta:
    return ed if isinstance(ed, EpsDelta) else EpsDelta(*ed)


def eps_delta_tradeoff(ed: EpsDelta | tuple[float, float]) -> TradeoffFunction:
    """Trade-off curve for an ``(eps, delta)`` constraint.

    Facets at ``0``, ``(1-delta)/(e^eps+1)``, ``1-delta`` and ``1``; an
    infinite ``eps`` collapses to the zero curve (the facet list cannot
    carry the isolated jump at 0, and the induced channel is the same).
    """
    ed = _as_eps_delta(ed)
    if math.isinf(ed.eps) or ed.eps > _EXP_CAP:
        return TradeoffFunction(((0.0, 0.0), (1.0, 0.0)))
    ee = math.exp(ed.eps)
    d = ed.delta
    mid = (1.0 - d) / (ee + 1.0)
    pts = [(0.0, 1.0 - d), (mid, mid), (1.0 - d, 0.0), (1.0, 0.0)]
    return tradeoff_from_points(pts)


def canonical_eps_delta(ed: EpsDelta | tuple[float, float]) -> Channel2:
    """The least channel meeting an ``(eps, delta)`` constraint: the
    channel of its trade-off curve (four columns, or fewer when a
    parameter is degenerate)."""
    return channel_of(eps_delta_tradeoff(ed))


def uniform_channel(labels: Sequence[str]) -> Channel2:
    """Both secrets induce the uniform distribution on ``labels``."""
    labs = tuple(labels)
    if not labs:
        raise DomainError("uniform_channel needs at least one label")
    row = np.full(len(labs), 1.0 / len(labs))
    return Channel2(labs, row, row.copy())


def truncated_geometric(n: int, eps_step: float) -> GeneralChannel:
    """Two-sided geometric noise on ``{0, .., n-1}`` with the tails
    folded onto the end points.

    With ``t = e^-eps_step``: interior entries are
    ``(1-t)/(1+t) * t^|i-j|`` and the boundary columns absorb their
    tails, ``t^i/(1+t)`` and ``t^(n-1-i)/(1+t)``, so every row sums to
    1 exactly by telescoping.  Adjacent rows have maximum likelihood
    ratio ``e^eps_step``.
    """
    if n < 2:
        raise DomainError(f"need at least 2 outputs, got {n}")
    if not eps_step > 0.0:
        raise DomainError(f"eps_step must be positive, got {eps_step}")
    t = math.exp(-eps_step)
    interior = (1.0 - t) / (1.0 + t)
    rows = np.empty((n, n))
    for i in range(n):
        rows[i, 0] = t**i / (1.0 + t)
        rows[i, n - 1] = t ** (n - 1 - i) / (1.0 + t)
        for j in range(1, n - 1):
            rows[i, j] = interior * t ** abs(i - j)
    return GeneralChannel(rows, tuple(f"g{j}" for j in range(n)))


def subsample_poisson(gamma: float) -> GeneralChannel:
    """Pre-processor for inclusion of the distinguishing record with
    probability ``gamma``: ``[[1, 0], [1-gamma, gamma]]``."""
    g = float(gamma)
    if not 0.0 <= g <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {g}")
    return GeneralChannel([[1.0, 0.0], [1.0 - g, g]], ("d0", "d1"))


def epsdelta_delta_at(M: Channel2, eps: float) -> float:
    """Smallest additive slack making the ``eps`` constraint hold in
    both directions: the larger of the two directed sums
    ``sum(max(p - e^eps q, 0))`` and ``sum(max(q - e^eps p, 0))``."""
    if eps < 0:
        raise DomainError(f"eps must be >= 0, got {eps}")
    if math.isinf(eps) or eps > _EXP_CAP:
        return max(float(M.p[M.q == 0.0].sum()), float(M.q[M.p == 0.0].sum()))
    h = math.exp(eps)
    d1 = float(np.maximum(M.p - h * M.q, 0.0).sum())
    d2 = float(np.maximum(M.q - h * M.p, 0.0).sum())
    return max(d1, d2)


def satisfies_fdp(M: Channel2, f: TradeoffFunction, tol: float | None = None) -> bool:
    """Does ``M`` meet the constraint ``f``, i.e. is ``f`` below the
    trade-off curve of ``M`` everywhere?"""
    return tradeoff_leq(f, tradeoff_of(M), tol)


def pure_dp_extract(f: TradeoffFunction, tol: float | None = None) -> float | None:
    """The least pure parameter ``eps`` with the pure curve below ``f``,
    or None when no pure constraint holds.

    Exists iff ``f(0) = 1`` and ``f`` stays positive before 1; it is
    then read off the boundary slopes as
    ``log(max(|first slope|, 1/|last slope|))``.
    """
    t = tolerance(tol)
    if f.betas[0] < 1.0 - t:
        return None
    if f.betas[-2] <= t:
        return None
    slopes = f.slopes()
    return math.log(max(-slopes[0], 1.0 / -slopes[-1]))


def symmetric_decompose(f: TradeoffFunction, tol: float | None = None) -> SymmetricDecomposition:
    """Decompose a symmetric curve into a visible mixture of pure
    randomised-response parts.

    The canonical channel of a symmetric curve mirrors column ``i`` into
    column ``n-1-i`` with the rows swapped; each mirror pair is a scaled
    pure-parameter channel with ``e^eps`` the within-pair entry ratio
    and weight the pair's first-row mass.  Raises ``NotSymmetric`` when
    ``f`` is not its own inverse: composed with itself it must be the
    identity on the facet abscissae within its attainable range (beyond
    ``f(0)`` the inverse runs along the flat tail, which the mirror
    check below accounts for).
    """
    t = tolerance(tol)
    for a in f.alphas:
        if a <= f.betas[0] + t and abs(evaluate(f, evaluate(f, a)) - a) > 10 * t:
            raise NotSymmetric(f"f(f({a})) != {a}")
    M = channel_of(f)
    n = M.ncols
    parts: list[tuple[float, float]] = []
    for i in range(n // 2):
        j = n - 1 - i
        u, v = M.column(i)
        uj, vj = M.column(j)
        if abs(uj - v) > 10 * t or abs(vj - u) > 10 * t:
            raise NotSymmetric("canonical channel is not mirror symmetric")
        eps = math.inf if v == 0.0 else math.log(u / v)
        parts.append((eps, u + v))
    if n % 2 == 1:
        u, v = M.column(n // 2)
        if abs(u - v) > 10 * t:
            raise NotSymmetric("middle column is not balanced")
        parts.append((0.0, u))
    return SymmetricDecomposition(tuple(parts))


def decomposition_channel(sd: SymmetricDecomposition) -> Channel2:
    """Rebuild the channel of a decomposition by iterated visible choice
    over its pure parts."""
    parts = list(sd.parts)
    if not parts:
        raise DomainError("decomposition has no parts")
    eps, w = parts[-1]
    acc = canonical_eps_delta(EpsDelta(eps, 0.0))
    seen = w
    for eps, w in reversed(parts[:-1]):
        acc = visible_choice(canonical_eps_delta(EpsDelta(eps, 0.0)), acc, w / (w + seen))
        seen += w
    return canonical_sort(acc)

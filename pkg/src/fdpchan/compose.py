"""Composition operators on channels and their trade-off-level rules.

Four ways of combining mechanisms, all of them plain matrix
constructions on two-row channels:

* ``parallel`` -- run both on the same secret, observe the pair;
* ``visible_choice`` -- flip an ``r``-coin, run one of them, and the
  output reveals which (disjoint output sets);
* ``hidden_choice`` -- same coin, but outputs are overlaid label-wise
  so the choice cannot be read off;
* ``preprocess`` / ``postprocess`` -- matrix multiplication on the
  secret or the output side.

In all choice operators ``r`` is the probability of the *first*
operand.  The profile-level rules compute composed trade-off curves
without materialising a composed channel where possible.
"""

from __future__ import annotations

import numpy as np

from .core import (
    Channel2,
    DimensionMismatch,
    DomainError,
    FdpError,
    GeneralChannel,
    TradeoffFunction,
    evaluate,
    tolerance,
)
from .canonical import channel_of, tradeoff_min
from .tradeoff import critical_levels, err_of, profile_channel, tradeoff_of

__all__ = [
    "parallel",
    "visible_choice",
    "hidden_choice",
    "preprocess",
    "postprocess",
    "parallel_profile_bound",
    "visible_choice_profile",
    "visible_choice_profile_points",
]


def _check_weight(r: float) -> float:
    r = float(r)
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"choice weight must lie in [0, 1], got {r}")
    return r


def parallel(C: Channel2, M: Channel2) -> Channel2:
    """Independent product: outputs are pairs, entries multiply per row."""
    labels = tuple(f"({y},{z})" for y in C.labels for z in M.labels)
    p = np.outer(C.p, M.p).ravel()
    q = np.outer(C.q, M.q).ravel()
    return Channel2(labels, p, q)


def visible_choice(C: Channel2, M: Channel2, r: float) -> Channel2:
    """Run ``C`` with probability ``r``, else ``M``; the output keeps
    the operands' labels, so which branch ran is visible.  Colliding
    label sets are renamed apart with a namespace prefix."""
    r = _check_weight(r)
    cl, ml = C.labels, M.labels
    if set(cl) & set(ml):
        cl = tuple(f"L:{l}" for l in cl)
        ml = tuple(f"R:{l}" for l in ml)
    labels = cl + ml
    p = np.concatenate([r * C.p, (1.0 - r) * M.p])
    q = np.concatenate([r * C.q, (1.0 - r) * M.q])
    return Channel2(labels, p, q)


def hidden_choice(C: Channel2, M: Channel2, r: float) -> Channel2:
    """Run ``C`` with probability ``r``, else ``M``, overlaying outputs
    by label so the coin flip cannot be observed.  Labels present in
    only one operand are treated as zero columns of the other; the
    aligned label list keeps the operands' input order."""
    r = _check_weight(r)
    labels = list(C.labels) + [l for l in M.labels if l not in set(C.labels)]
    cp = dict(zip(C.labels, C.p))
    cq = dict(zip(C.labels, C.q))
    mp = dict(zip(M.labels, M.p))
    mq = dict(zip(M.labels, M.q))
    p = [r * cp.get(l, 0.0) + (1.0 - r) * mp.get(l, 0.0) for l in labels]
    q = [r * cq.get(l, 0.0) + (1.0 - r) * mq.get(l, 0.0) for l in labels]
    return Channel2(tuple(labels), p, q)


def _rows_of(ch: Channel2 | GeneralChannel) -> np.ndarray:
    return ch.matrix() if isinstance(ch, Channel2) else ch.rows


def preprocess(P: Channel2 | GeneralChannel, M: Channel2 | GeneralChannel) -> Channel2:
    """Transform the secret before the mechanism: the product ``P @ M``
    of a two-row pre-processor with a mechanism over its rows."""
    pr = _rows_of(P)
    mr = _rows_of(M)
    if pr.shape[0] != 2:
        raise DimensionMismatch("pre-processor must have two rows")
    if pr.shape[1] != mr.shape[0]:
        raise DimensionMismatch(
            f"inner dimensions disagree: {pr.shape[1]} columns vs {mr.shape[0]} rows"
        )
    out = pr @ mr
    return Channel2(M.labels, out[0], out[1])


def postprocess(M: Channel2, W: GeneralChannel) -> Channel2:
    """Transform the output: the product ``M @ W`` with a row-stochastic
    ``W``.  The result is always a refinement of ``M``."""
    mr = M.matrix()
    if mr.shape[1] != W.nrows:
        raise DimensionMismatch(
            f"inner dimensions disagree: {mr.shape[1]} columns vs {W.nrows} rows"
        )
    out = mr @ W.rows
    return Channel2(W.labels, out[0], out[1])


def parallel_profile_bound(
    f: TradeoffFunction, g: TradeoffFunction, grid_n: int
) -> TradeoffFunction:
    """Composition-rule envelope for parallel composition: the lattice
    minimum of the two-output reductions ``f^a || g^a'`` over a grid of
    level pairs (both functions' facet abscissae refined with ``grid_n``
    uniform samples), tightening towards the infimum over all pairs as
    ``grid_n`` grows.

    This is the best curve derivable from per-coordinate optimal tests
    alone.  It dominates the exact composed profile
    ``tradeoff_of(parallel(channel_of(f), channel_of(g)))`` -- the full
    product channel admits joint tests the reductions cannot express --
    so use the channel route when the mechanisms are available.
    """
    if grid_n < max(len(f.facets), len(g.facets)):
        raise DomainError("grid_n must be at least the facet count of each input")
    base = np.linspace(0.0, 1.0, grid_n)
    xs_f = sorted(set(f.alphas) | set(base.tolist()))
    xs_g = sorted(set(g.alphas) | set(base.tolist()))
    acc: TradeoffFunction | None = None
    for a in xs_f:
        fa = profile_channel(f, a)
        for b in xs_g:
            t = tradeoff_of(parallel(fa, profile_channel(g, b)))
            acc = t if acc is None else tradeoff_min(acc, t)
    assert acc is not None
    return acc


def visible_choice_profile_points(
    f: TradeoffFunction, g: TradeoffFunction, r: float
) -> list[tuple[float, float]]:
    """Parametric facets of the visible-choice profile: at every shared
    critical level ``h`` the composed optimal test splits into one
    optimal test per branch, giving the facet
    ``(r*a + (1-r)*a', r*f(a) + (1-r)*g(a'))``."""
    r = _check_weight(r)
    Cf = channel_of(f)
    Cg = channel_of(g)
    pts = []
    for h in critical_levels(Cf, Cg):
        af, bf = err_of(Cf, h)
        ag, bg = err_of(Cg, h)
        pts.append((r * af + (1.0 - r) * ag, r * bf + (1.0 - r) * bg))
    return pts


def visible_choice_profile(
    f: TradeoffFunction, g: TradeoffFunction, r: float, check: bool = True
) -> TradeoffFunction:
    """Exact profile of a visible choice between canonical mechanisms
    for ``f`` and ``g``, computed on the composed channel and, unless
    ``check`` is disabled, verified against the parametric facet rule."""
    r = _check_weight(r)
    prof = tradeoff_of(visible_choice(channel_of(f), channel_of(g), r))
    if check:
        t = tolerance()
        for a, b in visible_choice_profile_points(f, g, r):
            got = evaluate(prof, a)
            if abs(got - b) > 10 * t:
                raise FdpError(
                    f"visible-choice profile disagrees with the parametric rule "
                    f"at alpha={a}: {got} vs {b}"
                )
    return prof

"""From channels to trade-off curves.

The distinguishability profile of a two-row channel is the optimal
type-I/type-II error trade-off of the hypothesis test between its rows.
With columns sorted by likelihood ratio, the optimal test at any level
rejects on a suffix of columns, so the profile is piecewise linear with
one facet per column.  This module also provides the per-level error
points, hockey-stick vulnerabilities (the leakage measure whose level
``h = e^eps`` reads off the additive DP slack), the dominance order they
induce, and witness synthesis for 2x2 trade-off channel refinements.
"""

from __future__ import annotations

import math

import numpy as np

from .core import (
    Channel2,
    FdpError,
    GeneralChannel,
    TradeoffFunction,
    canonical_sort,
    evaluate,
    tolerance,
    tradeoff_from_points,
)

__all__ = [
    "NoWitness",
    "tradeoff_of",
    "profile_channel",
    "tradeoff_channel",
    "err_of",
    "hockey_stick_vulnerability",
    "critical_levels",
    "hockey_stick_leq",
    "witness_for_tradeoff_refinement",
]


class NoWitness(FdpError):
    """No row-stochastic witness maps the first channel onto the second."""


def tradeoff_of(M: Channel2) -> TradeoffFunction:
    """Optimal error trade-off of the test between the rows of ``M``.

    After canonicalisation the facet at index ``k`` rejects on the ``k``
    highest-ratio columns: its abscissa is their total first-row mass
    and its ordinate the second-row mass left over.  When the top
    column has no first-row mass the curve starts below 1 at alpha = 0.
    """
    S = canonical_sort(M)
    pr = S.p[::-1]
    qr = S.q[::-1]
    alphas = np.concatenate(([0.0], np.cumsum(pr)))
    betas = 1.0 - np.concatenate(([0.0], np.cumsum(qr)))
    return tradeoff_from_points(zip(alphas, betas))


def profile_channel(f: TradeoffFunction, alpha: float) -> Channel2:
    """The 2x2 channel of the optimal test at significance ``alpha``:
    first row ``[1-alpha, alpha]``, second row ``[f(alpha), 1-f(alpha)]``."""
    b = evaluate(f, alpha)
    a = min(1.0, max(0.0, float(alpha)))
    return Channel2(("t0", "t1"), [1.0 - a, a], [b, 1.0 - b])


def tradeoff_channel(M: Channel2, alpha: float) -> Channel2:
    """Two-output reduction of ``M`` at significance level ``alpha``."""
    return profile_channel(tradeoff_of(M), alpha)


def err_of(M: Channel2, h: float) -> tuple[float, float]:
    """Error pair of the likelihood-ratio test at level ``h``.

    Rejects on every column with ``q - h*p >= 0``; returns
    ``(alpha, beta)`` = (first-row mass rejected, second-row mass kept).
    ``h = inf`` rejects exactly on the zero-``p`` columns.  The pair
    always lies on ``tradeoff_of(M)``.
    """
    t = tolerance()
    if h < 0:
        raise FdpError(f"level h must be >= 0, got {h}")
    alpha = 0.0
    kept = 1.0
    for pi, qi in zip(M.p, M.q):
        if math.isinf(h):
            reject = pi == 0.0 and qi > 0.0
        else:
            reject = qi - h * pi >= -t * max(1.0, h)
        if reject:
            alpha += pi
            kept -= qi
    return alpha, kept


def hockey_stick_vulnerability(M: Channel2, h: float) -> float:
    """Posterior hockey-stick vulnerability at level ``h`` under the
    uniform prior: ``(1/2) * sum_i max(q_i - h*p_i, 0)``.

    At ``h = inf`` this is the limit value, half the second-row mass
    sitting on columns with ``p == 0``.
    """
    if h < 0:
        raise FdpError(f"level h must be >= 0, got {h}")
    if math.isinf(h):
        return 0.5 * float(M.q[M.p == 0.0].sum())
    return 0.5 * float(np.maximum(M.q - h * M.p, 0.0).sum())


def critical_levels(*channels: Channel2) -> list[float]:
    """Levels where some hockey-stick vulnerability of the given
    channels can kink: 0, every finite likelihood ratio, and infinity.

    Each vulnerability is piecewise linear in ``h`` with breakpoints
    only at its own channel's ratios and is constant beyond the largest
    one, so comparisons over all ``h >= 0`` reduce to this finite set.
    """
    levels = {0.0, math.inf}
    for M in channels:
        for pi, qi in zip(M.p, M.q):
            if pi > 0.0:
                levels.add(qi / pi)
    return sorted(levels)


def hockey_stick_leq(C: Channel2, M: Channel2, tol: float | None = None) -> bool:
    """Dominance of hockey-stick vulnerabilities: ``V_h(C) <= V_h(M)``
    for every ``h >= 0``, decided on the shared critical level set."""
    t = tolerance(tol)
    return all(
        hockey_stick_vulnerability(C, h) <= hockey_stick_vulnerability(M, h) + t
        for h in critical_levels(C, M)
    )


def witness_for_tradeoff_refinement(
    Ca: Channel2, Ma: Channel2, tol: float | None = None
) -> GeneralChannel:
    """Solve for the 2x2 row-stochastic ``W`` with ``Ca @ W == Ma``.

    Both inputs must be 2x2 trade-off channels at the same significance
    level with ``Ca`` the more revealing one.  The linear system is
    solved directly, column by column; raises ``NoWitness`` when the
    solution leaves [0, 1], which signals the precondition was violated.
    """
    t = tolerance(tol)
    if Ca.ncols != 2 or Ma.ncols != 2:
        raise NoWitness("witness synthesis only applies to 2x2 channels")
    A = Ca.matrix()
    B = Ma.matrix()
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if abs(det) <= t:
        if np.allclose(A, B, atol=10 * t):
            return GeneralChannel(np.eye(2), ("w0", "w1"))
        raise NoWitness("source channel is singular and differs from target")
    W = np.linalg.solve(A, B)
    if np.any(W < -t) or np.any(W > 1.0 + t):
        raise NoWitness(f"solved witness {W.tolist()} leaves [0, 1]")
    W = np.clip(W, 0.0, 1.0)
    if not np.allclose(A @ W, B, atol=10 * t):
        raise NoWitness("witness does not reproduce the target channel")
    return GeneralChannel(W, ("w0", "w1"))

"""Brute-force reference implementations for the test suite.

Deliberately naive and independent of the production code paths: the
trade-off oracle enumerates every deterministic rejection set and takes
a lower hull (randomised tests are convex combinations of deterministic
ones), and the refinement oracle compares leakage sums directly at
every candidate level.  Performance is a non-goal; inputs are capped.
"""

from __future__ import annotations

from .core import Channel2, FdpError, TradeoffFunction

__all__ = ["TooLarge", "oracle_tradeoff", "oracle_refinement"]

_MAX_COLS = 20


class TooLarge(FdpError):
    """Subset enumeration is capped to keep the oracle honest and finite."""


def oracle_tradeoff(M: Channel2) -> TradeoffFunction:
    """Trade-off curve by enumerating all 2^n deterministic tests.

    Each subset S (reject when the output lands in S) gives the point
    (sum of p over S, 1 - sum of q over S); the achievable region of
    randomised tests is the convex hull, so the curve is the lower hull.
    """
    n = M.ncols
    if n > _MAX_COLS:
        raise TooLarge(f"{n} columns means 2^{n} subsets; refusing")
    p = [float(x) for x in M.p]
    q = [float(x) for x in M.q]
    points = []
    for mask in range(1 << n):
        a = 0.0
        b = 1.0
        for i in range(n):
            if mask >> i & 1:
                a += p[i]
                b -= q[i]
        points.append((a, b))
    points.sort()
    # keep one point per abscissa: the lowest
    best: list[tuple[float, float]] = []
    for a, b in points:
        if best and a - best[-1][0] <= 1e-12:
            if b < best[-1][1]:
                best[-1] = (best[-1][0], b)
        else:
            best.append((a, b))
    hull: list[tuple[float, float]] = []
    for pt in best:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            turn = (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1)
            if turn <= 1e-12:
                hull.pop()
            else:
                break
        hull.append(pt)
    hull[0] = (0.0, hull[0][1])
    hull[-1] = (1.0, 0.0)
    return TradeoffFunction(tuple(hull))


def oracle_refinement(C: Channel2, M: Channel2) -> bool:
    """Is C refined by M, decided from first principles: M may never
    leak more than C, where leakage at level h is sum(max(q - h*p, 0))
    and levels run over every ratio of both channels plus the ends."""
    tol = 1e-9

    def leak(ch: Channel2, h: float) -> float:
        total = 0.0
        for pi, qi in zip(ch.p, ch.q):
            diff = float(qi) - h * float(pi)
            if diff > 0.0:
                total += diff
        return total

    def leak_inf(ch: Channel2) -> float:
        return sum(float(qi) for pi, qi in zip(ch.p, ch.q) if float(pi) == 0.0)

    levels = {0.0}
    for ch in (C, M):
        for pi, qi in zip(ch.p, ch.q):
            if float(pi) > 0.0:
                levels.add(float(qi) / float(pi))
    for h in levels:
        if leak(M, h) > leak(C, h) + tol:
            return False
    return leak_inf(M) <= leak_inf(C) + tol

"""From trade-off curves back to channels, and the orders on both sides.

``channel_of`` builds the least-refined channel whose trade-off curve
dominates a given piecewise-linear function: one column per linear
segment (mass = the segment's width on each axis) plus a boundary
column when the curve starts below 1.  Together with ``tradeoff_of``
this is an adjoint pair: ``f <= tradeoff_of(M)`` exactly when
``channel_of(f)`` is refined by ``M``, which is also how refinement is
decided here.

The greatest lower bound of channels under refinement is computed by
repeatedly peeling off the globally most extreme column; the matching
operation on curves is the lower convex envelope of the pointwise
minimum.
"""

from __future__ import annotations

from .core import (
    Channel2,
    DimensionMismatch,
    FdpError,
    PartialChannel2,
    TradeoffFunction,
    _cross,
    canonical_sort,
    evaluate,
    tolerance,
    tradeoff_from_points,
    tradeoff_leq,
    union_alphas,
)
from .tradeoff import tradeoff_of

__all__ = [
    "CentroidMismatch",
    "NotIncomparable",
    "channel_of",
    "refinement_leq",
    "refine2x2_check",
    "glb2",
    "glb_finite",
    "tradeoff_min",
    "tradeoff_max",
]


class CentroidMismatch(FdpError):
    """Partial channels must share their row-sum pair to be combined."""


class NotIncomparable(FdpError):
    """The inputs are comparable; their lower bound is just the smaller."""


def channel_of(f: TradeoffFunction) -> Channel2:
    """The least channel (most leaky) whose trade-off curve dominates ``f``.

    Columns, in increasing likelihood-ratio order: one column per facet
    segment, ``[a_{i+1} - a_i; f(a_i) - f(a_{i+1})]`` taken right to
    left, then the boundary column ``[0; 1 - f(0)]``.  Rows sum to 1 by
    telescoping.  Zero-width columns are dropped and the result is
    returned in canonical form.
    """
    if not isinstance(f, TradeoffFunction):
        raise DimensionMismatch("channel_of expects a TradeoffFunction")
    a = f.alphas
    b = f.betas
    n = len(a) - 1
    cols: list[tuple[float, float]] = []
    for j in range(n):
        i = n - 1 - j
        cols.append((a[i + 1] - a[i], b[i] - b[i + 1]))
    cols.append((a[0], 1.0 - b[0]))
    labels = tuple(f"y{k}" for k in range(len(cols)))
    raw = Channel2(labels, [c[0] for c in cols], [c[1] for c in cols])
    return canonical_sort(raw)


def refinement_leq(C: Channel2, M: Channel2, tol: float | None = None) -> bool:
    """Is ``C`` refined by ``M`` (``M`` obtainable from ``C`` by
    post-processing)?  Decided through trade-off dominance, which is
    equivalent and avoids witness search."""
    return tradeoff_leq(tradeoff_of(C), tradeoff_of(M), tol)


def _orient2(ch: Channel2, tol: float) -> tuple[float, float] | None:
    """Return (a, b) with the revealing column first (a > b), or None
    for a channel with equal rows."""
    p0, q0 = ch.column(0)
    if abs(p0 - q0) <= tol:
        return None
    if p0 > q0:
        return p0, q0
    return 1.0 - p0, 1.0 - q0


def refine2x2_check(A: Channel2, B: Channel2, tol: float | None = None) -> bool:
    """Direct 2x2 refinement criterion.

    With both channels oriented so the first column satisfies b < a,
    ``A`` is refined by ``B`` iff a'/b' <= a/b and
    (1-a')/(1-b') >= (1-a)/(1-b); both comparisons are done on
    cross-products so zero denominators need no special case.
    """
    t = tolerance(tol)
    if A.ncols != 2 or B.ncols != 2:
        raise DimensionMismatch("refine2x2_check expects 2x2 channels")
    oa = _orient2(A, t)
    ob = _orient2(B, t)
    if oa is None:
        # equal rows leak nothing; only an equal-rows channel refines it
        return ob is None
    if ob is None:
        return True
    a, b = oa
    a2, b2 = ob
    first = a2 * b <= a * b2 + t
    second = (1.0 - a2) * (1.0 - b) >= (1.0 - a) * (1.0 - b2) - t
    return first and second


# ---------------------------------------------------------------------------
# greatest lower bounds
#
# A partial channel with row sums (e, f) is represented internally by
# its column list; each column (p, q) sits at posterior position
# t = q / (p + q) under the uniform prior, and the channel's geometry is
# the interval its columns span.  One partial refines another exactly
# when its interval contains the other's, so:
#   * nested intervals  -> comparable, glb is the wider one;
#   * crossing intervals -> glb = [left extreme | middle | right extreme].


def _tpos(col: tuple[float, float]) -> float:
    p, q = col
    return q / (p + q)


def _interval(cols: list[tuple[float, float]]) -> tuple[float, float]:
    ts = [_tpos(c) for c in cols]
    return min(ts), max(ts)


def _contains(outer: list[tuple[float, float]], inner: list[tuple[float, float]], t: float) -> bool:
    olo, ohi = _interval(outer)
    ilo, ihi = _interval(inner)
    return olo <= ilo + t and ohi >= ihi - t


def _live_cols(p, q, t: float) -> list[tuple[float, float]]:
    return [(float(pi), float(qi)) for pi, qi in zip(p, q) if pi > t or qi > t]


def glb2(
    A: PartialChannel2,
    R: PartialChannel2,
    tol: float | None = None,
    strict: bool = False,
) -> PartialChannel2:
    """Greatest lower bound of two two-column partial channels with the
    same row sums.

    Incomparable inputs combine into three columns: their extreme
    columns survive and the remaining mass is pooled into a fresh
    middle column.  Comparable inputs short-circuit to the smaller one
    (the bound is that input itself), unless ``strict`` is set, in
    which case ``NotIncomparable`` is raised so callers that presume
    incomparability notice.  ``CentroidMismatch`` when the row-sum
    pairs disagree.
    """
    t = tolerance(tol)
    e, f = A.rowsums
    e2, f2 = R.rowsums
    if abs(e - e2) > t or abs(f - f2) > t:
        raise CentroidMismatch(f"row sums {A.rowsums} vs {R.rowsums}")
    ca = _live_cols(A.p, A.q, t)
    cr = _live_cols(R.p, R.q, t)
    if not ca or not cr:
        raise CentroidMismatch("a channel without mass cannot be combined")
    if _contains(ca, cr, t):
        if strict:
            raise NotIncomparable("inputs are comparable under refinement")
        return A
    if _contains(cr, ca, t):
        if strict:
            raise NotIncomparable("inputs are comparable under refinement")
        return R
    lo_first = _interval(ca)[0] < _interval(cr)[0]
    left_cols, right_cols = (ca, cr) if lo_first else (cr, ca)
    lcol = min(left_cols, key=_tpos)
    rcol = max(right_cols, key=_tpos)
    mid = (e - lcol[0] - rcol[0], f - lcol[1] - rcol[1])
    if mid[0] < -t or mid[1] < -t:
        raise FdpError(f"middle column {mid} negative; inputs not a valid pair")
    mid = (max(mid[0], 0.0), max(mid[1], 0.0))
    return PartialChannel2(
        ("m0", "m1", "m2"),
        [lcol[0], mid[0], rcol[0]],
        [lcol[1], mid[1], rcol[1]],
        (e, f),
    )


def _glb_cols(parts: list[list[tuple[float, float]]], e: float, f: float, t: float) -> list[tuple[float, float]]:
    """Columns of the glb of two-column partials with common row sums (e, f)."""
    kept: list[list[tuple[float, float]]] = []
    for part in parts:
        if any(_contains(other, part, t) for other in kept):
            continue
        kept = [k for k in kept if not _contains(part, k, t)]
        kept.append(part)
    if len(kept) == 1:
        return kept[0]
    # peel the globally most extreme column; every survivor reaches
    # further towards the other end, so each pairwise bound shares it
    idx = max(range(len(kept)), key=lambda i: _interval(kept[i])[1])
    master = kept[idx]
    mincol = max(master, key=_tpos)
    reduced: list[list[tuple[float, float]]] = []
    for i, part in enumerate(kept):
        if i == idx:
            continue
        lcol = min(part, key=_tpos)
        mid = (e - lcol[0] - mincol[0], f - lcol[1] - mincol[1])
        if mid[0] < -t or mid[1] < -t:
            raise FdpError("glb reduction produced negative mass")
        cols = [lcol, (max(mid[0], 0.0), max(mid[1], 0.0))]
        cols = [c for c in cols if c[0] > t or c[1] > t]
        reduced.append(cols)
    rest = _glb_cols(reduced, e - mincol[0], f - mincol[1], t)
    return [mincol] + rest


def glb_finite(channels: list[Channel2], tol: float | None = None) -> Channel2:
    """Greatest lower bound of finitely many two-column channels under
    refinement; the result is refined by every input and any common
    lower bound is refined by it."""
    t = tolerance(tol)
    if not channels:
        raise FdpError("glb_finite needs at least one channel")
    parts = []
    for ch in channels:
        if ch.ncols > 2:
            raise DimensionMismatch("glb_finite expects channels with at most 2 columns")
        cols = _live_cols(ch.p, ch.q, t)
        parts.append(cols)
    cols = _glb_cols(parts, 1.0, 1.0, t)
    labels = tuple(f"g{i}" for i in range(len(cols)))
    raw = Channel2(labels, [c[0] for c in cols], [c[1] for c in cols])
    return canonical_sort(raw)


# ---------------------------------------------------------------------------
# lattice operations on trade-off functions


def tradeoff_min(
    f: TradeoffFunction, g: TradeoffFunction, tol: float | None = None
) -> TradeoffFunction:
    """Lattice minimum: the lower convex envelope of the pointwise
    minimum, i.e. the largest trade-off function below both.

    Every vertex of the envelope is a facet of whichever input is lower
    there, so the lower convex hull over the pointwise minimum sampled
    at the union of facet abscissae is exact.
    """
    t = tolerance(tol)
    pts = [
        (x, min(evaluate(f, x), evaluate(g, x))) for x in union_alphas(f, g)
    ]
    hull: list[tuple[float, float]] = []
    for pt in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= t:
            hull.pop()
        hull.append(pt)
    return TradeoffFunction(tuple(hull))


def tradeoff_max(
    f: TradeoffFunction, g: TradeoffFunction, tol: float | None = None
) -> TradeoffFunction:
    """Lattice maximum: the pointwise maximum (convex as a max of convex
    functions); crossing points become facets."""
    t = tolerance(tol)
    xs = union_alphas(f, g)
    pts = [(x, max(evaluate(f, x), evaluate(g, x))) for x in xs]
    for x1, x2 in zip(xs, xs[1:]):
        d1 = evaluate(f, x1) - evaluate(g, x1)
        d2 = evaluate(f, x2) - evaluate(g, x2)
        if d1 * d2 < 0 and abs(d1) > t and abs(d2) > t:
            w = d1 / (d1 - d2)
            xc = x1 + w * (x2 - x1)
            pts.append((xc, evaluate(f, xc)))
    return tradeoff_from_points(pts, t)

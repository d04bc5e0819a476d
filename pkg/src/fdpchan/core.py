"""Core value types and the likelihood-ratio machinery everything shares.

Two objects carry the semantics of this package:

* :class:`Channel2` -- a two-row stochastic matrix over labelled outputs;
  row ``p`` is the output distribution under the first secret, row ``q``
  under the second.
* :class:`TradeoffFunction` -- a convex, non-increasing piecewise-linear
  function on [0, 1] stored by its breakpoints ("facets"); its value at
  ``a`` is the smallest type-II error achievable by any test whose
  type-I error is at most ``a``.

Channel columns are compared by their likelihood ratio ``q/p``.  The
comparator works on cross-products, so zero entries need no special
casing: a column with ``p == 0`` simply sorts as an infinite ratio.

All types are immutable after construction and every operation is a
pure function, so values can be shared freely across threads.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "FdpError",
    "RowSumError",
    "NegativeEntry",
    "DuplicateLabel",
    "ZeroColumn",
    "DomainError",
    "InvalidTradeoff",
    "DimensionMismatch",
    "NumericPolicy",
    "policy",
    "set_policy",
    "tolerance",
    "Channel2",
    "GeneralChannel",
    "PartialChannel2",
    "TradeoffFunction",
    "validate_channel",
    "lr_compare",
    "canonical_sort",
    "evaluate",
    "tradeoff_from_points",
    "tradeoff_leq",
    "union_alphas",
    "LESS",
    "EQUAL",
    "GREATER",
]


class FdpError(Exception):
    """Base class for every error raised by this package."""


class RowSumError(FdpError):
    """A channel row does not sum to 1 within tolerance."""


class NegativeEntry(FdpError):
    """A matrix entry is more negative than the tolerance allows."""


class DuplicateLabel(FdpError):
    """Output labels must be pairwise distinct."""


class ZeroColumn(FdpError):
    """Both entries of a column are numerically zero."""


class DomainError(FdpError):
    """Argument lies outside the function's domain."""


class InvalidTradeoff(FdpError):
    """Facet list violates the trade-off function invariants."""


class DimensionMismatch(FdpError):
    """Matrix shapes do not line up for the requested operation."""


@dataclass(frozen=True)
class NumericPolicy:
    """Comparison tolerances shared by every operation.

    ``atol`` is the absolute tolerance used for validation and for
    equality of computed quantities.  ``report_tol`` is the looser
    tolerance used when matching reference values quoted to a few
    decimal places (fixture matrices, plotted curves).
    """

    atol: float = 1e-9
    report_tol: float = 1e-3

    def __post_init__(self) -> None:
        if not (0.0 < self.atol < self.report_tol < 1.0):
            raise DomainError(
                f"need 0 < atol < report_tol < 1, got atol={self.atol!r}, "
                f"report_tol={self.report_tol!r}"
            )


_POLICY = NumericPolicy()


def policy() -> NumericPolicy:
    """The active numeric policy."""
    return _POLICY


def set_policy(p: NumericPolicy) -> None:
    global _POLICY
    if not isinstance(p, NumericPolicy):
        raise DomainError("set_policy expects a NumericPolicy")
    _POLICY = p


def tolerance(tol: float | None = None) -> float:
    """Resolve an optional per-call tolerance against the active policy."""
    return _POLICY.atol if tol is None else float(tol)


# ---------------------------------------------------------------------------
# ordering of columns by likelihood ratio

LESS, EQUAL, GREATER = -1, 0, 1


def lr_compare(
    col_i: tuple[float, float], col_j: tuple[float, float], tol: float | None = None
) -> int:
    """Order two columns by their likelihood ratio ``q/p`` without dividing.

    Returns ``-1``, ``0`` or ``+1``.  Comparison is by cross-products
    ``q_i*p_j`` vs ``q_j*p_i``; a column with ``p == 0`` has infinite
    ratio and sorts after every finite-ratio column, and two such
    columns compare equal.  Cross-products agreeing within
    ``tol * scale`` count as equal.
    """
    t = tolerance(tol)
    pi, qi = float(col_i[0]), float(col_i[1])
    pj, qj = float(col_j[0]), float(col_j[1])
    if abs(pi) <= t and abs(qi) <= t:
        raise ZeroColumn(f"column {col_i!r} carries no mass")
    if abs(pj) <= t and abs(qj) <= t:
        raise ZeroColumn(f"column {col_j!r} carries no mass")
    ci = qi * pj
    cj = qj * pi
    scale = max(ci, cj, 1e-300)
    if abs(ci - cj) <= t * scale:
        return EQUAL
    return LESS if ci < cj else GREATER


def _ratio_key(p: float, q: float) -> float:
    """Sort key q/p with p == 0 mapping to +inf (used only for ordering)."""
    return q / p if p > 0.0 else math.inf


# ---------------------------------------------------------------------------
# channels


def _prob_row(values: Sequence[float] | np.ndarray, what: str) -> np.ndarray:
    tol = policy().atol
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise DimensionMismatch(f"{what} must be a non-empty vector")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} contains non-finite entries")
    if np.any(arr < -tol):
        raise NegativeEntry(f"{what} has entry {arr.min()} below -{tol}")
    arr[np.abs(arr) <= tol] = 0.0
    arr.setflags(write=False)
    return arr


def _check_labels(labels: Iterable[str], n: int) -> tuple[str, ...]:
    labs = tuple(str(l) for l in labels)
    if len(labs) != n:
        raise DimensionMismatch(f"{len(labs)} labels for {n} columns")
    if len(set(labs)) != len(labs):
        raise DuplicateLabel("output labels must be pairwise distinct")
    return labs


@dataclass(frozen=True, eq=False)
class Channel2:
    """A two-row stochastic matrix over labelled outputs.

    ``p[i]`` and ``q[i]`` are the probabilities of emitting
    ``labels[i]`` under the first and second secret.  Entries within
    tolerance of zero are clamped to exactly zero at construction;
    both rows must sum to 1.
    """

    labels: tuple[str, ...]
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self) -> None:
        p = _prob_row(self.p, "row p")
        q = _prob_row(self.q, "row q")
        if p.size != q.size:
            raise DimensionMismatch("rows p and q differ in length")
        labs = _check_labels(self.labels, p.size)
        tol = policy().atol * (p.size + 1.0)
        for name, row in (("p", p), ("q", q)):
            s = float(row.sum())
            if abs(s - 1.0) > tol:
                raise RowSumError(f"row {name} sums to {s}, expected 1")
        object.__setattr__(self, "labels", labs)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def ncols(self) -> int:
        return self.p.size

    def column(self, i: int) -> tuple[float, float]:
        return float(self.p[i]), float(self.q[i])

    def matrix(self) -> np.ndarray:
        return np.vstack([self.p, self.q])

    def __repr__(self) -> str:  # compact, tests print these a lot
        cols = ", ".join(
            f"{l}:[{pi:.6g},{qi:.6g}]" for l, pi, qi in zip(self.labels, self.p, self.q)
        )
        return f"Channel2({cols})"


@dataclass(frozen=True, eq=False)
class GeneralChannel:
    """A row-stochastic matrix with ``k >= 1`` rows, used as a
    pre-processor, post-processor or refinement witness."""

    rows: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        tol = policy().atol
        arr = np.array(self.rows, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatch("rows must form a non-empty 2-D matrix")
        if not np.all(np.isfinite(arr)):
            raise DomainError("matrix contains non-finite entries")
        if np.any(arr < -tol):
            raise NegativeEntry(f"entry {arr.min()} below -{tol}")
        arr[np.abs(arr) <= tol] = 0.0
        sums = arr.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > tol * (arr.shape[1] + 1.0)):
            raise RowSumError(f"row sums {sums} deviate from 1")
        labs = _check_labels(self.labels, arr.shape[1])
        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)
        object.__setattr__(self, "labels", labs)

    @property
    def nrows(self) -> int:
        return self.rows.shape[0]

    @property
    def ncols(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True, eq=False)
class PartialChannel2:
    """A two-row sub-stochastic matrix with its row-sum pair recorded.

    Used inside greatest-lower-bound computations, where columns are
    peeled off full channels and the remaining mass per row (``rowsums``)
    is tracked explicitly.
    """

    labels: tuple[str, ...]
    p: np.ndarray
    q: np.ndarray
    rowsums: tuple[float, float]

    def __post_init__(self) -> None:
        p = _prob_row(self.p, "row p")
        q = _prob_row(self.q, "row q")
        if p.size != q.size:
            raise DimensionMismatch("rows p and q differ in length")
        labs = _check_labels(self.labels, p.size)
        e, f = float(self.rowsums[0]), float(self.rowsums[1])
        tol = policy().atol * (p.size + 1.0)
        if e > 1.0 + tol or f > 1.0 + tol:
            raise RowSumError("partial channel rows may not exceed mass 1")
        if abs(float(p.sum()) - e) > tol or abs(float(q.sum()) - f) > tol:
            raise RowSumError(
                f"recorded rowsums {(e, f)} do not match actual "
                f"({float(p.sum())}, {float(q.sum())})"
            )
        object.__setattr__(self, "labels", labs)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "rowsums", (e, f))

    @property
    def ncols(self) -> int:
        return self.p.size

    def column(self, i: int) -> tuple[float, float]:
        return float(self.p[i]), float(self.q[i])


def validate_channel(
    matrix: Sequence[Sequence[float]] | np.ndarray,
    labels: Sequence[str] | None = None,
) -> Channel2:
    """Validate a raw two-row matrix and return the channel it denotes.

    Entries within tolerance of zero are clamped to zero.  Raises
    ``RowSumError``, ``NegativeEntry`` or ``DuplicateLabel`` when the
    input is not a channel; ``labels`` defaults to ``y0, y1, ...``.
    """
    arr = np.array(matrix, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatch("channel input must be a rectangular matrix")
    if arr.shape[0] != 2:
        raise DimensionMismatch(f"expected 2 rows, got {arr.shape[0]}")
    if labels is None:
        labels = tuple(f"y{i}" for i in range(arr.shape[1]))
    return Channel2(tuple(labels), arr[0], arr[1])


def canonical_sort(M: Channel2, tol: float | None = None) -> Channel2:
    """Normal form of a channel: drop mass-less columns, merge columns
    with equal likelihood ratio, sort by increasing ratio.

    Leakage semantics only sees the multiset of ``(p, q)`` columns, so
    this is semantics-preserving.  Merging sums the entries and joins
    the labels with ``+``.  The result is idempotent under repeated
    canonicalisation and preserves the row sums.
    """
    t = tolerance(tol)
    cols = [
        (float(pi), float(qi), lab)
        for pi, qi, lab in zip(M.p, M.q, M.labels)
        if pi > t or qi > t
    ]
    cols.sort(key=lambda c: _ratio_key(c[0], c[1]))
    merged: list[list] = []
    for pi, qi, lab in cols:
        if merged and lr_compare((merged[-1][0], merged[-1][1]), (pi, qi), t) == EQUAL:
            merged[-1][0] += pi
            merged[-1][1] += qi
            merged[-1][2] = f"{merged[-1][2]}+{lab}"
        else:
            merged.append([pi, qi, lab])
    labels = tuple(c[2] for c in merged)
    return Channel2(labels, [c[0] for c in merged], [c[1] for c in merged])


# ---------------------------------------------------------------------------
# trade-off functions


def _cross(a: tuple[float, float], b: tuple[float, float], c: tuple[float, float]) -> float:
    """Signed area of the turn a -> b -> c (positive = b below chord ac)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _collinear(
    a: tuple[float, float], b: tuple[float, float], c: tuple[float, float], tol: float
) -> bool:
    """Tolerance-relative collinearity of three facet points.

    The cross product of consecutive facets equals the likelihood-ratio
    cross product of the underlying channel columns, so the comparison
    is scaled the same way ``lr_compare`` scales equality; otherwise a
    channel with two almost (but not quite) merged columns would lose a
    facet on the way to curve form and fail to round-trip.
    """
    lhs = (b[0] - a[0]) * (c[1] - a[1])
    rhs = (b[1] - a[1]) * (c[0] - a[0])
    return abs(lhs - rhs) <= tol * max(abs(lhs), abs(rhs), 1e-300)


@dataclass(frozen=True)
class TradeoffFunction:
    """Convex, non-increasing piecewise-linear function on [0, 1].

    Stored as facet points ``(a_i, b_i)`` with strictly increasing
    ``a_0 = 0 < ... < a_n = 1``, ``b`` non-increasing, ``b_n = 0`` and
    ``b_i <= 1 - a_i``; evaluation between facets interpolates linearly.
    """

    facets: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        tol = policy().atol
        pts = [(float(a), float(b)) for a, b in self.facets]
        if len(pts) < 2:
            raise InvalidTradeoff("need at least the two boundary facets")
        a0, b0 = pts[0]
        an, bn = pts[-1]
        if abs(a0) > tol:
            raise InvalidTradeoff(f"first facet abscissa {a0} != 0")
        if abs(an - 1.0) > tol:
            raise InvalidTradeoff(f"last facet abscissa {an} != 1")
        if bn < -tol or bn > tol:
            raise InvalidTradeoff(f"value at 1 must be 0, got {bn}")
        pts[0] = (0.0, b0)
        pts[-1] = (1.0, 0.0)
        cleaned: list[tuple[float, float]] = []
        for a, b in pts:
            if b < -tol:
                raise InvalidTradeoff(f"negative value {b} at {a}")
            b = max(b, 0.0)
            if b > 1.0 - a + tol:
                raise InvalidTradeoff(f"value {b} at {a} exceeds 1 - a")
            cleaned.append((a, min(b, max(1.0 - a, 0.0))))
        for (a1, b1), (a2, b2) in zip(cleaned, cleaned[1:]):
            if a2 <= a1:
                raise InvalidTradeoff(f"abscissae not strictly increasing at {a2}")
            if b2 > b1 + tol:
                raise InvalidTradeoff(f"values increase from {b1} to {b2}")
        for left, mid, right in zip(cleaned, cleaned[1:], cleaned[2:]):
            # slopes non-decreasing, compared by cross-products
            lhs = (mid[1] - left[1]) * (right[0] - mid[0])
            rhs = (right[1] - mid[1]) * (mid[0] - left[0])
            if lhs > rhs + tol:
                raise InvalidTradeoff(
                    f"convexity fails around a={mid[0]}: slopes decrease"
                )
        object.__setattr__(self, "facets", tuple(cleaned))
        object.__setattr__(self, "_alphas", tuple(a for a, _ in cleaned))
        object.__setattr__(self, "_betas", tuple(b for _, b in cleaned))

    @property
    def alphas(self) -> tuple[float, ...]:
        return self._alphas  # type: ignore[attr-defined]

    @property
    def betas(self) -> tuple[float, ...]:
        return self._betas  # type: ignore[attr-defined]

    def __call__(self, alpha: float, tol: float | None = None) -> float:
        return evaluate(self, alpha, tol)

    def slopes(self) -> tuple[float, ...]:
        """Slope of each linear segment, left to right (non-decreasing)."""
        a, b = self.alphas, self.betas
        return tuple(
            (b[i + 1] - b[i]) / (a[i + 1] - a[i]) for i in range(len(a) - 1)
        )

    def __repr__(self) -> str:
        pts = ", ".join(f"({a:.6g},{b:.6g})" for a, b in self.facets)
        return f"TradeoffFunction({pts})"


def evaluate(f: TradeoffFunction, alpha: float, tol: float | None = None) -> float:
    """Value of ``f`` at ``alpha`` by linear interpolation; exact at facets."""
    t = tolerance(tol)
    a = float(alpha)
    if a < -t or a > 1.0 + t:
        raise DomainError(f"alpha={a} outside [0, 1]")
    a = min(1.0, max(0.0, a))
    alphas = f.alphas
    i = bisect_right(alphas, a) - 1
    if i >= len(alphas) - 1:
        return f.betas[-1]
    a1, a2 = alphas[i], alphas[i + 1]
    b1, b2 = f.betas[i], f.betas[i + 1]
    if a == a1:
        return b1
    w = (a - a1) / (a2 - a1)
    return b1 + w * (b2 - b1)


def tradeoff_from_points(
    points: Iterable[tuple[float, float]], tol: float | None = None
) -> TradeoffFunction:
    """Build a trade-off function from raw facet candidates.

    Sorts by abscissa, merges abscissae that agree within tolerance
    (keeping the smaller ordinate, which is the binding one), drops
    collinear interior points so the facet list is minimal, and
    validates the result.
    """
    t = tolerance(tol)
    pts = sorted((float(a), float(b)) for a, b in points)
    if not pts:
        raise InvalidTradeoff("no facet points given")
    grouped: list[tuple[float, float]] = []
    for a, b in pts:
        if grouped and a - grouped[-1][0] <= t:
            grouped[-1] = (grouped[-1][0], min(grouped[-1][1], b))
        else:
            grouped.append((a, b))
    minimal: list[tuple[float, float]] = []
    for pt in grouped:
        while len(minimal) >= 2 and _collinear(minimal[-2], minimal[-1], pt, t):
            minimal.pop()
        minimal.append(pt)
    return TradeoffFunction(tuple(minimal))


def union_alphas(*fs: TradeoffFunction) -> list[float]:
    """Sorted union of the facet abscissae of the given functions."""
    seen: set[float] = set()
    for f in fs:
        seen.update(f.alphas)
    return sorted(seen)


def tradeoff_leq(
    f: TradeoffFunction, g: TradeoffFunction, tol: float | None = None
) -> bool:
    """Pointwise ``f <= g``, decided at the union of facet abscissae.

    Both functions are piecewise linear, so dominance at every
    breakpoint of either one is dominance everywhere.
    """
    t = tolerance(tol)
    return all(evaluate(f, a) <= evaluate(g, a) + t for a in union_alphas(f, g))

"""End-to-end profiles for two noise-boosting pipelines.

Purification upgrades an approximate guarantee to a pure one: with
probability ``1 - r`` the mechanism's output is replaced by a uniform
draw from a finite support, and a truncated-geometric perturbation is
applied afterwards.  Both stages only post-process, so the profile can
only rise; the geometric stage is what removes any zero-slope region
when the uniform support does not cover every output.

Sub-sampling runs the mechanism on a random sub-population: a two-row
pre-processor multiplied in front of the canonical channel, which
amplifies privacy pointwise.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import (
    Channel2,
    DomainError,
    FdpError,
    TradeoffFunction,
    canonical_sort,
    evaluate,
    tolerance,
)
from .compose import hidden_choice, postprocess, preprocess, visible_choice
from .mechanisms import (
    EpsDelta,
    canonical_eps_delta,
    eps_delta_tradeoff,
    pure_dp_extract,
    subsample_poisson,
    truncated_geometric,
    uniform_channel,
)
from .tradeoff import tradeoff_of

__all__ = [
    "EmptySupport",
    "PurifyResult",
    "EscapeResult",
    "SubsampleResult",
    "purify_profile",
    "purify_with_escape",
    "subsample_profile",
    "amplification_gap",
]


class EmptySupport(FdpError):
    """The uniform mixing support must be a non-empty label set."""


class PurifyResult(NamedTuple):
    channel: Channel2
    profile: TradeoffFunction
    pure_eps: float | None


class EscapeResult(NamedTuple):
    channel: Channel2
    profile: TradeoffFunction
    pure_eps: float | None
    direct_channel: Channel2
    direct_profile: TradeoffFunction


class SubsampleResult(NamedTuple):
    channel: Channel2
    profile: TradeoffFunction


def _geometric_stage(staged: Channel2, eps_post: float) -> Channel2:
    if not eps_post > 0.0:
        raise DomainError(f"eps_post must be positive, got {eps_post}")
    if staged.ncols < 2:
        # a single-column stage leaks nothing; perturbing it is a no-op
        return staged
    g = truncated_geometric(staged.ncols, eps_post)
    return postprocess(staged, g)


def purify_profile(
    M: Channel2,
    r: float,
    support: tuple[str, ...] | list[str],
    eps_post: float,
) -> PurifyResult:
    """Profile of the purified mechanism.

    ``r`` is the probability the mechanism's own output is kept; with
    probability ``1 - r`` a uniform draw from ``support`` replaces it
    (labels outside ``M``'s output set extend the alphabet).  The mixed
    channel is put in increasing-ratio order and perturbed by the
    truncated geometric over the full aligned alphabet, so the most
    revealing outputs sit at the folded boundaries.  Returns the final
    channel, its trade-off curve, and the extracted pure parameter when
    one exists.
    """
    labels = tuple(support)
    if not labels:
        raise EmptySupport("support must contain at least one label")
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"r must lie in [0, 1], got {r}")
    staged = canonical_sort(hidden_choice(M, uniform_channel(labels), r))
    Z = _geometric_stage(staged, eps_post)
    f = tradeoff_of(Z)
    return PurifyResult(Z, f, pure_dp_extract(f))


def purify_with_escape(
    M: Channel2,
    escape: float,
    r: float,
    eps_post: float,
    tol: float | None = None,
) -> EscapeResult:
    """Purification when the mechanism can emit values outside the
    uniform support.

    The out-of-support behaviour is modelled as a visible ``escape``
    split between a fully revealing channel and ``M``; the uniform
    mixing then only reaches the in-support part.  The pipeline is
    evaluated twice: nesting the hidden stage inside the visible split,
    and regrouped as one hidden stage over the whole visible mixture
    (uniform weight ``1 - w`` with ``w = escape + (1-escape)*r`` and
    visible weight ``escape/w``).  Both routes must agree within
    tolerance; the nested route is returned first.
    """
    t = tolerance(tol)
    if not 0.0 <= escape <= 1.0:
        raise DomainError(f"escape must lie in [0, 1], got {escape}")
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"r must lie in [0, 1], got {r}")
    taken = set(M.labels)
    esc_labels = []
    k = 0
    while len(esc_labels) < 2:  # out-of-support outputs need fresh names
        if f"esc{k}" not in taken:
            esc_labels.append(f"esc{k}")
        k += 1
    reveal = Channel2(tuple(esc_labels), [1.0, 0.0], [0.0, 1.0])
    uniform = uniform_channel(M.labels)

    inner = hidden_choice(M, uniform, r)
    nested = canonical_sort(visible_choice(reveal, inner, escape))

    w = escape + (1.0 - escape) * r
    vis_weight = escape / w if w > 0.0 else 0.0
    direct = canonical_sort(
        hidden_choice(visible_choice(reveal, M, vis_weight), uniform, w)
    )

    if nested.ncols != direct.ncols or not np.allclose(
        nested.matrix(), direct.matrix(), atol=10 * t
    ):
        raise FdpError("nested and regrouped purification stages disagree")

    Z = _geometric_stage(nested, eps_post)
    Zd = _geometric_stage(direct, eps_post)
    f = tradeoff_of(Z)
    fd = tradeoff_of(Zd)
    for a in set(f.alphas) | set(fd.alphas):
        if abs(evaluate(f, a) - evaluate(fd, a)) > 10 * t:
            raise FdpError("purification routes disagree at the profile level")
    return EscapeResult(Z, f, pure_dp_extract(f), Zd, fd)


def subsample_profile(ed: EpsDelta | tuple[float, float], gamma: float) -> SubsampleResult:
    """Channel and profile of the sub-sampled canonical mechanism: the
    inclusion pre-processor multiplied into the canonical channel."""
    ch = preprocess(subsample_poisson(gamma), canonical_eps_delta(ed))
    return SubsampleResult(ch, tradeoff_of(ch))


def amplification_gap(
    ed: EpsDelta | tuple[float, float], gamma: float, alpha: float
) -> float:
    """How much the sub-sampled profile sits above the unsampled curve
    at ``alpha``; non-negative everywhere (privacy amplification)."""
    sub = subsample_profile(ed, gamma).profile
    base = eps_delta_tradeoff(ed)
    return evaluate(sub, alpha) - evaluate(base, alpha)

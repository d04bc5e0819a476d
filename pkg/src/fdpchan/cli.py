"""Command-line front end.

Subcommands::

    fdpchan tradeoff  <channel.json>            # profile of a channel
    fdpchan canonical <tradeoff.json>           # least channel of a curve
    fdpchan compose   "<expr>"                  # evaluate a pipeline
    fdpchan refine    <A.json> <B.json>         # refinement both ways
    fdpchan purify    --eps E --delta D --r R --eps-post E'
    fdpchan subsample --eps E --delta D --gamma G
    fdpchan decompose <tradeoff.json>           # symmetric mixture parts

Profiles are emitted as ``facets-json`` (default), ``csv`` or ``svg``;
channel results as ``channel-json``.  ``--out`` writes to a file,
otherwise stdout.  ``--tol`` (or the ``FDP_TOL`` environment variable)
overrides the comparison tolerance.  Exit codes: 0 success, 2
validation failure, 3 pipeline parse error.  Numbers are printed with
at most 6 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .analyses import purify_profile, subsample_profile
from .core import (
    FdpError,
    NumericPolicy,
    TradeoffFunction,
    evaluate,
    policy,
    set_policy,
)
from .canonical import channel_of
from .mechanisms import EpsDelta, canonical_eps_delta, symmetric_decompose
from .pipeline import (
    PipelineSyntaxError,
    channel_to_json,
    eval_pipeline,
    load_channel,
    load_tradeoff,
    parse_pipeline,
    tradeoff_to_json,
)
from .canonical import refinement_leq
from .tradeoff import tradeoff_of

__all__ = ["UnknownFormat", "emit_profile", "main"]

PROFILE_FORMATS = ("facets-json", "csv", "svg")


class UnknownFormat(FdpError):
    """Unsupported output format."""


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def emit_profile(f: TradeoffFunction, format: str, samples: int = 0) -> bytes:
    """Render a trade-off curve.

    ``facets-json`` is the exact facet list; ``csv`` lists the facets
    followed by ``samples`` interpolated rows; ``svg`` draws the curve
    as a single polyline on the unit box with ticks every 0.25.
    """
    if format == "facets-json":
        return (json.dumps(tradeoff_to_json(f)) + "\n").encode()
    if format == "csv":
        lines = ["alpha,beta"]
        lines += [f"{_fmt(a)},{_fmt(b)}" for a, b in f.facets]
        if samples > 0:
            for a in np.linspace(0.0, 1.0, samples):
                lines.append(f"{_fmt(float(a))},{_fmt(evaluate(f, float(a)))}")
        return ("\n".join(lines) + "\n").encode()
    if format == "svg":
        return _profile_svg(f)
    raise UnknownFormat(f"unknown profile format {format!r}")


def _profile_svg(f: TradeoffFunction) -> bytes:
    size, margin = 360, 40
    span = size - 2 * margin

    def x(a: float) -> float:
        return margin + a * span

    def y(b: float) -> float:
        return size - margin - b * span

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="{margin}" y="{margin}" width="{span}" height="{span}" '
        'fill="none" stroke="black"/>',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        tx, ty = x(tick), y(tick)
        parts.append(
            f'<line x1="{tx}" y1="{size - margin}" x2="{tx}" y2="{size - margin + 5}" stroke="black"/>'
        )
        parts.append(
            f'<line x1="{margin - 5}" y1="{ty}" x2="{margin}" y2="{ty}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{tx}" y="{size - margin + 18}" font-size="10" text-anchor="middle">{_fmt(tick)}</text>'
        )
        parts.append(
            f'<text x="{margin - 8}" y="{ty + 3}" font-size="10" text-anchor="end">{_fmt(tick)}</text>'
        )
    points = " ".join(f"{x(a):.2f},{y(b):.2f}" for a, b in f.facets)
    parts.append(f'<polyline points="{points}" fill="none" stroke="blue" stroke-width="1.5"/>')
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode()


def _emit_channel(ch) -> bytes:
    return (json.dumps(channel_to_json(ch)) + "\n").encode()


def _write(data: bytes, out: str | None) -> None:
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", help="write output to this file instead of stdout")
    sub.add_argument("--format", help="output format")
    sub.add_argument("--tol", type=float, help="override the comparison tolerance")
    sub.add_argument(
        "--samples", type=int, default=0, help="extra interpolated rows for csv output"
    )


def _profile_bytes(f: TradeoffFunction, args: argparse.Namespace, default: str = "facets-json") -> bytes:
    fmt = args.format or default
    return emit_profile(f, fmt, args.samples)


def _eps_delta_from(args: argparse.Namespace) -> EpsDelta:
    eps = math.inf if args.eps == "inf" else float(args.eps)
    return EpsDelta(eps, args.delta)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fdpchan",
        description="Trade-off curves and two-row channels: composition analysis for f-DP.",
    )
    sp = ap.add_subparsers(dest="command", required=True)

    p = sp.add_parser("tradeoff", help="profile of a channel file")
    p.add_argument("channel")
    _add_common(p)

    p = sp.add_parser("canonical", help="least channel of a trade-off file")
    p.add_argument("tradeoff")
    _add_common(p)

    p = sp.add_parser("compose", help="evaluate a pipeline expression")
    p.add_argument("expr")
    _add_common(p)

    p = sp.add_parser("refine", help="decide refinement between two channel files")
    p.add_argument("left")
    p.add_argument("right")
    _add_common(p)

    p = sp.add_parser("purify", help="uniform mixing followed by geometric noise")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--channel", help="mechanism channel file")
    src.add_argument("--eps", help="use the canonical channel for (eps, delta)")
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--r", type=float, required=True, help="probability the mechanism's output is kept")
    p.add_argument("--eps-post", type=float, required=True, help="geometric noise parameter")
    p.add_argument("--support", help="comma-separated uniform support labels (default: all outputs)")
    _add_common(p)

    p = sp.add_parser("subsample", help="Poisson sub-sampling of the canonical channel")
    p.add_argument("--eps", required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, required=True)
    _add_common(p)

    p = sp.add_parser("decompose", help="symmetric mixture parts of a trade-off file")
    p.add_argument("tradeoff")
    _add_common(p)

    return ap


def _run(args: argparse.Namespace) -> int:
    if args.command == "tradeoff":
        f = tradeoff_of(load_channel(args.channel))
        _write(_profile_bytes(f, args), args.out)
    elif args.command == "canonical":
        ch = channel_of(load_tradeoff(args.tradeoff))
        fmt = args.format or "channel-json"
        if fmt != "channel-json":
            raise UnknownFormat(f"canonical emits channel-json, not {fmt!r}")
        _write(_emit_channel(ch), args.out)
    elif args.command == "compose":
        ch = eval_pipeline(parse_pipeline(args.expr))
        fmt = args.format or "channel-json"
        if fmt == "channel-json":
            _write(_emit_channel(ch), args.out)
        else:
            _write(emit_profile(tradeoff_of(ch), fmt, args.samples), args.out)
    elif args.command == "refine":
        A = load_channel(args.left)
        B = load_channel(args.right)
        report = {
            "left_refines_right": refinement_leq(A, B),
            "right_refines_left": refinement_leq(B, A),
        }
        _write((json.dumps(report) + "\n").encode(), args.out)
    elif args.command == "purify":
        if args.channel:
            M = load_channel(args.channel)
        else:
            M = canonical_eps_delta(_eps_delta_from(args))
        support = tuple(args.support.split(",")) if args.support else M.labels
        result = purify_profile(M, args.r, support, args.eps_post)
        fmt = args.format or "facets-json"
        if fmt == "channel-json":
            _write(_emit_channel(result.channel), args.out)
        else:
            _write(emit_profile(result.profile, fmt, args.samples), args.out)
        eps = "none" if result.pure_eps is None else _fmt(result.pure_eps)
        print(f"pure eps: {eps}", file=sys.stderr)
    elif args.command == "subsample":
        result = subsample_profile(_eps_delta_from(args), args.gamma)
        fmt = args.format or "facets-json"
        if fmt == "channel-json":
            _write(_emit_channel(result.channel), args.out)
        else:
            _write(emit_profile(result.profile, fmt, args.samples), args.out)
    elif args.command == "decompose":
        sd = symmetric_decompose(load_tradeoff(args.tradeoff))
        parts = [
            {"eps": "inf" if math.isinf(e) else float(f"{e:.6g}"), "weight": float(f"{w:.6g}")}
            for e, w in sd.parts
        ]
        _write((json.dumps({"parts": parts}) + "\n").encode(), args.out)
    else:  # pragma: no cover - argparse enforces the choices
        raise FdpError(f"unknown command {args.command!r}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    tol = args.tol if args.tol is not None else _env_tol()
    if tol is not None:
        set_policy(NumericPolicy(atol=tol, report_tol=max(policy().report_tol, tol * 10)))
    try:
        return _run(args)
    except PipelineSyntaxError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 3
    except (FdpError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _env_tol() -> float | None:
    raw = os.environ.get("FDP_TOL")
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError:
        return None


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

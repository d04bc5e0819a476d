"""File formats and the pipeline expression language.

Channels and trade-off curves are stored as JSON::

    {"labels": ["y0", ...], "rows": [[...], [...]]}
    {"facets": [[alpha, beta], ...]}

Pipelines are written as expressions over mechanism atoms and channel
files, for example::

    (ED(1.0986,0.1) [0.75]# U(4)) . Geo(4,0.6931)
    Poisson(0.2) . ED(1,0.1)
    @fixtures/chan.json || RR(1)

Atoms: ``ED(eps,delta)`` canonical additive-slack channel, ``RR(eps)``
randomised response, ``U(n)`` uniform over n outputs, ``Geo(n,eps)``
truncated-geometric post-processor, ``Poisson(gamma)`` sub-sampling
pre-processor, and ``@path`` for a channel file.  Operators by falling
precedence: ``.`` (matrix composition), ``||`` (parallel), ``[r]+`` /
``[r]#`` (visible / hidden choice with probability ``r`` on the left
operand); all left-associative.  Choice results are normalised to
canonical (increasing-ratio) column order, and a two-row channel is
likewise normalised before a positional post-processor such as ``Geo``
is applied to it; pre-processor matrices are never reordered.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Union

from .core import (
    Channel2,
    FdpError,
    GeneralChannel,
    TradeoffFunction,
    canonical_sort,
    policy,
    validate_channel,
)
from .compose import hidden_choice, parallel, visible_choice
from .mechanisms import (
    EpsDelta,
    canonical_eps_delta,
    subsample_poisson,
    truncated_geometric,
    uniform_channel,
)

__all__ = [
    "PipelineSyntaxError",
    "PipelineTypeError",
    "PipelineExpr",
    "parse_pipeline",
    "format_pipeline",
    "eval_pipeline",
    "load_channel",
    "load_tradeoff",
    "channel_to_json",
    "tradeoff_to_json",
]


class PipelineSyntaxError(FdpError):
    """Malformed pipeline text; carries the byte offset and the token
    kinds that would have been accepted there."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected {', '.join(expected)})"
        super().__init__(detail)
        self.offset = offset
        self.expected = expected


class PipelineTypeError(FdpError):
    """Structurally valid pipeline that does not type-check."""

    def __init__(self, node: "PipelineExpr", reason: str):
        super().__init__(f"{format_pipeline(node)}: {reason}")
        self.node = node
        self.reason = reason


# ---------------------------------------------------------------------------
# abstract syntax


@dataclass(frozen=True)
class FileRef:
    path: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MechAtom:
    name: str  # ED | RR | U | Geo | Poisson
    args: tuple[float, ...]
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Compose:
    left: "PipelineExpr"
    right: "PipelineExpr"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Parallel:
    left: "PipelineExpr"
    right: "PipelineExpr"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Choice:
    kind: str  # "+" visible | "#" hidden
    r: float
    left: "PipelineExpr"
    right: "PipelineExpr"
    offset: int = field(default=0, compare=False)


PipelineExpr = Union[FileRef, MechAtom, Compose, Parallel, Choice]

_MECH_ARITY = {"ED": 2, "RR": 1, "U": 1, "Geo": 2, "Poisson": 1}


# ---------------------------------------------------------------------------
# lexer / parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?|inf)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<file>@[^\s()\[\],]+)
  | (?P<parpar>\|\|)
  | (?P<sym>[()\[\],+\#.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise PipelineSyntaxError(f"unexpected character {text[pos]!r}", pos)
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        kind = m.lastgroup
        tok = m.group()
        if kind == "sym":
            kind = {"(": "(", ")": ")", "[": "[", "]": "]", ",": ",", "+": "+", "#": "#", ".": "."}[tok]
        elif kind == "parpar":
            kind = "||"
        tokens.append(_Token(kind, tok, m.start()))
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self, kind: str) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != kind:
            raise PipelineSyntaxError(
                f"unexpected {tok.kind or 'end of input'}", tok.offset, (kind,)
            )
        self.i += 1
        return tok

    def number(self) -> float:
        tok = self.take("number")
        return math.inf if tok.text == "inf" else float(tok.text)

    def parse(self) -> PipelineExpr:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise PipelineSyntaxError(f"trailing {tok.text!r}", tok.offset, ("eof",))
        return node

    def expr(self) -> PipelineExpr:
        node = self.parallel()
        while self.peek().kind == "[":
            off = self.take("[").offset
            r = self.number()
            self.take("]")
            tok = self.peek()
            if tok.kind not in ("+", "#"):
                raise PipelineSyntaxError(
                    f"unexpected {tok.text!r}", tok.offset, ("+", "#")
                )
            self.i += 1
            rhs = self.parallel()
            node = Choice(tok.kind, r, node, rhs, off)
        return node

    def parallel(self) -> PipelineExpr:
        node = self.composed()
        while self.peek().kind == "||":
            off = self.take("||").offset
            node = Parallel(node, self.composed(), off)
        return node

    def composed(self) -> PipelineExpr:
        node = self.atom()
        while self.peek().kind == ".":
            off = self.take(".").offset
            node = Compose(node, self.atom(), off)
        return node

    def atom(self) -> PipelineExpr:
        tok = self.peek()
        if tok.kind == "(":
            self.take("(")
            node = self.expr()
            self.take(")")
            return node
        if tok.kind == "file":
            self.take("file")
            return FileRef(tok.text[1:], tok.offset)
        if tok.kind == "name":
            if tok.text not in _MECH_ARITY:
                raise PipelineSyntaxError(
                    f"unknown mechanism {tok.text!r}",
                    tok.offset,
                    tuple(sorted(_MECH_ARITY)),
                )
            self.take("name")
            self.take("(")
            args = [self.number()]
            for _ in range(_MECH_ARITY[tok.text] - 1):
                self.take(",")
                args.append(self.number())
            self.take(")")
            return MechAtom(tok.text, tuple(args), tok.offset)
        raise PipelineSyntaxError(
            f"unexpected {tok.text or 'end of input'!r}",
            tok.offset,
            ("(", "file", "mechanism"),
        )


def parse_pipeline(text: str) -> PipelineExpr:
    """Parse pipeline text into its abstract syntax tree."""
    return _Parser(text).parse()


def _fmt_num(x: float) -> str:
    if math.isinf(x):
        return "inf"
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _prec(node: PipelineExpr) -> int:
    if isinstance(node, Choice):
        return 0
    if isinstance(node, Parallel):
        return 1
    if isinstance(node, Compose):
        return 2
    return 3


def format_pipeline(node: PipelineExpr) -> str:
    """Render an AST back into parseable text (stable under re-parsing)."""

    def wrap(child: PipelineExpr, minimum: int) -> str:
        s = format_pipeline(child)
        return f"({s})" if _prec(child) < minimum else s

    if isinstance(node, FileRef):
        return f"@{node.path}"
    if isinstance(node, MechAtom):
        return f"{node.name}({','.join(_fmt_num(a) for a in node.args)})"
    if isinstance(node, Compose):
        return f"{wrap(node.left, 2)} . {wrap(node.right, 3)}"
    if isinstance(node, Parallel):
        return f"{wrap(node.left, 1)} || {wrap(node.right, 2)}"
    if isinstance(node, Choice):
        return f"{wrap(node.left, 0)} [{_fmt_num(node.r)}]{node.kind} {wrap(node.right, 1)}"
    raise PipelineTypeError(node, "unknown node kind")


# ---------------------------------------------------------------------------
# evaluation

Loader = Callable[[str], Channel2]


def _default_loader(path: str) -> Channel2:
    return load_channel(path)


def _as_two_row(value: Channel2 | GeneralChannel, node: PipelineExpr) -> Channel2:
    if isinstance(value, Channel2):
        return value
    if value.nrows == 2:
        return validate_channel(value.rows, value.labels)
    raise PipelineTypeError(node, f"needs a two-row operand, got {value.nrows} rows")


def _eval(node: PipelineExpr, loader: Loader) -> Channel2 | GeneralChannel:
    if isinstance(node, FileRef):
        return loader(node.path)
    if isinstance(node, MechAtom):
        return _eval_mech(node)
    if isinstance(node, Compose):
        left = _eval(node.left, loader)
        right = _eval(node.right, loader)
        # a two-row left operand is an abstract channel about to be
        # post-processed: bring it to canonical column order first, so
        # positional post-processors see increasing-ratio columns.
        # Pre-processors (general matrices) are positional and stay put.
        lrows = canonical_sort(left).matrix() if isinstance(left, Channel2) else left.rows
        rrows = right.matrix() if isinstance(right, Channel2) else right.rows
        if lrows.shape[1] != rrows.shape[0]:
            raise PipelineTypeError(
                node,
                f"inner dimensions disagree: {lrows.shape[1]} columns vs "
                f"{rrows.shape[0]} rows",
            )
        out = lrows @ rrows
        # a product involving an actual channel is a channel; a chain of
        # positional pre-processor matrices stays positional
        if out.shape[0] == 2 and (isinstance(left, Channel2) or isinstance(right, Channel2)):
            return validate_channel(out, right.labels)
        return GeneralChannel(out, right.labels)
    if isinstance(node, Parallel):
        left = _as_two_row(_eval(node.left, loader), node.left)
        right = _as_two_row(_eval(node.right, loader), node.right)
        return parallel(left, right)
    if isinstance(node, Choice):
        if not 0.0 <= node.r <= 1.0:
            raise PipelineTypeError(node, f"choice weight {node.r} outside [0, 1]")
        left = _as_two_row(_eval(node.left, loader), node.left)
        right = _as_two_row(_eval(node.right, loader), node.right)
        op = visible_choice if node.kind == "+" else hidden_choice
        return canonical_sort(op(left, right, node.r))
    raise PipelineTypeError(node, "unknown node kind")


def _eval_mech(node: MechAtom) -> Channel2 | GeneralChannel:
    name, args = node.name, node.args

    def integer(x: float, what: str) -> int:
        if x != int(x) or x < 1:
            raise PipelineTypeError(node, f"{what} must be a positive integer, got {x}")
        return int(x)

    if name == "ED":
        return canonical_eps_delta(EpsDelta(args[0], args[1]))
    if name == "RR":
        return canonical_eps_delta(EpsDelta(args[0], 0.0))
    if name == "U":
        n = integer(args[0], "U size")
        return uniform_channel(tuple(f"y{i}" for i in range(n)))
    if name == "Geo":
        n = integer(args[0], "Geo size")
        return truncated_geometric(n, args[1])
    if name == "Poisson":
        if not 0.0 <= args[0] <= 1.0:
            raise PipelineTypeError(node, f"gamma {args[0]} outside [0, 1]")
        return subsample_poisson(args[0])
    raise PipelineTypeError(node, f"unknown mechanism {name!r}")


def eval_pipeline(expr: PipelineExpr, loader: Loader | None = None) -> Channel2:
    """Evaluate a pipeline to its composed two-row channel.

    ``loader`` resolves ``@file`` atoms; it defaults to reading channel
    JSON from the filesystem.  Every two-row intermediate is kept in
    canonical column order.
    """
    value = _eval(expr, loader or _default_loader)
    if isinstance(value, GeneralChannel):
        return _as_two_row(value, expr)
    return value


# ---------------------------------------------------------------------------
# JSON file formats


def load_channel(path: str | Path) -> Channel2:
    """Read a channel file.

    Files typically carry rounded decimals, so rows whose sums are
    within the reporting tolerance of 1 are renormalised onto the
    simplex before the strict validation; worse deviations are
    rejected as usual.
    """
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        labels = data["labels"]
        rows = [[float(v) for v in row] for row in data["rows"]]
    except (TypeError, KeyError, ValueError) as exc:
        raise FdpError(f"{path}: channel JSON needs 'labels' and 'rows'") from exc
    for row in rows:
        s = sum(row)
        if s > 0.0 and abs(s - 1.0) <= policy().report_tol:
            row[:] = [v / s for v in row]
    return validate_channel(rows, labels)


def load_tradeoff(path: str | Path) -> TradeoffFunction:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        facets = data["facets"]
    except (TypeError, KeyError) as exc:
        raise FdpError(f"{path}: trade-off JSON needs 'facets'") from exc
    return TradeoffFunction(tuple((float(a), float(b)) for a, b in facets))


def _sig6(x: float) -> float:
    return float(f"{x:.6g}")


def channel_to_json(ch: Channel2 | GeneralChannel) -> dict:
    rows = ch.matrix() if isinstance(ch, Channel2) else ch.rows
    return {
        "labels": list(ch.labels),
        "rows": [[_sig6(v) for v in row] for row in rows],
    }


def tradeoff_to_json(f: TradeoffFunction) -> dict:
    return {"facets": [[_sig6(a), _sig6(b)] for a, b in f.facets]}

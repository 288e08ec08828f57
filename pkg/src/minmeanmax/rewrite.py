"""Negation elimination for unit-interval min/max/average circuits.

This is a separate little language from :mod:`minmeanmax.expr`: values
live in [0, 1] and negation means the complement ``1 - x``.  Because
complement swaps min with max and slides through averages unchanged,
every ``Neg`` can be pushed down to the leaves, where it is absorbed
into pre-complemented inputs (``ns3`` reads channel 3 and complements
it).  The rewrite never grows the tree and is an exact semantic
identity, not an approximation.

Text form mirrors the main expression grammar: leaves ``s<k>`` and
``ns<k>``, forms ``(neg e)``, ``(min e e+)``, ``(max e e+)``,
``(avg e e+)``.
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .sexpr import ParseError, Token, tokenize

__all__ = [
    "Input",
    "NegInput",
    "Neg",
    "Min",
    "Max",
    "Avg",
    "NExpr",
    "children",
    "iter_nodes",
    "support",
    "size",
    "negation_count",
    "eliminate_negation",
    "evaluate_nexpr",
    "parse_nexpr",
    "format_nexpr",
    "random_nexpr",
]


@dataclass(frozen=True)
class Input:
    """Read a channel as-is."""

    index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", operator.index(self.index))
        if self.index < 0:
            raise ValueError("channel index must be non-negative")


@dataclass(frozen=True)
class NegInput:
    """Read a channel complemented: 1 minus its value."""

    index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", operator.index(self.index))
        if self.index < 0:
            raise ValueError("channel index must be non-negative")


@dataclass(frozen=True)
class Neg:
    """Complement of one operand."""

    child: "NExpr"


@dataclass(frozen=True, init=False)
class Min:
    children: tuple["NExpr", ...]

    def __init__(self, *children: "NExpr") -> None:
        if len(children) < 2:
            raise ValueError("min needs at least two operands")
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True, init=False)
class Max:
    children: tuple["NExpr", ...]

    def __init__(self, *children: "NExpr") -> None:
        if len(children) < 2:
            raise ValueError("max needs at least two operands")
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True, init=False)
class Avg:
    """Arithmetic average of the operands."""

    children: tuple["NExpr", ...]

    def __init__(self, *children: "NExpr") -> None:
        if len(children) < 2:
            raise ValueError("avg needs at least two operands")
        object.__setattr__(self, "children", tuple(children))


NExpr = Union[Input, NegInput, Neg, Min, Max, Avg]


def children(e: NExpr) -> tuple[NExpr, ...]:
    if isinstance(e, (Min, Max, Avg)):
        return e.children
    if isinstance(e, Neg):
        return (e.child,)
    return ()


def iter_nodes(e: NExpr) -> Iterator[NExpr]:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def support(e: NExpr) -> set[int]:
    """Channels read, complemented or not."""
    if isinstance(e, (Input, NegInput)):
        return {e.index}
    out: set[int] = set()
    for c in children(e):
        out |= support(c)
    return out


def size(e: NExpr) -> int:
    return 1 + sum(size(c) for c in children(e))


def negation_count(e: NExpr) -> int:
    """Number of ``Neg`` nodes (pre-complemented leaves do not count)."""
    return sum(1 for node in iter_nodes(e) if isinstance(node, Neg))


def eliminate_negation(e: NExpr) -> NExpr:
    """Equivalent tree with no ``Neg`` nodes.

    Complements are pushed toward the leaves: under an odd number of
    enclosing negations min becomes max and vice versa, averages stay
    averages, and leaves flip between plain and complemented reads.
    The result is never larger than the input.
    """
    return _push(e, False)


def _push(e: NExpr, flip: bool) -> NExpr:
    if isinstance(e, Input):
        return NegInput(e.index) if flip else e
    if isinstance(e, NegInput):
        return Input(e.index) if flip else e
    if isinstance(e, Neg):
        return _push(e.child, not flip)
    if isinstance(e, Min):
        kids = [_push(c, flip) for c in e.children]
        return Max(*kids) if flip else Min(*kids)
    if isinstance(e, Max):
        kids = [_push(c, flip) for c in e.children]
        return Min(*kids) if flip else Max(*kids)
    if isinstance(e, Avg):
        return Avg(*(_push(c, flip) for c in e.children))
    raise TypeError(f"not a unit-interval node: {e!r}")


def evaluate_nexpr(e: NExpr, frame) -> float | np.ndarray:
    """Evaluate on a frame (vector) or batch (``(n, w)``) of unit-interval values."""
    arr = np.asarray(frame, dtype=float)
    if arr.ndim not in (1, 2):
        raise ValueError("frame must be a vector or an (n, w) matrix")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError("channel values must lie in [0, 1]")
    needed = support(e)
    width = arr.shape[-1]
    if needed and max(needed) >= width:
        raise ValueError(
            f"expression reads channel {max(needed)} but the frame has width {width}"
        )
    out = _evaluate(e, arr)
    return float(out) if arr.ndim == 1 else np.asarray(out)


def _evaluate(e: NExpr, arr: np.ndarray) -> np.ndarray:
    if isinstance(e, Input):
        return arr[..., e.index]
    if isinstance(e, NegInput):
        return 1.0 - arr[..., e.index]
    if isinstance(e, Neg):
        return 1.0 - _evaluate(e.child, arr)
    if isinstance(e, Min):
        return np.minimum.reduce([_evaluate(c, arr) for c in e.children])
    if isinstance(e, Max):
        return np.maximum.reduce([_evaluate(c, arr) for c in e.children])
    if isinstance(e, Avg):
        return np.mean(np.stack([_evaluate(c, arr) for c in e.children]), axis=0)
    raise TypeError(f"not a unit-interval node: {e!r}")


_LEAF_RE = re.compile(r"(n?)s(\d+)\Z")


def parse_nexpr(text: str) -> NExpr:
    tokens = tokenize(text)
    if not tokens:
        raise ParseError("empty input", 1, 1)
    expr, pos = _parse(tokens, 0)
    if pos != len(tokens):
        tok = tokens[pos]
        raise ParseError(f"trailing input: {tok.text!r}", tok.line, tok.col)
    return expr


def _parse(tokens: list[Token], pos: int) -> tuple[NExpr, int]:
    def take(at: int, context: str) -> Token:
        if at >= len(tokens):
            last = tokens[-1]
            raise ParseError(
                f"unexpected end of input ({context})",
                last.line,
                last.col + len(last.text),
            )
        return tokens[at]

    tok = take(pos, "expected an expression")
    if tok.text == ")":
        raise ParseError("unexpected ')'", tok.line, tok.col)
    if tok.text != "(":
        m = _LEAF_RE.match(tok.text)
        if not m:
            raise ParseError(f"unexpected token {tok.text!r}", tok.line, tok.col)
        index = int(m.group(2))
        return (NegInput(index) if m.group(1) else Input(index)), pos + 1

    op = take(pos + 1, "expected an operator after '('")
    if op.text not in ("neg", "min", "max", "avg"):
        raise ParseError(f"unknown operator {op.text!r}", op.line, op.col)
    pos += 2
    operands: list[NExpr] = []
    while True:
        tok = take(pos, f"unclosed '{op.text}' form")
        if tok.text == ")":
            pos += 1
            break
        operand, pos = _parse(tokens, pos)
        operands.append(operand)

    if op.text == "neg":
        if len(operands) != 1:
            raise ParseError(
                f"neg takes exactly 1 operand, got {len(operands)}", op.line, op.col
            )
        return Neg(operands[0]), pos
    if len(operands) < 2:
        raise ParseError(
            f"{op.text} needs at least 2 operands, got {len(operands)}", op.line, op.col
        )
    node = {"min": Min, "max": Max, "avg": Avg}[op.text]
    return node(*operands), pos


def format_nexpr(e: NExpr) -> str:
    if isinstance(e, Input):
        return f"s{e.index}"
    if isinstance(e, NegInput):
        return f"ns{e.index}"
    if isinstance(e, Neg):
        return f"(neg {format_nexpr(e.child)})"
    op = {Min: "min", Max: "max", Avg: "avg"}.get(type(e))
    if op is None:
        raise TypeError(f"not a unit-interval node: {e!r}")
    return f"({op} " + " ".join(format_nexpr(c) for c in e.children) + ")"


def random_nexpr(width: int, max_size: int, rng: np.random.Generator) -> NExpr:
    """Random tree fuzzing helper: at most ``max_size`` nodes, all kinds."""
    if width < 1:
        raise ValueError("need at least one channel")
    if max_size < 1:
        raise ValueError("size budget must be positive")
    budget = [max_size]

    def leaf() -> NExpr:
        budget[0] -= 1
        index = int(rng.integers(width))
        return NegInput(index) if rng.random() < 0.3 else Input(index)

    def gen() -> NExpr:
        if budget[0] < 2 or rng.random() < 0.3:
            return leaf()
        roll = rng.random()
        if roll < 0.25:
            budget[0] -= 1
            return Neg(gen())
        if budget[0] < 3:
            return leaf()
        budget[0] -= 1
        arity = 2 + int(rng.integers(2))
        kids = [gen() if budget[0] >= 1 else leaf() for _ in range(arity)]
        kind = (Min, Max, Avg)[int(rng.integers(3))]
        return kind(*kids)

    tree = gen()
    return tree if size(tree) <= max_size else leaf()

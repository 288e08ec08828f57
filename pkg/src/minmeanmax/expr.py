"""Immutable expression trees over indexed signal channels.

An expression reads some channels of a frame (a vector of real values,
one per channel) and reduces them with min, max, binary difference, and
exponent-indexed means; ``Zero`` is the only literal.  Trees are plain
frozen dataclasses compared structurally, so they can live in sets and
serve as dictionary keys.

Besides evaluation this module carries the static analyses used
elsewhere: channel support, size and depth, and a conservative
shift-behaviour analysis (:func:`homogeneity_degree`).
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Union

import numpy as np

from .means import Alpha, additive_mean

__all__ = [
    "Zero",
    "Input",
    "Min",
    "Max",
    "Diff",
    "Mean",
    "Expr",
    "children",
    "iter_nodes",
    "support",
    "size",
    "depth",
    "HomogeneityDegree",
    "homogeneity_degree",
    "evaluate",
]


@dataclass(frozen=True)
class Zero:
    """The constant 0, the only literal in the algebra."""


@dataclass(frozen=True)
class Input:
    """A single channel read, 0-based."""

    index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", operator.index(self.index))
        if self.index < 0:
            raise ValueError("channel index must be non-negative")


@dataclass(frozen=True, init=False)
class Min:
    """Pointwise minimum of two or more operands."""

    children: tuple["Expr", ...]

    def __init__(self, *children: "Expr") -> None:
        if len(children) < 2:
            raise ValueError("min needs at least two operands")
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True, init=False)
class Max:
    """Pointwise maximum of two or more operands."""

    children: tuple["Expr", ...]

    def __init__(self, *children: "Expr") -> None:
        if len(children) < 2:
            raise ValueError("max needs at least two operands")
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True)
class Diff:
    """Left minus right; the only non-monotone connective."""

    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, init=False)
class Mean:
    """Shift-equivariant mean of the operands with a fixed exponent."""

    alpha: Alpha
    children: tuple["Expr", ...]

    def __init__(self, alpha: Alpha | float, *children: "Expr") -> None:
        if not isinstance(alpha, Alpha):
            alpha = Alpha(float(alpha))
        if len(children) < 2:
            raise ValueError("mean needs at least two operands")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "children", tuple(children))


Expr = Union[Zero, Input, Min, Max, Diff, Mean]


def children(e: Expr) -> tuple[Expr, ...]:
    """Direct operands of a node, empty for leaves."""
    if isinstance(e, (Min, Max, Mean)):
        return e.children
    if isinstance(e, Diff):
        return (e.left, e.right)
    return ()


def iter_nodes(e: Expr) -> Iterator[Expr]:
    """All nodes in preorder (a node precedes its operands)."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def support(e: Expr) -> set[int]:
    """Set of channel indices the expression reads."""
    if isinstance(e, Input):
        return {e.index}
    out: set[int] = set()
    for c in children(e):
        out |= support(c)
    return out


def size(e: Expr) -> int:
    """Total node count."""
    return 1 + sum(size(c) for c in children(e))


def depth(e: Expr) -> int:
    """Longest root-to-leaf edge count; 0 for a leaf."""
    kids = children(e)
    if not kids:
        return 0
    return 1 + max(depth(c) for c in kids)


class HomogeneityDegree(Enum):
    """How an expression responds to adding a constant to every channel.

    ``ONE`` means the output shifts by exactly that constant, ``ZERO``
    means it does not move at all, ``UNKNOWN`` makes no claim.  The
    analysis is syntactic and conservative: ONE/ZERO answers are sound,
    UNKNOWN may cover expressions that do in fact behave regularly.
    """

    ZERO = "zero"
    ONE = "one"
    UNKNOWN = "unknown"


def homogeneity_degree(e: Expr) -> HomogeneityDegree:
    """Conservative shift-degree of ``e``; see :class:`HomogeneityDegree`."""
    if isinstance(e, Zero):
        return HomogeneityDegree.ZERO
    if isinstance(e, Input):
        return HomogeneityDegree.ONE
    if isinstance(e, Diff):
        left = homogeneity_degree(e.left)
        right = homogeneity_degree(e.right)
        # a shared known degree cancels; anything mixed or unknown does not
        if left is right and left is not HomogeneityDegree.UNKNOWN:
            return HomogeneityDegree.ZERO
        return HomogeneityDegree.UNKNOWN
    degrees = {homogeneity_degree(c) for c in children(e)}
    if degrees == {HomogeneityDegree.ONE}:
        return HomogeneityDegree.ONE
    if degrees == {HomogeneityDegree.ZERO}:
        return HomogeneityDegree.ZERO
    return HomogeneityDegree.UNKNOWN


def evaluate(e: Expr, frame) -> float | np.ndarray:
    """Evaluate ``e`` on one frame or a batch of frames.

    ``frame`` is either a vector of channel values (returns a float) or
    an ``(n, w)`` matrix of n frames (returns n values).  Channels index
    the last axis.  Min/max are exact selections; mean nodes reduce
    their operands with :func:`minmeanmax.means.additive_mean`.
    """
    arr = np.asarray(frame, dtype=float)
    if arr.ndim not in (1, 2):
        raise ValueError("frame must be a vector or an (n, w) matrix")
    needed = support(e)
    width = arr.shape[-1]
    if needed and max(needed) >= width:
        raise ValueError(
            f"expression reads channel {max(needed)} but the frame has width {width}"
        )
    out = _evaluate(e, arr)
    return float(out) if arr.ndim == 1 else np.asarray(out)


def _evaluate(e: Expr, arr: np.ndarray) -> np.ndarray:
    if isinstance(e, Input):
        return arr[..., e.index]
    if isinstance(e, Zero):
        return np.zeros(arr.shape[:-1])
    if isinstance(e, Min):
        return np.minimum.reduce([_evaluate(c, arr) for c in e.children])
    if isinstance(e, Max):
        return np.maximum.reduce([_evaluate(c, arr) for c in e.children])
    if isinstance(e, Diff):
        return _evaluate(e.left, arr) - _evaluate(e.right, arr)
    if isinstance(e, Mean):
        stacked = np.stack([_evaluate(c, arr) for c in e.children])
        return np.asarray(additive_mean(e.alpha, stacked))
    raise TypeError(f"not an expression node: {e!r}")

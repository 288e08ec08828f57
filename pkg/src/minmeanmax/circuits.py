"""Comparator networks and min/max circuit synthesis.

A :class:`ComparatorNetwork` is an oblivious sorting-style circuit:
layers of disjoint channel pairs, each pair routing the smaller value to
its lower channel.  Verification uses the 0/1 principle (a network that
sorts every binary vector sorts every real vector), so it is exhaustive
but exponential and capped by a width budget.

From a verified network, :func:`quantile_circuit` builds a pure min/max
expression computing any order statistic by symbolic simulation: run the
network on channel variables, turning each comparator into a Min/Max
node pair, and keep the tree that ends on the requested output channel.
Everything not feeding that channel is dropped by construction.
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass

import numpy as np

from .expr import Expr, Input, Max, Min

__all__ = [
    "ComparatorNetwork",
    "VERIFY_WIDTH_LIMIT",
    "batcher_bitonic",
    "optimal_network_8",
    "verify_sorts",
    "quantile_circuit",
    "second_largest_depth2",
    "format_network",
    "parse_network",
]

VERIFY_WIDTH_LIMIT = 24

Pair = tuple[int, int]


@dataclass(frozen=True, init=False)
class ComparatorNetwork:
    """Layered compare-exchange circuit on ``width`` channels.

    Every pair ``(i, j)`` has ``i < j`` and sends the minimum to ``i``.
    Pairs within one layer must be channel-disjoint (they act in
    parallel); layers are kept in application order and each layer's
    pairs are stored sorted, which is canonical because order within a
    layer is immaterial.
    """

    width: int
    layers: tuple[tuple[Pair, ...], ...]

    def __init__(self, width: int, layers) -> None:
        width = operator.index(width)
        if width < 1:
            raise ValueError("network width must be at least 1")
        normalized: list[tuple[Pair, ...]] = []
        for layer in layers:
            pairs = tuple((operator.index(i), operator.index(j)) for i, j in layer)
            used: set[int] = set()
            for i, j in pairs:
                if not 0 <= i < j < width:
                    raise ValueError(f"bad comparator ({i}, {j}) for width {width}")
                if i in used or j in used:
                    raise ValueError(f"channel reused within a layer: ({i}, {j})")
                used.update((i, j))
            normalized.append(tuple(sorted(pairs)))
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "layers", tuple(normalized))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def comparator_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def apply(self, values) -> list[float]:
        """Run on one input vector; reference semantics, one swap at a time."""
        out = [float(v) for v in values]
        if len(out) != self.width:
            raise ValueError(f"expected {self.width} values, got {len(out)}")
        for layer in self.layers:
            for i, j in layer:
                if out[i] > out[j]:
                    out[i], out[j] = out[j], out[i]
        return out


def batcher_bitonic(n: int) -> ComparatorNetwork:
    """Bitonic sorting network on ``n`` channels, ascending comparators only.

    Built for the next power of two and cut down: the phantom upper
    channels hold +infinity forever (the first layer of each merge stage
    is crossed, so a phantom channel only ever appears as the larger end
    of a comparator), which makes every comparator touching one an
    identity; those are simply dropped.  Depth is k(k+1)/2 at n = 2**k.
    """
    n = operator.index(n)
    if n < 1:
        raise ValueError("network width must be at least 1")
    padded = 1 << (n - 1).bit_length()
    layers: list[list[Pair]] = []
    block = 2
    while block <= padded:
        # crossed layer: merges pairs of sorted runs into bitonic order
        layers.append(
            [
                (base + i, base + block - 1 - i)
                for base in range(0, padded, block)
                for i in range(block // 2)
            ]
        )
        half = block // 4
        while half >= 1:
            layers.append(
                [
                    (base + i, base + i + half)
                    for base in range(0, padded, 2 * half)
                    for i in range(half)
                ]
            )
            half //= 2
        block *= 2
    real = [[(i, j) for i, j in layer if j < n] for layer in layers]
    return ComparatorNetwork(n, [layer for layer in real if layer])


_OPT8_LAYERS = (
    ((0, 1), (2, 3), (4, 5), (6, 7)),
    ((0, 2), (1, 3), (4, 6), (5, 7)),
    ((1, 2), (5, 6)),
    ((0, 4), (1, 5), (2, 6), (3, 7)),
    ((2, 4), (3, 5)),
    ((1, 2), (3, 4), (5, 6)),
)


def optimal_network_8() -> ComparatorNetwork:
    """The depth-6, 19-comparator sorting network on 8 channels."""
    return ComparatorNetwork(8, _OPT8_LAYERS)


def verify_sorts(net: ComparatorNetwork, *, width_limit: int = VERIFY_WIDTH_LIMIT) -> bool:
    """Exhaustively check that ``net`` sorts, via the 0/1 principle.

    Runs all ``2**width`` binary vectors through the network in chunks;
    refuses widths beyond ``width_limit`` rather than silently taking
    hours.
    """
    n = net.width
    if n > width_limit:
        raise ValueError(f"width {n} exceeds the exhaustive budget of {width_limit}")
    total = 1 << n
    chunk = 1 << 16
    shifts = np.arange(n, dtype=np.uint64)
    for start in range(0, total, chunk):
        ids = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        bits = ((ids[:, None] >> shifts) & 1).astype(np.uint8)
        for layer in net.layers:
            for i, j in layer:
                lo = np.minimum(bits[:, i], bits[:, j])
                hi = np.maximum(bits[:, i], bits[:, j])
                bits[:, i] = lo
                bits[:, j] = hi
        if np.any(bits[:, :-1] > bits[:, 1:]):
            return False
    return True


def quantile_circuit(n: int, k: int, source: ComparatorNetwork) -> Expr:
    """Min/max expression computing the k-th smallest of ``n`` channels.

    ``source`` must be a sorting network of width ``n`` (verified here);
    the circuit is its symbolic run restricted to the cone of output
    channel ``k - 1``, so comparators that cannot influence that channel
    never enter the tree.  Depth is at most the network depth.
    """
    n = operator.index(n)
    k = operator.index(k)
    if n < 1:
        raise ValueError("need at least one channel")
    if not 1 <= k <= n:
        raise ValueError(f"rank {k} is out of range for {n} channels")
    if source.width != n:
        raise ValueError(f"source network has width {source.width}, expected {n}")
    if not verify_sorts(source):
        raise ValueError("source network does not sort")
    lanes: list[Expr] = [Input(i) for i in range(n)]
    for layer in source.layers:
        for i, j in layer:
            lo, hi = lanes[i], lanes[j]
            lanes[i] = Min(lo, hi)
            lanes[j] = Max(lo, hi)
    return lanes[k - 1]


def _min_of(terms: list[Expr]) -> Expr:
    return terms[0] if len(terms) == 1 else Min(*terms)


def _max_of(terms: list[Expr]) -> Expr:
    return terms[0] if len(terms) == 1 else Max(*terms)


def second_largest_depth2(n: int, variant: str = "min_of_maxes") -> Expr:
    """Depth-2 expression for the second largest of ``n`` channels.

    ``"min_of_maxes"``: for each channel, take the max of the others,
    then the min over channels.  ``"max_of_mins"``: max over all pairs
    of the pairwise min.  Both have depth exactly 2 for n >= 3 (n = 2
    degenerates to a single min either way).
    """
    n = operator.index(n)
    if n < 2:
        raise ValueError("second largest needs at least two channels")
    if variant == "min_of_maxes":
        drops = [
            _max_of([Input(j) for j in range(n) if j != i]) for i in range(n)
        ]
        return _min_of(drops)
    if variant == "max_of_mins":
        pairs = [
            Min(Input(i), Input(j)) for i in range(n) for j in range(i + 1, n)
        ]
        return _max_of(pairs)
    raise ValueError(f"unknown variant {variant!r}")


def format_network(net: ComparatorNetwork) -> str:
    """Text form: a ``width n`` line, then one ``i:j``-pair line per layer."""
    lines = [f"width {net.width}"]
    for layer in net.layers:
        lines.append(" ".join(f"{i}:{j}" for i, j in layer))
    return "\n".join(lines) + "\n"


_WIDTH_LINE_RE = re.compile(r"width\s+(\d+)\Z")
_PAIR_RE = re.compile(r"(\d+):(\d+)\Z")


def parse_network(text: str) -> ComparatorNetwork:
    """Inverse of :func:`format_network`; blank lines are ignored."""
    numbered = [
        (idx, line.strip())
        for idx, line in enumerate(text.splitlines(), start=1)
        if line.strip()
    ]
    if not numbered:
        raise ValueError("empty network description")
    first_no, first = numbered[0]
    m = _WIDTH_LINE_RE.match(first)
    if not m:
        raise ValueError(f"line {first_no}: expected 'width <n>', got {first!r}")
    width = int(m.group(1))
    layers: list[list[Pair]] = []
    for line_no, line in numbered[1:]:
        layer: list[Pair] = []
        for item in line.split():
            pm = _PAIR_RE.match(item)
            if not pm:
                raise ValueError(f"line {line_no}: malformed comparator {item!r}")
            layer.append((int(pm.group(1)), int(pm.group(2))))
        layers.append(layer)
    try:
        return ComparatorNetwork(width, layers)
    except ValueError as exc:
        raise ValueError(f"invalid network: {exc}") from None

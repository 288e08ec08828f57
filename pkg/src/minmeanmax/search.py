"""Evolutionary search for discriminating expressions.

Genetic programming over the expression trees of :mod:`minmeanmax.expr`:
tournament selection with single-elite carryover, subtree crossover and
subtree/exponent mutation, all under hard depth and size budgets.  Mean
exponents are drawn from a small fixed palette so mutation can step to a
neighbouring exponent instead of wandering the real line.

For threshold-bearing classifier kinds the threshold is not evolved; for
each candidate expression the best cut is fitted directly by sweeping
the midpoints between consecutive distinct sorted values, which is exact
for the counting fitnesses.  An optional structural constraint restricts
the population to differences of translation-equivariant trees, making
every candidate's verdicts immune to global shifts of a frame by
construction.

``generate_synthetic`` builds the two-class bump-profile datasets used
throughout: per-channel Gaussian noise plus an optional per-frame global
shift, with the random stream laid out so that runs differing only in
the shift range agree frame-for-frame once the shift is subtracted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Optional

import numpy as np

from .classifiers import Classifier, ClassifierKind, Dataset
from .expr import (
    Diff,
    Expr,
    HomogeneityDegree,
    Input,
    Max,
    Mean,
    Min,
    Zero,
    children,
    depth,
    evaluate,
    homogeneity_degree,
    iter_nodes,
    size,
)
from .means import Alpha

__all__ = [
    "DEFAULT_ALPHA_PALETTE",
    "FITNESS_KINDS",
    "SearchConfig",
    "SearchResult",
    "random_expr",
    "mutate",
    "crossover",
    "fit_threshold",
    "evolve",
    "default_profiles",
    "generate_synthetic",
    "parse_config",
    "format_config",
]

DEFAULT_ALPHA_PALETTE: tuple[Alpha, ...] = (
    Alpha.NEG_INF,
    Alpha(-2.0),
    Alpha(-1.0),
    Alpha(0.0),
    Alpha(1.0),
    Alpha(2.0),
    Alpha.POS_INF,
)

FITNESS_KINDS = ("accuracy", "accuracy_coverage", "margin")

# margin fitness sweeps a fixed quantile grid instead of every midpoint;
# the tanh objective is smooth, so a coarse grid loses almost nothing
_MARGIN_GRID = 65


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for :func:`evolve`; defaults are the standard small-run setup."""

    population_size: int = 200
    generations: int = 50
    tournament_size: int = 4
    mutation_prob: float = 0.2
    crossover_prob: float = 0.7
    max_depth: int = 8
    max_size: int = 64
    alpha_palette: tuple[Alpha, ...] = DEFAULT_ALPHA_PALETTE
    classifier_kind: ClassifierKind = ClassifierKind.Z
    fitness: str = "accuracy"
    degree_zero_only: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise ValueError("population needs at least 2 individuals")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")
        if not 1 <= self.tournament_size <= self.population_size:
            raise ValueError("tournament size must be in [1, population size]")
        for name in ("mutation_prob", "crossover_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.max_depth < 1:
            raise ValueError("depth budget must be at least 1")
        if self.max_size < 3:
            raise ValueError("size budget must allow at least one connective")
        palette = tuple(self.alpha_palette)
        if not palette:
            raise ValueError("exponent palette must not be empty")
        for lo, hi in zip(palette, palette[1:]):
            if not lo.value < hi.value:
                raise ValueError("exponent palette must be strictly ascending")
        object.__setattr__(self, "alpha_palette", palette)
        if self.fitness not in FITNESS_KINDS:
            raise ValueError(f"unknown fitness {self.fitness!r}")


@dataclass(frozen=True)
class SearchResult:
    best: Classifier
    best_fitness: float
    fitness_trace: tuple[float, ...]
    evaluations: int


def random_expr(
    width: int,
    depth_budget: int,
    palette: tuple[Alpha, ...],
    rng: np.random.Generator,
    *,
    max_size: Optional[int] = None,
    include_zero: bool = True,
    include_diff: bool = True,
) -> Expr:
    """Random tree of depth at most ``depth_budget`` (and size at most
    ``max_size`` when given).

    Leaves are channel reads, with an occasional ``Zero``; internal
    nodes pick among min/max/mean (arity 2 or 3) and binary diff, with
    mean exponents drawn from ``palette``.  The ``include_*`` switches
    exist for callers assembling structurally constrained trees.
    """
    if width < 1:
        raise ValueError("need at least one channel")
    if depth_budget < 0:
        raise ValueError("depth budget must be non-negative")
    if max_size is not None and max_size < 1:
        raise ValueError("size budget must be positive")
    if not palette:
        raise ValueError("exponent palette must not be empty")

    cap = max_size if max_size is not None else 1 << 30
    ops = ("min", "max", "mean") + (("diff",) if include_diff else ())

    while True:
        budget = [cap]

        def leaf() -> Expr:
            budget[0] -= 1
            if include_zero and rng.random() < 0.1:
                return Zero()
            return Input(int(rng.integers(width)))

        def gen(d: int) -> Expr:
            if d <= 0 or budget[0] < 3 or rng.random() < 0.25:
                return leaf()
            op = ops[int(rng.integers(len(ops)))]
            budget[0] -= 1
            if op == "diff":
                return Diff(gen(d - 1), gen(d - 1))
            arity = 2 if budget[0] < 4 else 2 + int(rng.integers(2))
            kids = [gen(d - 1) if budget[0] >= 1 else leaf() for _ in range(arity)]
            if op == "min":
                return Min(*kids)
            if op == "max":
                return Max(*kids)
            return Mean(palette[int(rng.integers(len(palette)))], *kids)

        tree = gen(depth_budget)
        # the budget guidance can overshoot by a node or two on ternary
        # splits, so enforce the cap exactly by resampling
        if max_size is None or size(tree) <= max_size:
            return tree


def _subtree_at(e: Expr, index: int) -> Expr:
    for at, node in enumerate(iter_nodes(e)):
        if at == index:
            return node
    raise IndexError(index)


def _replace_subtree(e: Expr, index: int, replacement: Expr) -> Expr:
    counter = [-1]

    def rec(node: Expr) -> Expr:
        counter[0] += 1
        if counter[0] == index:
            return replacement
        if isinstance(node, Min):
            return Min(*(rec(c) for c in node.children))
        if isinstance(node, Max):
            return Max(*(rec(c) for c in node.children))
        if isinstance(node, Mean):
            return Mean(node.alpha, *(rec(c) for c in node.children))
        if isinstance(node, Diff):
            return Diff(rec(node.left), rec(node.right))
        return node

    out = rec(e)
    if counter[0] < index:
        raise IndexError(index)
    return out


def _node_depths(e: Expr) -> list[int]:
    """Depth of every node in the same preorder as ``iter_nodes``."""
    out: list[int] = []

    def rec(node: Expr, d: int) -> None:
        out.append(d)
        for c in children(node):
            rec(c, d + 1)

    rec(e, 0)
    return out


def mutate(
    e: Expr, config: SearchConfig, rng: np.random.Generator, width: int
) -> Expr:
    """One mutation step: replace a random subtree with a fresh one, or
    (when mean nodes exist) sometimes nudge one mean's exponent to an
    adjacent palette member.  Budgets of ``config`` are preserved."""
    nodes = list(iter_nodes(e))
    mean_positions = [i for i, node in enumerate(nodes) if isinstance(node, Mean)]
    if mean_positions and len(config.alpha_palette) > 1 and rng.random() < 0.3:
        pos = mean_positions[int(rng.integers(len(mean_positions)))]
        node = nodes[pos]
        assert isinstance(node, Mean)
        values = [a.value for a in config.alpha_palette]
        nearest = min(range(len(values)), key=lambda i: _alpha_gap(values[i], node.alpha.value))
        if nearest == 0:
            step = 1
        elif nearest == len(values) - 1:
            step = -1
        else:
            step = 1 if rng.random() < 0.5 else -1
        fresh = Mean(config.alpha_palette[nearest + step], *node.children)
        return _replace_subtree(e, pos, fresh)

    pos = int(rng.integers(len(nodes)))
    at_depth = _node_depths(e)[pos]
    removed = size(nodes[pos])
    room = config.max_size - (size(e) - removed)
    fresh = random_expr(
        width,
        max(0, config.max_depth - at_depth),
        config.alpha_palette,
        rng,
        max_size=max(1, room),
    )
    return _replace_subtree(e, pos, fresh)


def _alpha_gap(a: float, b: float) -> float:
    if a == b:
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return math.inf
    return abs(a - b)


def crossover(
    a: Expr, b: Expr, config: SearchConfig, rng: np.random.Generator
) -> Expr:
    """Graft a random subtree of ``b`` onto a random position of ``a``.

    Offspring violating the depth or size budget are rejected and
    redrawn up to ten times; if nothing fits, ``a`` is returned
    unchanged.
    """
    size_a = size(a)
    size_b = size(b)
    for _ in range(10):
        pos_a = int(rng.integers(size_a))
        pos_b = int(rng.integers(size_b))
        child = _replace_subtree(a, pos_a, _subtree_at(b, pos_b))
        if depth(child) <= config.max_depth and size(child) <= config.max_size:
            return child
    return a


def fit_threshold(
    values: np.ndarray,
    labels: np.ndarray,
    kind: ClassifierKind,
    fitness: str = "accuracy",
) -> tuple[float, float]:
    """Best threshold for ``kind`` on decision values, and its fitness.

    Candidate cuts are the midpoints of consecutive distinct values plus
    one sentinel on each side; for the counting fitnesses this covers
    every split that decides all frames (cuts colliding with data values,
    which would abstain on the ties, are deliberately not candidates).
    The margin fitness sweeps a fixed quantile grid instead.  Kind
    ``A_PLUS`` only considers non-positive cuts, with 0 always among the
    candidates, so a valid classifier always exists; tie counting is
    split-consistent when a candidate does land on a value.
    """
    if kind is ClassifierKind.Z:
        raise ValueError("kind Z has no threshold to fit")
    if fitness not in FITNESS_KINDS:
        raise ValueError(f"unknown fitness {fitness!r}")
    values = np.asarray(values, dtype=float)
    labels = np.asarray(labels)
    if values.shape != labels.shape or values.ndim != 1 or values.size == 0:
        raise ValueError("need matching non-empty 1-D values and labels")

    if fitness == "margin":
        qs = np.linspace(0.0, 1.0, _MARGIN_GRID)
        cuts = np.unique(np.quantile(values, qs))
    else:
        sv = np.sort(values)
        distinct = np.unique(sv)
        mids = (distinct[:-1] + distinct[1:]) / 2.0
        cuts = np.concatenate(([distinct[0] - 1.0], mids, [distinct[-1] + 1.0]))
    if kind is ClassifierKind.A_PLUS:
        cuts = np.concatenate((cuts[cuts <= 0.0], [0.0]))
    cuts = np.unique(cuts)

    scores = _fitness_scores(values, labels, kind, fitness, cuts)
    best = int(np.argmax(scores))
    return float(cuts[best]), float(scores[best])


def _fitness_scores(
    values: np.ndarray,
    labels: np.ndarray,
    kind: ClassifierKind,
    fitness: str,
    cuts: np.ndarray,
) -> np.ndarray:
    """Fitness of each candidate cut, vectorized over cuts."""
    n = values.size
    if fitness == "margin":
        # mean tanh margin, oriented so class 2 wants large values
        sign = np.where(labels == 2, 1.0, -1.0)
        return np.tanh(sign[None, :] * (values[None, :] - cuts[:, None])).mean(axis=1)

    order = np.argsort(values, kind="stable")
    sv = values[order]
    is1 = (labels[order] == 1).astype(np.int64)
    ones_below = np.concatenate(([0], np.cumsum(is1)))
    total_ones = int(ones_below[-1])
    lo = np.searchsorted(sv, cuts, side="left")
    hi = np.searchsorted(sv, cuts, side="right")

    if kind is ClassifierKind.B:
        decided = n - (hi - lo)
        correct = ones_below[lo] + ((n - hi) - (total_ones - ones_below[hi]))
    else:  # A and A_PLUS decide only below the cut
        decided = lo
        correct = ones_below[lo]
    with np.errstate(invalid="ignore"):
        accuracy = np.where(decided > 0, correct / np.maximum(decided, 1), 0.0)
    if fitness == "accuracy":
        return accuracy
    return accuracy * (decided / n)


def _z_fitness(values: np.ndarray, labels: np.ndarray, fitness: str) -> float:
    n = values.size
    if fitness == "margin":
        sign = np.where(labels == 2, 1.0, -1.0)
        return float(np.tanh(sign * values).mean())
    below = values < 0.0
    above = values > 0.0
    decided = int(np.count_nonzero(below | above))
    correct = int(np.count_nonzero(below & (labels == 1)))
    correct += int(np.count_nonzero(above & (labels == 2)))
    accuracy = correct / decided if decided else 0.0
    if fitness == "accuracy":
        return accuracy
    return accuracy * (decided / n)


def _score(
    expr: Expr, frames: np.ndarray, labels: np.ndarray, config: SearchConfig
) -> tuple[float, Optional[float]]:
    values = np.asarray(evaluate(expr, frames))
    if config.classifier_kind is ClassifierKind.Z:
        return _z_fitness(values, labels, config.fitness), None
    cut, fit = fit_threshold(values, labels, config.classifier_kind, config.fitness)
    return fit, cut


def _initial_candidate(
    width: int, config: SearchConfig, rng: np.random.Generator
) -> Expr:
    depth_budget = 1 + int(rng.integers(min(config.max_depth, 5)))
    if not config.degree_zero_only:
        return random_expr(
            width, depth_budget, config.alpha_palette, rng, max_size=config.max_size
        )
    # a difference of two shift-equivariant trees is shift-invariant by
    # construction: build both halves without Zero or Diff nodes
    half = (config.max_size - 1) // 2
    side_budget = max(0, depth_budget - 1)
    left = random_expr(
        width, side_budget, config.alpha_palette, rng,
        max_size=half, include_zero=False, include_diff=False,
    )
    right = random_expr(
        width, side_budget, config.alpha_palette, rng,
        max_size=half, include_zero=False, include_diff=False,
    )
    return Diff(left, right)


def evolve(dataset: Dataset, config: SearchConfig) -> SearchResult:
    """Run the generational search and return the best classifier found.

    Deterministic for a fixed dataset and config: all randomness flows
    from one generator seeded with ``config.seed``.  The single best
    individual is copied into the next generation unmodified, so the
    fitness trace (one entry for the initial population plus one per
    generation) is non-decreasing.
    """
    if len(dataset) == 0:
        raise ValueError("cannot search on an empty dataset")
    rng = np.random.default_rng(config.seed)
    frames = dataset.frames
    labels = dataset.labels
    width = dataset.width
    evaluations = 0

    def score(expr: Expr) -> tuple[float, Optional[float]]:
        nonlocal evaluations
        evaluations += 1
        return _score(expr, frames, labels, config)

    population = [
        _initial_candidate(width, config, rng)
        for _ in range(config.population_size)
    ]
    scored = [score(e) for e in population]
    fits = [s[0] for s in scored]

    best_at = int(np.argmax(fits))
    best_expr = population[best_at]
    best_fit, best_cut = scored[best_at]
    trace = [best_fit]

    def tournament() -> Expr:
        picks = rng.integers(config.population_size, size=config.tournament_size)
        winner = max(picks, key=lambda i: fits[int(i)])
        return population[int(winner)]

    for _ in range(config.generations):
        next_population = [best_expr]
        next_fits = [best_fit]
        next_cuts = [best_cut]
        while len(next_population) < config.population_size:
            child = parent = tournament()
            if rng.random() < config.crossover_prob:
                child = crossover(child, tournament(), config, rng)
            if rng.random() < config.mutation_prob:
                child = mutate(child, config, rng, width)
            if (
                config.degree_zero_only
                and homogeneity_degree(child) is not HomogeneityDegree.ZERO
            ):
                child = parent  # variation broke the invariance; keep the parent
            fit, cut = score(child)
            next_population.append(child)
            next_fits.append(fit)
            next_cuts.append(cut)
        population = next_population
        fits = next_fits
        gen_best = int(np.argmax(fits))
        if fits[gen_best] > best_fit:
            best_fit = fits[gen_best]
            best_expr = population[gen_best]
            best_cut = next_cuts[gen_best]
        trace.append(best_fit)

    if config.classifier_kind is ClassifierKind.Z:
        best = Classifier(ClassifierKind.Z, best_expr)
    else:
        best = Classifier(config.classifier_kind, best_expr, best_cut)
    return SearchResult(
        best=best,
        best_fitness=float(best_fit),
        fitness_trace=tuple(trace),
        evaluations=evaluations,
    )


def default_profiles(width: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """The stock pair of class profiles: bumps of height 3 on channels
    1 and 4 for class 1, channels 2 and 6 for class 2."""
    if width < 7:
        raise ValueError("default profiles need a width of at least 7")
    one = np.zeros(width)
    one[[1, 4]] = 3.0
    two = np.zeros(width)
    two[[2, 6]] = 3.0
    return one, two


def generate_synthetic(
    width: int = 8,
    frames_per_class: int = 500,
    profiles: Optional[tuple[np.ndarray, np.ndarray]] = None,
    noise_sigma: float = 0.5,
    shift_range: tuple[float, float] = (0.0, 0.0),
    seed: int = 0,
) -> Dataset:
    """Two-class synthetic dataset: profile + Gaussian noise + global shift.

    Each frame is its class profile plus i.i.d. channel noise plus one
    uniform shift added to every channel.  Noise is drawn before shifts,
    and both draws happen even when degenerate, so runs that differ only
    in ``shift_range`` see identical noise: subtracting the shifts
    recovers the unshifted dataset bit-for-bit.
    """
    if frames_per_class < 1:
        raise ValueError("need at least one frame per class")
    if noise_sigma < 0.0:
        raise ValueError("noise level must be non-negative")
    lo, hi = float(shift_range[0]), float(shift_range[1])
    if lo > hi:
        raise ValueError("shift range must satisfy low <= high")
    if profiles is None:
        profiles = default_profiles(width)
    one = np.asarray(profiles[0], dtype=float)
    two = np.asarray(profiles[1], dtype=float)
    if one.shape != (width,) or two.shape != (width,):
        raise ValueError("profiles must match the frame width")

    rng = np.random.default_rng(seed)
    n = 2 * frames_per_class
    base = np.vstack(
        [np.tile(one, (frames_per_class, 1)), np.tile(two, (frames_per_class, 1))]
    )
    labels = np.repeat([1, 2], frames_per_class)
    noise = rng.normal(0.0, noise_sigma, size=(n, width))
    shifts = rng.uniform(lo, hi, size=n)
    return Dataset(base + noise + shifts[:, None], labels)


_CONFIG_BOOL = {"true": True, "false": False}


def format_config(config: SearchConfig) -> str:
    """Flat ``key = value`` text, one field per line."""
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if f.name == "alpha_palette":
            text = ", ".join(a.literal() for a in value)
        elif f.name == "classifier_kind":
            text = value.value
        elif isinstance(value, bool):
            text = "true" if value else "false"
        else:
            text = repr(value) if isinstance(value, float) else str(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def parse_config(text: str, base: Optional[SearchConfig] = None) -> SearchConfig:
    """Parse ``key = value`` lines into a config.

    Unknown keys and malformed values are errors; omitted keys keep the
    value from ``base`` (or the default).  ``#`` starts a comment.
    """
    config = base if base is not None else SearchConfig()
    known = {f.name for f in fields(config)}
    updates: dict[str, object] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {line_no}: expected 'key = value'")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in known:
            raise ValueError(f"line {line_no}: unknown key {key!r}")
        try:
            updates[key] = _parse_config_value(key, value)
        except ValueError as exc:
            raise ValueError(f"line {line_no}: {exc}") from None
    try:
        return replace(config, **updates)
    except ValueError as exc:
        raise ValueError(f"invalid configuration: {exc}") from None


def _parse_config_value(key: str, value: str):
    if key in ("population_size", "generations", "tournament_size",
               "max_depth", "max_size", "seed"):
        try:
            return int(value)
        except ValueError:
            raise ValueError(f"{key} expects an integer, got {value!r}") from None
    if key in ("mutation_prob", "crossover_prob"):
        try:
            return float(value)
        except ValueError:
            raise ValueError(f"{key} expects a number, got {value!r}") from None
    if key == "degree_zero_only":
        flag = _CONFIG_BOOL.get(value.lower())
        if flag is None:
            raise ValueError(f"{key} expects true or false, got {value!r}")
        return flag
    if key == "alpha_palette":
        parts = [p.strip() for p in value.split(",") if p.strip()]
        if not parts:
            raise ValueError("alpha_palette expects a comma-separated list")
        return tuple(Alpha.from_literal(p) for p in parts)
    if key == "classifier_kind":
        for kind in ClassifierKind:
            if kind.value == value:
                return kind
        raise ValueError(f"unknown classifier kind {value!r}")
    if key == "fitness":
        if value not in FITNESS_KINDS:
            raise ValueError(f"unknown fitness {value!r}")
        return value
    raise ValueError(f"unknown key {key!r}")

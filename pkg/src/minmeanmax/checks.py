"""Self-check suites behind the ``check`` CLI command.

Each suite re-verifies the contract of one module on freshly drawn
random data at full scale, independent of the pytest suite, so a
deployed install can be validated in place.  A check returns a
:class:`CheckResult`; a failed check carries a short diagnostic.

Note: the means suite includes a deliberately strict limit check
(additive means at exponent +/-40 within 1e-6 of max/min).  The true
gap of those means at that exponent is ln(n)/40 per the defining
formula, which is orders of magnitude larger, so that check fails by
design rather than silently loosening the stated tolerance.  See the
project README.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Callable

import numpy as np

from . import rewrite
from .circuits import (
    batcher_bitonic,
    optimal_network_8,
    quantile_circuit,
    second_largest_depth2,
    verify_sorts,
)
from .classifiers import Classifier, ClassifierKind, _verdict_codes, volume_invariance_test
from .expr import Diff, Input, depth, evaluate
from .means import Alpha, additive_mean, mean_ordering_check, power_mean
from .search import random_expr

__all__ = ["CheckResult", "SUITES", "run_suite", "run_all"]


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str = ""


def _result(suite: str, name: str, passed: bool, detail: str = "") -> CheckResult:
    return CheckResult(suite, name, bool(passed), "" if passed else detail)


# ---------------------------------------------------------------- means

_ORDER_GRID = [-8.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 8.0]


def _check_mean_ordering() -> CheckResult:
    rng = np.random.default_rng(11)
    bad = 0
    for length in range(2, 17):
        count = 10_000 // 15 + 1
        log_lo, log_hi = math.log(1e-3), math.log(1e3)
        batch = np.exp(rng.uniform(log_lo, log_hi, size=(length, count)))
        if not mean_ordering_check(batch, _ORDER_GRID, slack=1e-9):
            bad += 1
    return _result(
        "means",
        "exponent ordering on 10^4 random positive vectors",
        bad == 0,
        f"ordering violated for {bad} vector lengths",
    )


def _check_geometric_limit() -> CheckResult:
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(10):
        length = int(rng.integers(2, 9))
        batch = rng.uniform(0.1, 10.0, size=(length, 100))
        near = np.asarray(power_mean(Alpha(1e-9), batch))
        geo = np.exp(np.mean(np.log(batch), axis=0))
        worst = max(worst, float(np.max(np.abs(near - geo) / geo)))
    return _result(
        "means",
        "exponent->0 converges to the geometric mean (rel 1e-5)",
        worst < 1e-5,
        f"worst relative deviation {worst:.3e}",
    )


def _check_additive_arithmetic() -> CheckResult:
    rng = np.random.default_rng(13)
    batch = rng.uniform(-50.0, 50.0, size=(6, 1000))
    got = np.asarray(additive_mean(Alpha(0.0), batch))
    worst = float(np.max(np.abs(got - batch.mean(axis=0))))
    return _result(
        "means",
        "exponent 0 additive mean equals the arithmetic mean (1e-12)",
        worst < 1e-12,
        f"worst deviation {worst:.3e}",
    )


def _check_additive_extreme_exponents() -> CheckResult:
    # deliberately strict: the defining formula puts these means at
    # ln(n)/40 from the extremes, far outside 1e-6 (see module docstring)
    rng = np.random.default_rng(14)
    worst = 0.0
    for _ in range(200):
        length = int(rng.integers(2, 9))
        xs = rng.uniform(-5.0, 5.0, size=length)
        if xs.max() - xs.min() < 1.0:  # the limit claim presumes a clear gap
            xs[np.argmax(xs)] = xs.min() + 1.5
        low = additive_mean(Alpha(-40.0), xs)
        high = additive_mean(Alpha(40.0), xs)
        worst = max(worst, abs(low - xs.min()), abs(high - xs.max()))
    return _result(
        "means",
        "exponent +/-40 additive means within 1e-6 of max/min",
        worst < 1e-6,
        f"worst deviation {worst:.6f} (= ln(n)/40 scale, inherent to the formula)",
    )


def _check_additive_shift() -> CheckResult:
    rng = np.random.default_rng(15)
    exponents = [Alpha.NEG_INF, Alpha(-40.0), Alpha(-2.0), Alpha(-0.5),
                 Alpha(0.0), Alpha(0.5), Alpha(2.0), Alpha(40.0), Alpha.POS_INF]
    worst = 0.0
    for _ in range(200):
        length = int(rng.integers(2, 9))
        xs = rng.uniform(-500.0, 500.0, size=length)
        for alpha in exponents:
            base = additive_mean(alpha, xs)
            for shift in (-100.0, -1.0, 0.5, 100.0):
                moved = additive_mean(alpha, xs + shift)
                if not (math.isfinite(base) and math.isfinite(moved)):
                    return _result(
                        "means", "shift equivariance without overflow", False,
                        f"non-finite mean at exponent {alpha}",
                    )
                worst = max(worst, abs(moved - (base + shift)))
    return _result(
        "means",
        "shift equivariance at magnitude 500 without overflow (1e-9)",
        worst < 1e-9,
        f"worst deviation {worst:.3e}",
    )


# ------------------------------------------------------------- circuits

def _check_networks_sort() -> CheckResult:
    failures = [n for n in range(1, 17) if not verify_sorts(batcher_bitonic(n))]
    opt = optimal_network_8()
    if not verify_sorts(opt):
        failures.append(8)
    depth_ok = opt.depth == 6
    return _result(
        "circuits",
        "bitonic networks sort for all widths 1..16; depth-6 width-8 network sorts",
        not failures and depth_ok,
        f"failing widths {failures}, depth-6 ok: {depth_ok}",
    )


def _check_quantiles() -> CheckResult:
    for n in range(2, 7):
        net = batcher_bitonic(n)
        frames = np.array(list(permutations(range(1, n + 1))), dtype=float)
        for k in range(1, n + 1):
            got = np.asarray(evaluate(quantile_circuit(n, k, net), frames))
            want = np.sort(frames, axis=1)[:, k - 1]
            if not np.array_equal(got, want):
                return _result(
                    "circuits", "order statistics", False,
                    f"rank {k} of {n} wrong on permutations",
                )
    rng = np.random.default_rng(21)
    frames = rng.normal(0.0, 10.0, size=(10_000, 8))
    want = np.sort(frames, axis=1)
    for source in (batcher_bitonic(8), optimal_network_8()):
        for k in (1, 3, 4, 8):
            circuit = quantile_circuit(8, k, source)
            got = np.asarray(evaluate(circuit, frames))
            if not np.array_equal(got, want[:, k - 1]):
                return _result(
                    "circuits", "order statistics", False,
                    f"rank {k} of 8 wrong on random frames",
                )
            if not np.all((frames == got[:, None]).any(axis=1)):
                return _result(
                    "circuits", "order statistics", False,
                    f"rank {k} of 8 produced a value not present in its frame",
                )
            if depth(circuit) > source.depth:
                return _result(
                    "circuits", "order statistics", False,
                    f"rank {k} circuit deeper than its source network",
                )
    return _result(
        "circuits",
        "order-statistic circuits exact on exhaustive (n<=6) and 10^4 random frames",
        True,
    )


def _check_second_largest() -> CheckResult:
    for n in range(2, 7):
        frames = np.array(list(permutations(range(1, n + 1))), dtype=float)
        want = np.sort(frames, axis=1)[:, -2]
        for variant in ("min_of_maxes", "max_of_mins"):
            got = np.asarray(evaluate(second_largest_depth2(n, variant), frames))
            if not np.array_equal(got, want):
                return _result(
                    "circuits", "second largest", False,
                    f"{variant} wrong at width {n}",
                )
    rng = np.random.default_rng(22)
    for n in range(2, 13):
        frames = rng.normal(0.0, 5.0, size=(10_000, n))
        want = np.sort(frames, axis=1)[:, -2]
        for variant in ("min_of_maxes", "max_of_mins"):
            expr = second_largest_depth2(n, variant)
            got = np.asarray(evaluate(expr, frames))
            if not np.array_equal(got, want):
                return _result(
                    "circuits", "second largest", False,
                    f"{variant} wrong at width {n} on random frames",
                )
            if n >= 3 and depth(expr) != 2:
                return _result(
                    "circuits", "second largest", False,
                    f"{variant} at width {n} has depth {depth(expr)}",
                )
    return _result(
        "circuits",
        "depth-2 second-largest exact for widths up to 12 on 10^4 random frames",
        True,
    )


# -------------------------------------------------------------- rewrite

def _check_negation_elimination() -> CheckResult:
    rng = np.random.default_rng(31)
    for trial in range(10_000):
        width = int(rng.integers(1, 7))
        tree = rewrite.random_nexpr(width, 50, rng)
        flat = rewrite.eliminate_negation(tree)
        if rewrite.negation_count(flat) != 0:
            return _result("rewrite", "negation-free", False,
                           f"trial {trial}: negations survive")
        if rewrite.size(flat) > rewrite.size(tree):
            return _result("rewrite", "negation-free", False,
                           f"trial {trial}: rewrite grew the tree")
        frames = rng.uniform(0.0, 1.0, size=(4, width))
        before = np.asarray(rewrite.evaluate_nexpr(tree, frames))
        after = np.asarray(rewrite.evaluate_nexpr(flat, frames))
        if not np.allclose(before, after, rtol=0.0, atol=1e-12):
            return _result("rewrite", "negation-free", False,
                           f"trial {trial}: value changed")
    return _result(
        "rewrite",
        "negation elimination exact and non-growing on 10^4 random trees",
        True,
    )


# ----------------------------------------------------------- classifiers

def _check_classifier_semantics() -> CheckResult:
    rng = np.random.default_rng(41)
    palette = (Alpha.NEG_INF, Alpha(-1.0), Alpha(0.0), Alpha(1.0), Alpha.POS_INF)
    for trial in range(300):
        width = int(rng.integers(2, 7))
        expr = random_expr(width, 4, palette, rng, max_size=32)
        frames = rng.normal(0.0, 2.0, size=(64, width))
        z = Classifier(ClassifierKind.Z, expr)
        b = Classifier(ClassifierKind.B, expr, 0.0)
        values = np.asarray(evaluate(expr, frames))
        if not np.array_equal(
            _verdict_codes(z.kind, values, z.cut),
            _verdict_codes(b.kind, values, b.cut),
        ):
            return _result("classifiers", "Z equals B at cut 0", False,
                           f"trial {trial}: verdicts differ")
        a = Classifier(ClassifierKind.A, expr, 0.5)
        codes = _verdict_codes(a.kind, values, a.cut)
        if np.any(codes[values >= 0.5] != 0) or np.any(codes[values < 0.5] != 1):
            return _result("classifiers", "one-sided abstention", False,
                           f"trial {trial}: A verdicts wrong")
    try:
        Classifier(ClassifierKind.A_PLUS, Input(0), 0.25)
        return _result("classifiers", "A+ threshold validation", False,
                       "positive threshold accepted")
    except ValueError:
        pass
    rng2 = np.random.default_rng(42)
    checked = 0
    for trial in range(150):
        width = int(rng2.integers(2, 7))
        left = random_expr(width, 3, palette, rng2, max_size=15,
                           include_zero=False, include_diff=False)
        right = random_expr(width, 3, palette, rng2, max_size=15,
                            include_zero=False, include_diff=False)
        invariant = Classifier(ClassifierKind.Z, Diff(left, right))
        frames = rng2.normal(0.0, 3.0, size=(32, width))
        # verdict invariance is a statement away from the decision
        # boundary; a value within rounding distance of the cut flips on
        # any re-rounding, so boundary-sitting draws are not evidence
        values = np.asarray(evaluate(invariant.expr, frames))
        if np.min(np.abs(values)) < 1e-9:
            continue
        checked += 1
        if not volume_invariance_test(invariant, frames, [-100.0, -7.5, 7.5, 100.0]):
            return _result("classifiers", "shift invariance", False,
                           f"trial {trial}: shift changed a verdict")
    if checked < 50:
        return _result("classifiers", "shift invariance", False,
                       f"only {checked} usable trials")
    return _result(
        "classifiers",
        "threshold semantics, A+ validation, and shift-invariant verdicts",
        True,
    )


SUITES: dict[str, tuple[Callable[[], CheckResult], ...]] = {
    "means": (
        _check_mean_ordering,
        _check_geometric_limit,
        _check_additive_arithmetic,
        _check_additive_extreme_exponents,
        _check_additive_shift,
    ),
    "circuits": (
        _check_networks_sort,
        _check_quantiles,
        _check_second_largest,
    ),
    "rewrite": (_check_negation_elimination,),
    "classifiers": (_check_classifier_semantics,),
}


def run_suite(name: str) -> list[CheckResult]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return [check() for check in SUITES[name]]


def run_all() -> list[CheckResult]:
    out: list[CheckResult] = []
    for name in SUITES:
        out.extend(run_suite(name))
    return out

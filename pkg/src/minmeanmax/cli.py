"""Command-line interface.

Subcommands::

    eval            evaluate an expression file over CSV frames
    synth-quantile  emit an order-statistic min/max circuit
    verify-network  check that a comparator network sorts
    train           run the evolutionary search on a labeled dataset
    classify        apply a stored classifier to a labeled dataset
    gen-data        generate a synthetic two-class dataset
    check           run the built-in self-check suites

Exit codes: 0 success, 1 a check or verification failed, 2 a file or
argument failed to parse, 3 the data did not fit (width mismatch, bad
labels, and similar).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from .checks import SUITES, run_all, run_suite
from .circuits import (
    batcher_bitonic,
    optimal_network_8,
    parse_network,
    quantile_circuit,
    verify_sorts,
)
from .classifiers import (
    Verdict,
    _verdict_codes,
    evaluate_on_dataset,
    format_classifier,
    load_classifier,
    load_dataset_csv,
    save_dataset_csv,
)
from .expr import depth, evaluate, size
from .search import SearchConfig, evolve, generate_synthetic, parse_config
from .sexpr import ParseError, format_expr, parse_expr

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_DATA_ERROR = 3


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _read_frames_csv(path: str) -> np.ndarray:
    """Unlabeled frames: one comma-separated row of channel values per line."""
    rows: list[list[float]] = []
    for line_no, raw in enumerate(_read_text(path).splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            rows.append([float(cell) for cell in line.split(",")])
        except ValueError:
            raise ParseError(f"malformed number in frame row", line_no, 1) from None
    if not rows:
        raise ParseError("no frames in input", 1, 1)
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ValueError("frame rows have inconsistent widths")
    return np.array(rows, dtype=float)


def cmd_eval(args: argparse.Namespace) -> int:
    expr = parse_expr(_read_text(args.expr))
    frames = _read_frames_csv(args.frames)
    values = np.atleast_1d(np.asarray(evaluate(expr, frames)))
    for value in values:
        print(f"{value:.12g}")
    return EXIT_OK


def cmd_synth_quantile(args: argparse.Namespace) -> int:
    try:
        if args.source == "opt8":
            if args.n != 8:
                raise ValueError("source opt8 requires n = 8")
            network = optimal_network_8()
        else:
            network = batcher_bitonic(args.n)
        circuit = quantile_circuit(args.n, args.k, network)
    except ValueError as exc:
        return _fail(EXIT_PARSE_ERROR, str(exc))
    print(format_expr(circuit))
    print(f"size: {size(circuit)}, depth: {depth(circuit)}", file=sys.stderr)
    return EXIT_OK


def cmd_verify_network(args: argparse.Namespace) -> int:
    try:
        network = parse_network(_read_text(args.network))
    except ValueError as exc:
        return _fail(EXIT_PARSE_ERROR, str(exc))
    sorts = verify_sorts(network)
    print(
        f"sorts: {'yes' if sorts else 'no'}, depth: {network.depth}, "
        f"comparators: {network.comparator_count}"
    )
    return EXIT_OK if sorts else EXIT_CHECK_FAILED


def _print_metrics(metrics, stream) -> None:
    accuracy = "n/a" if metrics.accuracy is None else repr(metrics.accuracy)
    print(f"accuracy: {accuracy}", file=stream)
    print(f"coverage: {metrics.coverage!r}", file=stream)
    print(f"decided: {metrics.decided}/{metrics.total}", file=stream)
    for verdict in (Verdict.CLASS1, Verdict.CLASS2, Verdict.ABSTAIN):
        row = " ".join(str(metrics.confusion[(verdict, label)]) for label in (1, 2))
        print(f"confusion {verdict.value}: {row}", file=stream)


def cmd_train(args: argparse.Namespace) -> int:
    try:
        config = SearchConfig()
        if args.config is not None:
            config = parse_config(_read_text(args.config))
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        dataset = load_dataset_csv(args.dataset)
    except FileNotFoundError as exc:
        return _fail(EXIT_DATA_ERROR, f"missing file: {exc.filename}")
    except ValueError as exc:
        return _fail(EXIT_PARSE_ERROR, str(exc))
    result = evolve(dataset, config)
    text = format_classifier(result.best)
    if args.out is None:
        print(text, end="")
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(f"fitness: {result.best_fitness!r}", file=sys.stderr)
    print(f"evaluations: {result.evaluations}", file=sys.stderr)
    _print_metrics(evaluate_on_dataset(result.best, dataset), sys.stderr)
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    try:
        classifier = load_classifier(args.classifier)
        dataset = load_dataset_csv(args.dataset)
    except FileNotFoundError as exc:
        return _fail(EXIT_DATA_ERROR, f"missing file: {exc.filename}")
    except ValueError as exc:
        return _fail(EXIT_PARSE_ERROR, str(exc))
    metrics = evaluate_on_dataset(classifier, dataset)
    values = np.asarray(evaluate(classifier.expr, dataset.frames))
    codes = _verdict_codes(classifier.kind, values, classifier.cut)
    names = {0: "abstain", 1: "1", 2: "2"}
    for code in codes:
        print(names[int(code)])
    _print_metrics(metrics, sys.stdout)
    return EXIT_OK


def cmd_gen_data(args: argparse.Namespace) -> int:
    dataset = generate_synthetic(
        width=args.width,
        frames_per_class=args.per_class,
        noise_sigma=args.sigma,
        shift_range=(args.shift_low, args.shift_high),
        seed=args.seed,
    )
    save_dataset_csv(dataset, args.out)
    print(f"wrote {len(dataset)} frames of width {dataset.width} to {args.out}")
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    names = args.suites or ["all"]
    known = set(SUITES) | {"all"}
    for name in names:
        if name not in known:
            return _fail(
                EXIT_PARSE_ERROR,
                f"unknown suite {name!r} (choose from {', '.join(sorted(known))})",
            )
    results = []
    for name in names:
        results.extend(run_all() if name == "all" else run_suite(name))
    failed = 0
    for res in results:
        if res.passed:
            print(f"ok   [{res.suite}] {res.name}")
        else:
            failed += 1
            print(f"FAIL [{res.suite}] {res.name}: {res.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minmeanmax",
        description="min/mean/max expression circuits and classifier search",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an expression over CSV frames")
    p.add_argument("expr", help="file holding one expression")
    p.add_argument("frames", help="CSV of frames, one row of channel values per line")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth-quantile", help="emit a k-th smallest circuit")
    p.add_argument("n", type=int, help="number of channels")
    p.add_argument("k", type=int, help="rank, 1-based (1 = minimum)")
    p.add_argument(
        "--source",
        choices=("bitonic", "opt8"),
        default="bitonic",
        help="sorting network to specialize (opt8 needs n = 8)",
    )
    p.set_defaults(func=cmd_synth_quantile)

    p = sub.add_parser("verify-network", help="check that a network file sorts")
    p.add_argument("network", help="network description file")
    p.set_defaults(func=cmd_verify_network)

    p = sub.add_parser("train", help="evolve a classifier on a labeled dataset")
    p.add_argument("dataset", help="labeled CSV dataset")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--out", help="write the classifier here instead of stdout")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="apply a stored classifier to a dataset")
    p.add_argument("classifier", help="classifier file from 'train'")
    p.add_argument("dataset", help="labeled CSV dataset")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gen-data", help="generate a synthetic two-class dataset")
    p.add_argument("out", help="output CSV path")
    p.add_argument("--width", type=int, default=8)
    p.add_argument("--per-class", type=int, default=500)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--shift-low", type=float, default=0.0)
    p.add_argument("--shift-high", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("check", help="run built-in self-check suites")
    p.add_argument(
        "suites",
        nargs="*",
        metavar="SUITE",
        help=f"suites to run: {', '.join(SUITES)}, or all (default)",
    )
    p.set_defaults(func=cmd_check)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches the parse-error code
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        return _fail(EXIT_PARSE_ERROR, f"parse: {exc}")
    except FileNotFoundError as exc:
        return _fail(EXIT_DATA_ERROR, f"missing file: {exc.filename}")
    except (ValueError, OSError) as exc:
        return _fail(EXIT_DATA_ERROR, str(exc))


if __name__ == "__main__":
    sys.exit(main())

"""Threshold classifiers over expression values, plus datasets and metrics.

A classifier pairs an expression with a decision rule on its value.
Four rules exist: ``Z`` splits on the sign of the value, ``B`` splits on
a stored threshold, ``A`` and ``A_PLUS`` are one-sided rules that answer
class 1 below the threshold and abstain otherwise (``A_PLUS``
additionally requires a non-positive threshold, so with shift-invariant
expressions of non-positive range it can only ever confirm).  An exact
tie with the threshold is an abstention for every kind.

Datasets are labeled frame matrices with labels in {1, 2}, stored
read-only; metrics report accuracy over decided frames, coverage, and a
full confusion table including the abstain row.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .expr import Expr, evaluate
from .sexpr import format_expr, parse_expr

__all__ = [
    "Verdict",
    "ClassifierKind",
    "Classifier",
    "classify",
    "classify_batch",
    "decision_value",
    "Dataset",
    "DatasetMetrics",
    "evaluate_on_dataset",
    "volume_invariance_test",
    "format_classifier",
    "parse_classifier",
    "load_classifier",
    "save_classifier",
    "load_dataset_csv",
    "save_dataset_csv",
]


class Verdict(Enum):
    CLASS1 = "class1"
    CLASS2 = "class2"
    ABSTAIN = "abstain"


class ClassifierKind(Enum):
    Z = "Z"
    B = "B"
    A = "A"
    A_PLUS = "A+"


@dataclass(frozen=True)
class Classifier:
    """Decision rule over an expression value.

    ``Z`` uses no threshold (the implicit cut is 0); the other kinds
    require a finite one, and ``A_PLUS`` rejects thresholds above 0 at
    construction time.
    """

    kind: ClassifierKind
    expr: Expr
    threshold: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind is ClassifierKind.Z:
            if self.threshold is not None:
                raise ValueError("kind Z takes no threshold")
            return
        if self.threshold is None:
            raise ValueError(f"kind {self.kind.value} requires a threshold")
        c = float(self.threshold)
        if not math.isfinite(c):
            raise ValueError("threshold must be finite")
        if self.kind is ClassifierKind.A_PLUS and c > 0.0:
            raise ValueError("kind A+ requires a threshold <= 0")
        object.__setattr__(self, "threshold", c)

    @property
    def cut(self) -> float:
        """Effective decision threshold (0 for kind Z)."""
        return 0.0 if self.kind is ClassifierKind.Z else float(self.threshold)


def decision_value(classifier: Classifier, frame) -> float | np.ndarray:
    """Raw expression value the rule is applied to."""
    return evaluate(classifier.expr, frame)


def _verdict_codes(kind: ClassifierKind, values: np.ndarray, cut: float) -> np.ndarray:
    """Vector of verdicts as int8: 1, 2, or 0 for abstain."""
    values = np.asarray(values)
    codes = np.zeros(values.shape, dtype=np.int8)
    codes[values < cut] = 1
    if kind in (ClassifierKind.Z, ClassifierKind.B):
        codes[values > cut] = 2
    return codes


_CODE_TO_VERDICT = {0: Verdict.ABSTAIN, 1: Verdict.CLASS1, 2: Verdict.CLASS2}


def classify(classifier: Classifier, frame) -> Verdict:
    """Verdict for one frame."""
    arr = np.asarray(frame, dtype=float)
    if arr.ndim != 1:
        raise ValueError("classify takes a single frame; use classify_batch for matrices")
    value = evaluate(classifier.expr, arr)
    codes = _verdict_codes(classifier.kind, np.atleast_1d(value), classifier.cut)
    return _CODE_TO_VERDICT[int(codes[0])]


def classify_batch(classifier: Classifier, frames) -> list[Verdict]:
    """Verdicts for an ``(n, w)`` batch of frames."""
    values = np.asarray(evaluate(classifier.expr, frames))
    codes = _verdict_codes(classifier.kind, values, classifier.cut)
    return [_CODE_TO_VERDICT[int(c)] for c in np.atleast_1d(codes)]


@dataclass(frozen=True)
class Dataset:
    """Labeled frames: ``frames`` is ``(n, w)`` float, ``labels`` n ints in {1, 2}."""

    frames: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        frames = np.array(self.frames, dtype=float)
        labels = np.array(self.labels, dtype=np.int64)
        if frames.ndim != 2:
            raise ValueError("frames must be an (n, w) matrix")
        if labels.shape != (frames.shape[0],):
            raise ValueError("need exactly one label per frame")
        if not np.all(np.isfinite(frames)):
            raise ValueError("frames must be finite")
        if labels.size and not np.all((labels == 1) | (labels == 2)):
            raise ValueError("labels must be 1 or 2")
        frames.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "labels", labels)

    @property
    def width(self) -> int:
        return self.frames.shape[1]

    def __len__(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class DatasetMetrics:
    """Accuracy over decided frames, coverage, and the full confusion table.

    ``accuracy`` is None when every frame was an abstention.  The
    confusion table maps ``(verdict, true_label)`` to a count and always
    contains all six cells, abstentions included.
    """

    total: int
    decided: int
    coverage: float
    accuracy: Optional[float]
    confusion: dict[tuple[Verdict, int], int]


def evaluate_on_dataset(classifier: Classifier, dataset: Dataset) -> DatasetMetrics:
    """Score a classifier against labeled frames."""
    if len(dataset) == 0:
        raise ValueError("cannot score on an empty dataset")
    values = np.asarray(evaluate(classifier.expr, dataset.frames))
    codes = _verdict_codes(classifier.kind, values, classifier.cut)
    labels = dataset.labels
    confusion = {
        (verdict, label): int(np.count_nonzero((codes == code) & (labels == label)))
        for code, verdict in _CODE_TO_VERDICT.items()
        for label in (1, 2)
    }
    total = len(dataset)
    decided = int(np.count_nonzero(codes != 0))
    correct = confusion[(Verdict.CLASS1, 1)] + confusion[(Verdict.CLASS2, 2)]
    return DatasetMetrics(
        total=total,
        decided=decided,
        coverage=decided / total,
        accuracy=(correct / decided) if decided else None,
        confusion=confusion,
    )


def volume_invariance_test(
    classifier: Classifier, frames, shifts: Sequence[float]
) -> bool:
    """True iff every verdict survives adding each constant to all channels."""
    arr = np.asarray(frames, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    values = np.asarray(evaluate(classifier.expr, arr))
    base = _verdict_codes(classifier.kind, values, classifier.cut)
    for shift in shifts:
        shifted = np.asarray(evaluate(classifier.expr, arr + float(shift)))
        if not np.array_equal(
            _verdict_codes(classifier.kind, shifted, classifier.cut), base
        ):
            return False
    return True


_KIND_BY_NAME = {k.value: k for k in ClassifierKind}


def format_classifier(classifier: Classifier) -> str:
    """Three-line text form: kind, threshold (dropped for Z), expression."""
    lines = [classifier.kind.value]
    if classifier.kind is not ClassifierKind.Z:
        lines.append(repr(classifier.threshold))
    lines.append(format_expr(classifier.expr))
    return "\n".join(lines) + "\n"


def parse_classifier(text: str) -> Classifier:
    """Inverse of :func:`format_classifier`."""
    lines = [line for line in (raw.strip() for raw in text.splitlines()) if line]
    if not lines:
        raise ValueError("empty classifier description")
    kind = _KIND_BY_NAME.get(lines[0])
    if kind is None:
        raise ValueError(f"unknown classifier kind {lines[0]!r}")
    if kind is ClassifierKind.Z:
        if len(lines) != 2:
            raise ValueError("kind Z expects exactly a kind line and an expression line")
        return Classifier(kind, parse_expr(lines[1]))
    if len(lines) != 3:
        raise ValueError(
            f"kind {kind.value} expects kind, threshold and expression lines"
        )
    try:
        threshold = float(lines[1])
    except ValueError:
        raise ValueError(f"malformed threshold {lines[1]!r}") from None
    return Classifier(kind, parse_expr(lines[2]), threshold)


def save_classifier(classifier: Classifier, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_classifier(classifier))


def load_classifier(path) -> Classifier:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_classifier(fh.read())


def save_dataset_csv(dataset: Dataset, path) -> None:
    """Write ``label,ch0,...,ch<w-1>`` rows under the canonical header."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _write_dataset(dataset, fh)


def _write_dataset(dataset: Dataset, fh: io.TextIOBase) -> None:
    header = "label," + ",".join(f"ch{i}" for i in range(dataset.width))
    fh.write(header + "\n")
    for label, row in zip(dataset.labels, dataset.frames):
        fh.write(str(int(label)) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def load_dataset_csv(path) -> Dataset:
    """Read a dataset written by :func:`save_dataset_csv`.

    The header is validated against the ``label,ch0,...`` pattern and
    every row must carry the same width; labels must be 1 or 2.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise ValueError("empty dataset file")
    header = lines[0].split(",")
    if header[0] != "label" or len(header) < 2:
        raise ValueError(f"malformed dataset header {lines[0]!r}")
    width = len(header) - 1
    if header[1:] != [f"ch{i}" for i in range(width)]:
        raise ValueError(f"malformed dataset header {lines[0]!r}")
    labels: list[int] = []
    rows: list[list[float]] = []
    for line_no, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != width + 1:
            raise ValueError(
                f"line {line_no}: expected {width + 1} fields, got {len(cells)}"
            )
        if cells[0] not in ("1", "2"):
            raise ValueError(f"line {line_no}: label must be 1 or 2, got {cells[0]!r}")
        labels.append(int(cells[0]))
        try:
            rows.append([float(cell) for cell in cells[1:]])
        except ValueError:
            raise ValueError(f"line {line_no}: malformed channel value") from None
    if not rows:
        raise ValueError("dataset has a header but no rows")
    return Dataset(np.array(rows, dtype=float), np.array(labels, dtype=np.int64))

"""Exponent-indexed means over positive and real-valued samples.

Two families live here.  ``power_mean`` is the classical family on
positive data: exponent -inf selects the minimum, +inf the maximum,
0 the geometric mean, 1 the arithmetic mean, and so on.  ``additive_mean``
is its log-domain counterpart on unrestricted real data: it commutes with
adding a constant to every entry the way the power mean commutes with
scaling.  Both are monotone in the exponent, which ``mean_ordering_check``
verifies on concrete data.

Exponents are carried by :class:`Alpha`, a small tagged wrapper so that
the infinite cases dispatch exactly instead of relying on float limits.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import ClassVar, Iterable, Sequence, Union

import numpy as np

__all__ = [
    "Alpha",
    "power_mean",
    "additive_mean",
    "mean_ordering_check",
]

_ALPHA_DECIMAL_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\Z")


@dataclass(frozen=True)
class Alpha:
    """Extended-real exponent selecting a member of the mean family.

    ``Alpha(-math.inf)`` and ``Alpha(math.inf)`` are exact tags for the
    min and max ends of the family, not numerical approximations; code
    dispatching on them never raises an infinity to a power.  NaN is
    rejected and negative zero is normalized so every exponent has one
    canonical text form.
    """

    value: float

    NEG_INF: ClassVar["Alpha"]
    POS_INF: ClassVar["Alpha"]

    def __post_init__(self) -> None:
        v = float(self.value)
        if math.isnan(v):
            raise ValueError("mean exponent must not be NaN")
        if v == 0.0:
            v = 0.0  # collapse -0.0
        object.__setattr__(self, "value", v)

    @property
    def is_neg_inf(self) -> bool:
        return self.value == -math.inf

    @property
    def is_pos_inf(self) -> bool:
        return self.value == math.inf

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    @classmethod
    def from_literal(cls, text: str) -> "Alpha":
        """Parse an exponent literal: ``-inf``, ``inf``, or a decimal.

        Decimals may carry a sign, a fractional part, and an exponent
        part (``-2``, ``0.5``, ``1e-3``).  Anything else, including
        ``nan`` and spelled-out infinities, is rejected.
        """
        if text == "-inf":
            return cls.NEG_INF
        if text == "inf":
            return cls.POS_INF
        if _ALPHA_DECIMAL_RE.match(text):
            return cls(float(text))
        raise ValueError(f"malformed exponent literal: {text!r}")

    def literal(self) -> str:
        """Canonical text form; ``from_literal`` inverts it exactly."""
        if self.is_neg_inf:
            return "-inf"
        if self.is_pos_inf:
            return "inf"
        v = self.value
        if v == int(v) and abs(v) < 1e16:
            return str(int(v))
        return repr(v)

    def __str__(self) -> str:
        return self.literal()


Alpha.NEG_INF = Alpha(-math.inf)
Alpha.POS_INF = Alpha(math.inf)

ArrayLike = Union[Sequence[float], np.ndarray, Iterable[float]]


def _as_samples(xs: ArrayLike) -> np.ndarray:
    arr = np.asarray(xs, dtype=float)
    if arr.ndim not in (1, 2):
        raise ValueError("samples must be a vector or a (k, m) batch")
    if arr.shape[0] == 0:
        raise ValueError("mean of an empty collection is undefined")
    return arr


def power_mean(alpha: Alpha, xs: ArrayLike) -> float | np.ndarray:
    """Power mean of ``xs`` with exponent ``alpha``.

    A 1-D input is reduced to a float; a ``(k, m)`` array is reduced
    along axis 0 to one mean per column.  Entries must be strictly
    positive when the exponent is finite and <= 0, non-negative
    otherwise.

    Finite nonzero exponents rescale by the dominant entry of each
    column (the max for positive exponents, the min for negative ones)
    before exponentiating, so the dominant term is computed exactly and
    the rest can only underflow harmlessly; no overflow is possible for
    any positive float inputs.
    """
    arr = _as_samples(xs)
    a = alpha.value
    if alpha.is_finite and a <= 0.0:
        if not np.all(arr > 0.0):
            raise ValueError("entries must be strictly positive for exponent <= 0")
    elif not np.all(arr >= 0.0):
        raise ValueError("entries must be non-negative")

    if alpha.is_neg_inf:
        out = arr.min(axis=0)
    elif alpha.is_pos_inf:
        out = arr.max(axis=0)
    elif a == 0.0:
        out = np.exp(np.mean(np.log(arr), axis=0))
    else:
        pivot = arr.max(axis=0) if a > 0.0 else arr.min(axis=0)
        safe = np.where(pivot == 0.0, 1.0, pivot)
        with np.errstate(over="ignore", under="ignore"):
            # ratios land in (0, 1] for a > 0 and [1, inf) for a < 0;
            # either way ratio**a <= 1, and an overflowing ratio maps to
            # inf**a == 0.0 exactly as its true negligible contribution
            out = safe * np.mean((arr / safe) ** a, axis=0) ** (1.0 / a)
        out = np.where(pivot == 0.0, 0.0, out)
    return float(out) if arr.ndim == 1 else np.asarray(out)


def additive_mean(alpha: Alpha, xs: ArrayLike) -> float | np.ndarray:
    """Shift-equivariant mean of real entries with exponent ``alpha``.

    Defined for finite exponents ``a != 0`` as ``log`` of the power mean
    of ``exp(xs)``, computed stably as a shifted log-sum-exp; exponent 0
    is the arithmetic mean and the infinite tags are exact min/max.
    Adding a constant to every entry adds the same constant to the
    result, for any exponent.

    Entries must be finite.  Reduction behaves as in :func:`power_mean`:
    1-D input to a float, ``(k, m)`` input to per-column means.
    """
    arr = _as_samples(xs)
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite")
    a = alpha.value
    if alpha.is_neg_inf:
        out = arr.min(axis=0)
    elif alpha.is_pos_inf:
        out = arr.max(axis=0)
    elif a == 0.0:
        out = arr.mean(axis=0)
    else:
        z = a * arr
        peak = z.max(axis=0)
        with np.errstate(under="ignore"):
            out = (peak + np.log(np.mean(np.exp(z - peak), axis=0))) / a
    return float(out) if arr.ndim == 1 else np.asarray(out)


def mean_ordering_check(
    xs: ArrayLike,
    alpha_grid: Sequence[Alpha | float],
    slack: float = 1e-9,
) -> bool:
    """True iff the power means of ``xs`` are non-decreasing along the grid.

    ``alpha_grid`` must be ascending (plain floats are accepted and
    wrapped); each consecutive pair of means may dip by at most ``slack``
    to absorb rounding.  Batched input checks every column.
    """
    grid = [g if isinstance(g, Alpha) else Alpha(float(g)) for g in alpha_grid]
    if len(grid) < 2:
        raise ValueError("exponent grid needs at least two points")
    for lo, hi in zip(grid, grid[1:]):
        if not lo.value < hi.value:
            raise ValueError("exponent grid must be strictly ascending")
    vals = [np.asarray(power_mean(g, xs)) for g in grid]
    return all(bool(np.all(hi - lo >= -slack)) for lo, hi in zip(vals, vals[1:]))

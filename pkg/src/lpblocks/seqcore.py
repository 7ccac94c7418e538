"""Sequence-space primitives: p-moduli, truncation, shifts, order statistics.

A series is represented as a 1-d float64 numpy array; ``as_series`` is the
single validation point (finite entries, length >= 1). The exponent p lives
in (0, inf] and is carried by :class:`PExponent`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PExponent",
    "INF",
    "as_p",
    "as_series",
    "Window",
    "p_modulus",
    "truncate_below",
    "truncate_above",
    "backshift",
    "shift_min_distance",
    "order_statistics_desc",
    "kth_order_stat",
    "row_p_moduli",
]


@dataclass(frozen=True, order=True)
class PExponent:
    """Norm exponent p in (0, inf]; math.inf encodes the sup-norm case."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v <= 0:
            raise ValueError(f"p must lie in (0, inf], got {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.value)

    def __str__(self) -> str:
        if self.is_inf:
            return "inf"
        if self.value == int(self.value):
            return str(int(self.value))
        return repr(self.value)


INF = PExponent(math.inf)


def as_p(p) -> PExponent:
    """Coerce a float, int, numeric string, or 'inf' into a PExponent."""
    if isinstance(p, PExponent):
        return p
    if isinstance(p, str):
        s = p.strip().lower()
        return INF if s in ("inf", "infinity") else PExponent(float(s))
    return PExponent(float(p))


def as_series(values) -> np.ndarray:
    """Validate and return observations as a 1-d float64 array.

    Rejects empty input and any non-finite entry.
    """
    xs = np.asarray(values, dtype=np.float64)
    if xs.ndim != 1:
        xs = xs.reshape(-1)
    if xs.size == 0:
        raise ValueError("series must contain at least one observation")
    if not np.all(np.isfinite(xs)):
        raise ValueError("series entries must be finite (no NaN/inf)")
    return xs


@dataclass(frozen=True)
class Window:
    """Contiguous view X_[start, start+length) into a series."""

    series: np.ndarray
    start: int
    length: int

    def __post_init__(self):
        n = len(self.series)
        if self.start < 0 or self.length < 1 or self.start + self.length > n:
            raise ValueError(
                f"window [{self.start}, {self.start + self.length}) "
                f"out of range for series of length {n}"
            )

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.series)[self.start : self.start + self.length]


def _values_of(xs) -> np.ndarray:
    if isinstance(xs, Window):
        return as_series(xs.values)
    return as_series(xs)


def p_modulus(xs, p) -> float:
    """p-modulus (sum_t |x_t|^p)^(1/p); max_t |x_t| for p = inf.

    The power-mean form is used for every finite p, including p < 1 where
    the associated metric differs but the modulus does not.
    """
    x = np.abs(_values_of(xs))
    pe = as_p(p)
    if pe.is_inf:
        return float(x.max())
    s = float(x.max())
    if s == 0.0:
        return 0.0
    # rescale by the max so x**p cannot overflow for large values of p
    return float(s * np.sum((x / s) ** pe.value) ** (1.0 / pe.value))


def truncate_below(xs, eps: float) -> np.ndarray:
    """Keep entries with |x_t| > eps (strict), zero elsewhere."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    x = _values_of(xs)
    return np.where(np.abs(x) > eps, x, 0.0)


def truncate_above(xs, eps: float) -> np.ndarray:
    """Keep entries with |x_t| <= eps, zero elsewhere; complement of truncate_below."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    x = _values_of(xs)
    return np.where(np.abs(x) <= eps, x, 0.0)


def backshift(xs, k: int) -> np.ndarray:
    """Shift so output index t holds x_{t-k}; vacated positions are zero."""
    x = _values_of(xs)
    out = np.zeros_like(x)
    if k == 0:
        return x.copy()
    if k > 0:
        if k < len(x):
            out[k:] = x[:-k]
    else:
        if -k < len(x):
            out[:k] = x[-k:]
    return out


def _dist(x: np.ndarray, y: np.ndarray, pe: PExponent) -> float:
    diff = x - y
    if pe.is_inf:
        return float(np.max(np.abs(diff))) if diff.size else 0.0
    m = p_modulus(diff, pe) if diff.size else 0.0
    # metric convention: the p-th power is the metric for p < 1
    return m if pe.value >= 1 else m ** pe.value


def shift_min_distance(xs, ys, p) -> float:
    """Minimum over integer shifts k of d_p(B^k xs, ys).

    d_p is the p-modulus for p >= 1 and its p-th power for p < 1. Shifts
    range over [-(len_x + len_y), len_x + len_y]; beyond that the supports
    no longer overlap and the distance cannot decrease, so the minimum over
    this window is exact for finite-support inputs.
    """
    x = _values_of(xs)
    y = _values_of(ys)
    pe = as_p(p)
    lx, ly = len(x), len(y)
    span = lx + ly
    best = math.inf
    for k in range(-span, span + 1):
        # embed both on a common index window after shifting x by k
        lo = min(k, 0)
        hi = max(lx + k, ly)
        xe = np.zeros(hi - lo)
        ye = np.zeros(hi - lo)
        xe[k - lo : k - lo + lx] = x
        ye[-lo : -lo + ly] = y
        best = min(best, _dist(xe, ye, pe))
    return best


def order_statistics_desc(values) -> np.ndarray:
    """Values sorted in descending order, duplicates kept."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("need at least one value")
    return np.sort(v)[::-1]


def kth_order_stat(values, k: int) -> float:
    """k-th largest value (k = 1 is the maximum); ties are positional."""
    v = np.asarray(values, dtype=np.float64)
    if not 1 <= k <= v.size:
        raise ValueError(f"k={k} out of range for {v.size} values")
    return float(order_statistics_desc(v)[k - 1])


def row_p_moduli(matrix, p) -> np.ndarray:
    """Per-row p-moduli of a 2-d array; vectorized companion of p_modulus.

    Rows are rescaled by their max before powering so large entries do not
    overflow; all-zero rows yield 0. Fast paths cover p in {0.5, 1, 2, inf}.
    """
    a = np.abs(np.asarray(matrix, dtype=np.float64))
    if a.ndim != 2:
        raise ValueError("expected a 2-d array")
    pe = as_p(p)
    rowmax = a.max(axis=1)
    if pe.is_inf:
        return rowmax
    safe = np.where(rowmax > 0, rowmax, 1.0)
    u = a / safe[:, None]
    pv = pe.value
    if pv == 1.0:
        s = u.sum(axis=1)
    elif pv == 2.0:
        s = np.einsum("ij,ij->i", u, u)
    elif pv == 0.5:
        s = np.sqrt(u).sum(axis=1)
    else:
        s = (u ** pv).sum(axis=1)
    return rowmax * s ** (1.0 / pv)

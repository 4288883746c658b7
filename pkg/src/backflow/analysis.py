"""Backflow metrics from probability and current histories.

Backflow windows are where the current at the origin is negative.  The
detector scans a grid for sign changes, sharpens each crossing by
bisection and integrates the negative current over each window with an
adaptive Simpson rule; the two scalar metrics are the largest single
window gain (``beta``) and the supremum of probability recovery over
ordered time pairs (``beta_prime``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ClippedIntervalWarning

__all__ = [
    "TimeSeries",
    "BackflowInterval",
    "negative_part",
    "backflow_intervals",
    "beta",
    "beta_prime",
]

_BISECT_TOL = 1e-10
_QUAD_TOL = 1e-10


@dataclass(frozen=True)
class TimeSeries:
    """Sampled history: strictly increasing times, finite values."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or v.ndim != 1 or t.size != v.size:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if t.size < 2:
            raise ValueError("a time series needs at least two samples")
        if not np.all(np.diff(t) > 0.0):
            raise ValueError("times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ValueError("times and values must be finite")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class BackflowInterval:
    """One window of negative current: endpoints and probability gain."""

    t_start: float
    t_end: float
    gain: float

    def __post_init__(self) -> None:
        if not self.t_start < self.t_end:
            raise ValueError("t_start must be < t_end")
        if self.gain < 0.0:
            raise ValueError("gain must be >= 0")

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


def negative_part(series: TimeSeries) -> TimeSeries:
    """Pointwise 0.5 * (|j| - j): zero where j >= 0, -j where j < 0."""
    return TimeSeries(series.times, 0.5 * (np.abs(series.values) - series.values))


def _adaptive_simpson(
    f: Callable[[float], float], a: float, b: float, abs_tol: float, max_depth: int = 48
) -> float:
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        flm = f(0.5 * (a + m))
        frm = f(0.5 * (m + b))
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + recurse(
            m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
        )

    return recurse(a, b, fa, fm, fb, whole, abs_tol, max_depth)


def _bisect_zero(
    f: Callable[[float], float], lo: float, hi: float, f_lo: float
) -> float:
    # invariant: sign change inside [lo, hi]; f_lo is f(lo)
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_lo < 0.0) != (f_mid < 0.0):
            hi = mid
        else:
            lo = mid
            f_lo = f_mid
    return 0.5 * (lo + hi)


def backflow_intervals(
    j: Callable[[float], float],
    window: tuple[float, float],
    *,
    scan_step: float = 1e-2,
    allow_negative_time: bool = False,
) -> list[BackflowInterval]:
    """Locate all windows of negative current inside ``window``.

    Sign changes are bracketed on a uniform scan grid and refined by
    bisection to 1e-10; each window's gain is the adaptive-quadrature
    integral of -j over it (absolute tolerance 1e-10).  Windows touching
    the boundary are reported but flagged with ClippedIntervalWarning.
    Negative window starts require the explicit opt-in.
    """
    t_lo, t_hi = window
    if not t_lo < t_hi:
        raise ValueError(f"window must satisfy t_lo < t_hi, got {window!r}")
    if t_lo < 0.0 and not allow_negative_time:
        raise ValueError("negative times need allow_negative_time=True")
    if not scan_step > 0.0:
        raise ValueError(f"scan_step must be > 0, got {scan_step!r}")

    n_steps = int(math.floor((t_hi - t_lo) / scan_step + 1e-9))
    grid = t_lo + scan_step * np.arange(n_steps + 1)
    if grid[-1] < t_hi:
        grid = np.append(grid, t_hi)
    values = np.array([j(t) for t in grid])

    intervals: list[BackflowInterval] = []
    open_start: float | None = None
    if values[0] < 0.0:
        open_start = float(grid[0])
        warnings.warn(
            f"current is already negative at the window start t={grid[0]:g}; "
            "the first interval may be clipped",
            ClippedIntervalWarning,
            stacklevel=2,
        )

    def close(t_start: float, t_end: float) -> None:
        gain = _adaptive_simpson(lambda u: -j(u), t_start, t_end, _QUAD_TOL)
        intervals.append(BackflowInterval(t_start, t_end, max(gain, 0.0)))

    for i in range(len(grid) - 1):
        vi, vnext = values[i], values[i + 1]
        if vi == 0.0 or (vi < 0.0) != (vnext < 0.0):
            crossing = (
                float(grid[i])
                if vi == 0.0
                else _bisect_zero(j, float(grid[i]), float(grid[i + 1]), float(vi))
            )
            if vnext < 0.0:
                if open_start is None:
                    open_start = crossing
            elif open_start is not None:
                if crossing > open_start:
                    close(open_start, crossing)
                open_start = None

    if open_start is not None:
        warnings.warn(
            f"current is still negative at the window end t={grid[-1]:g}; "
            "the last interval is clipped",
            ClippedIntervalWarning,
            stacklevel=2,
        )
        if grid[-1] > open_start:
            close(open_start, float(grid[-1]))

    return intervals


def beta(
    j: Callable[[float], float],
    window: tuple[float, float],
    *,
    scan_step: float = 1e-2,
    allow_negative_time: bool = False,
) -> float:
    """Largest single-window backflow gain; 0 when no window exists."""
    intervals = backflow_intervals(
        j, window, scan_step=scan_step, allow_negative_time=allow_negative_time
    )
    return max((iv.gain for iv in intervals), default=0.0)


def beta_prime(series: TimeSeries) -> float:
    """Supremum of P(t2) - P(t1) over ordered pairs t1 < t2 in the series.

    One pass: track the running minimum and the best rise above it.
    Always >= 0; for a monotone decreasing history it is exactly 0.
    """
    values = series.values
    running_min = values[0]
    best = 0.0
    for v in values[1:]:
        rise = v - running_min
        if rise > best:
            best = rise
        if v < running_min:
            running_min = v
    return float(best)

"""Excursion functionals and path transforms around the supremum.

For an excursion ``e`` above the infimum (starts with an upward jump from
0, drifts down between upward jumps, ends on returning to 0), with
``argmax_time(e)`` the first time the supremum is attained:

* :func:`pre_sup` is the excursion killed at the argmax time (the jump landing
  on the supremum included);
* :func:`post_sup` is the remainder, recentred to start at 0;
* :func:`supremum_swap` rotates the two halves in place: the pre-supremum
  part is space-time reversed, the post-supremum part likewise, and the
  two are glued back at the (preserved) supremum.  It is an involution
  that fixes the lifetime, the supremum, the argmax time and the jump multiset
  of every single excursion, while swapping the roles of the two halves.
* :func:`pointwise_reflection` maps ``e`` to ``s -> peak - e(s)``,
  turning descent into ascent and upward jumps into downward ones.

Local time here is the exact crossing count of the piecewise-linear
motion: a segment descending from ``a`` to ``b`` crosses every level in
``(b, a]``, an ascending one every level in ``[a, b)``; jumps cross
nothing (they spend no time).  These half-open choices make the crossing
counts of ``e`` at level ``r`` and of its pointwise reflection at level
``peak - r`` agree exactly.  Dividing counts by the drift speed turns
them into occupation densities.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from levyexc.paths import EventPath, GridPath, concat

__all__ = [
    "argmax_time",
    "peak_value",
    "pre_sup",
    "post_sup",
    "supremum_swap",
    "pointwise_reflection",
    "depth_time",
    "depth",
    "local_time_count",
    "LocalTimeProfile",
    "local_time_fv",
    "local_time_grid",
]


def argmax_time(path: EventPath) -> float:
    """First time the path attains its maximum (post-jump values count)."""
    return path.first_argmax()[0]


def peak_value(path: EventPath) -> float:
    """The attained maximum of the path."""
    return path.first_argmax()[1]


def pre_sup(path: EventPath) -> EventPath:
    """The path killed at the argmax time, ending at the supremum.

    The argmax time is a jump time whenever the maximum is attained by a jump
    (always, for downward-drifting paths); the killed path keeps it.
    """
    return path.kill(argmax_time(path))


def post_sup(path: EventPath) -> EventPath:
    """The path after the argmax time, recentred to start at 0 from the supremum."""
    return path.shift_centered(argmax_time(path))


def supremum_swap(path: EventPath) -> EventPath:
    """Space-time reverse both halves around the supremum and reglue.

    The pre-supremum half (supremum-attaining jump included) and the
    post-supremum half are each rotated; the rotated pre half ends at the
    supremum, where the rotated post half (translated up by the supremum)
    takes over.  Applying the map twice gives back the original path.
    """
    g, peak = path.first_argmax()
    left = path.kill(g).rotate()
    right = path.shift_centered(g).rotate().translate(peak)
    return concat(left, right)


def pointwise_reflection(path: EventPath) -> EventPath:
    """The reflected path ``s -> peak - path(s)``.

    Slopes and jumps change sign; the result ascends between downward
    jumps, starts at ``peak - path(0)`` and ends at ``peak - end value``.
    """
    peak = peak_value(path)
    segs = tuple((dur, -slope, -jump) for dur, slope, jump in path.segments)
    return EventPath(peak - path.x0, -path.initial_jump, segs)


# -- depth functionals for excursions below the supremum ----------------------


def depth_time(path: EventPath) -> float:
    """First time the left limit attains the path infimum.

    For excursions below the supremum this is the instant just before
    which the excursion is deepest.
    """
    if not path.segments:
        return 0.0
    pre_ends = [path._starts[i] + s * d
                for i, (d, s, _) in enumerate(path.segments)]
    inf_val = min(min(pre_ends), path.x0)
    if path.x0 <= inf_val:
        return 0.0
    for i, v in enumerate(pre_ends):
        if v == inf_val:
            return path._times[i]
    raise AssertionError("unreachable")


def depth(path: EventPath) -> float:
    """Depth below the starting level: ``-(left limit at depth_time)``."""
    return -path.left_limit(depth_time(path))


# -- crossing local time -------------------------------------------------------


def local_time_count(path: EventPath, r: float) -> int:
    """Exact number of drift crossings of level ``r``.

    Descending segments cover ``(end, start]``, ascending ones cover
    ``[start, end)``; zero-slope segments are rejected (a plateau at ``r``
    has no meaningful crossing count).
    """
    n = 0
    for i, (dur, slope, jump) in enumerate(path.segments):
        a = path._starts[i]
        b = a + slope * dur
        if slope < 0.0:
            n += b < r <= a
        elif slope > 0.0:
            n += a <= r < b
        else:
            raise ValueError("plateau segment: crossing count undefined")
    return n


@dataclass(frozen=True)
class LocalTimeProfile:
    """Piecewise-constant crossing-count profile of a path.

    ``counts[i]`` is the crossing count on the open level interval
    ``(breakpoints[i], breakpoints[i+1])``; counts at the breakpoints
    themselves depend on the half-open segment conventions and are
    available through :func:`local_time_count`.
    """

    breakpoints: tuple
    counts: tuple
    kind: str = "crossing_fv"

    def __post_init__(self):
        if len(self.counts) != max(len(self.breakpoints) - 1, 0):
            raise ValueError("need one count per breakpoint gap")

    def count_between(self, low: float, high: float) -> int:
        """Count on an interval lying strictly inside one gap."""
        for i in range(len(self.counts)):
            if self.breakpoints[i] <= low and high <= self.breakpoints[i + 1]:
                return self.counts[i]
        raise ValueError(f"[{low}, {high}] spans a breakpoint")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("level_low,level_high,count\n")
        for i, c in enumerate(self.counts):
            buf.write(f"{self.breakpoints[i]!r},{self.breakpoints[i + 1]!r},{c}\n")
        return buf.getvalue()


def local_time_fv(path: EventPath) -> LocalTimeProfile:
    """Crossing-count profile of a piecewise-linear path.

    Breakpoints are the segment endpoint values; between consecutive
    breakpoints the crossing count is constant and is evaluated at the
    midpoint.
    """
    endpoints = set()
    for i, (dur, slope, jump) in enumerate(path.segments):
        if slope == 0.0:
            raise ValueError("plateau segment: crossing count undefined")
        a = path._starts[i]
        endpoints.add(a)
        endpoints.add(a + slope * dur)
    bps = tuple(sorted(endpoints))
    counts = tuple(local_time_count(path, 0.5 * (bps[i] + bps[i + 1]))
                   for i in range(len(bps) - 1))
    return LocalTimeProfile(bps, counts)


def local_time_grid(path: GridPath, delta: float,
                    low: float = None, high: float = None):
    """Histogram occupation-density estimate for a grid path.

    Each grid point deposits ``h / delta`` into its level bin; returns
    ``(edges, density)`` with ``len(edges) = len(density) + 1``.  This
    estimates the local time at the bin centres for small ``h << delta``.
    """
    if delta <= 0.0:
        raise ValueError("bin width must be positive")
    vals = np.asarray(path.values)
    lo = float(np.min(vals)) if low is None else float(low)
    hi = float(np.max(vals)) if high is None else float(high)
    if hi <= lo:
        hi = lo + delta
    nbins = max(1, int(math.ceil((hi - lo) / delta - 1e-9)))
    edges = lo + delta * np.arange(nbins + 1)
    idx = np.floor((vals - lo) / delta).astype(int)
    inside = (idx >= 0) & (idx < nbins)
    density = np.bincount(idx[inside], minlength=nbins).astype(float)
    density *= path.h / delta
    return edges, density

"""Exact event-driven simulation and excursion extraction.

Finite-variation spectrally positive paths are piecewise linear: slope
``-d`` between upward jumps that arrive at rate ``b`` with sizes drawn
from the normalised jump measure.  :func:`sample_path_fv` simulates such
paths exactly (no discretisation) under one of three stop rules, and the
extraction helpers decompose a path into

* excursions above the running infimum: opened by a jump from a running
  record low, closed when the path drifts back down to the opening level;
* excursions below the running supremum: opened at a record instant,
  closed by the first jump that carries the path to or above the old
  record (that terminal jump is part of the excursion).

Both extractions are exact path surgery; concatenating the pieces (plus
the on-record drift in the infimum case) reproduces the input path.

Grid (Euler) simulation for models with a Brownian component lives in
:func:`sample_path_grid`; it is the only approximate sampler here.

Reproducibility: every sampler takes a ``numpy.random.Generator``.
:class:`RngStream` builds hierarchies of independent, order-insensitive
named streams on top of ``numpy.random.SeedSequence``.
"""

from __future__ import annotations

import math
import os
import zlib
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from levyexc.models import LevyModel
from levyexc.paths import EventPath, GridPath, Segment

__all__ = [
    "RngStream",
    "worker_count",
    "Horizon",
    "FirstPassage",
    "ExcursionCount",
    "StopRule",
    "sample_path_fv",
    "sample_path_grid",
    "first_passage_time",
    "Excursion",
    "extract_excursions",
    "extract_sup_excursions",
    "AnyExcursion",
    "LifetimeAtLeast",
    "HeightAtLeast",
    "Condition",
    "sample_excursions",
    "sample_killed_sup_excursions",
    "exit_probability_mc",
]

# Guard against runaway event loops (buggy stop rules, critical models).
DEFAULT_MAX_EVENTS = 5_000_000

# An excursion is considered closed once it comes within this distance of
# its opening level.  Absorbs rounding when a path was assembled from
# events truncated in absolute coordinates; real paths only approach their
# running infimum this closely when actually returning to it.
CLOSE_TOL = 1e-9


# -- random number streams ---------------------------------------------------


def _key_part(part) -> int:
    """Stable 32-bit key for a stream-name component (never built-in hash)."""
    if isinstance(part, (int, np.integer)) and not isinstance(part, bool):
        return int(part) & 0xFFFFFFFF
    return zlib.crc32(str(part).encode("utf8"))


@dataclass(frozen=True)
class RngStream:
    """Named, hierarchical random stream.

    ``RngStream(seed).child("suite", 3).generator()`` always yields the
    same generator for the same seed and name path, independently of any
    other stream and of the order streams are created in.
    """

    seed: int
    key: tuple = ()

    def child(self, *parts) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(_key_part(p) for p in parts))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(ss))


def worker_count() -> int:
    """Worker count from the LEVYEXC_THREADS environment variable (>= 1).

    Work is always partitioned into fixed blocks first, so results do not
    depend on this value; it only controls how blocks are dispatched.
    """
    raw = os.environ.get("LEVYEXC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"LEVYEXC_THREADS={raw!r} is not an integer") from exc
    return max(1, n)


# -- stop rules ---------------------------------------------------------------


@dataclass(frozen=True)
class Horizon:
    """Stop at a fixed time (the path ends exactly there)."""

    time: float


@dataclass(frozen=True)
class FirstPassage:
    """Stop when the path first reaches ``level`` from above.

    Downward crossings are continuous, so the path ends exactly at the
    level.  Requires ``level <= x0``.
    """

    level: float


@dataclass(frozen=True)
class ExcursionCount:
    """Stop when the n-th excursion above the infimum closes."""

    count: int


StopRule = Union[Horizon, FirstPassage, ExcursionCount]


# -- exact finite-variation sampling ------------------------------------------


def sample_path_fv(model: LevyModel, x0: float, stop: StopRule,
                   rng: np.random.Generator,
                   max_events: int = DEFAULT_MAX_EVENTS) -> EventPath:
    """Exact path of a finite-variation model from ``x0`` until ``stop``.

    The path drifts at slope ``-d`` and jumps upward at rate ``b``; all
    event times and values are exact up to float rounding.  Raises
    ``RuntimeError`` if ``max_events`` jumps occur before the stop rule
    fires.
    """
    if not model.is_finite_variation:
        raise ValueError("exact sampling needs a finite-variation model")
    d = model.drift
    if d <= 0.0:
        raise ValueError("sampling needs drift d > 0")
    b = model.jumps.mass
    slope = -d

    if isinstance(stop, Horizon) and stop.time < 0.0:
        raise ValueError("horizon must be >= 0")
    if isinstance(stop, FirstPassage) and stop.level > x0:
        raise ValueError("first-passage level must be <= x0")
    if isinstance(stop, ExcursionCount) and stop.count < 1:
        raise ValueError("excursion count must be >= 1")

    segs: list[Segment] = []
    t, v = 0.0, float(x0)
    # Excursion bookkeeping for the ExcursionCount rule.
    in_exc, exc_level, closed = False, 0.0, 0

    for _ in range(max_events):
        wait = rng.exponential(1.0 / b) if b > 0.0 else math.inf

        if isinstance(stop, Horizon):
            if t + wait >= stop.time:
                segs.append((stop.time - t, slope, 0.0))
                return EventPath(x0, 0.0, tuple(segs))
        elif isinstance(stop, FirstPassage):
            delta = (v - stop.level) / d
            if delta <= wait:
                segs.append((delta, slope, 0.0))
                return EventPath(x0, 0.0, tuple(segs))
        else:  # ExcursionCount
            if in_exc:
                delta = (v - exc_level) / d
                if delta <= wait:
                    if closed + 1 == stop.count:
                        segs.append((delta, slope, 0.0))
                        return EventPath(x0, 0.0, tuple(segs))
                    closed += 1
                    in_exc = False

        jump = float(model.jumps.sample(rng))
        segs.append((wait, slope, jump))
        v += slope * wait
        if isinstance(stop, ExcursionCount) and not in_exc:
            in_exc, exc_level = True, v
        v += jump
        t += wait

    raise RuntimeError(f"stop rule did not fire within {max_events} events")


def first_passage_time(model: LevyModel, x: float, horizon: float,
                       rng: np.random.Generator) -> tuple:
    """(hit, time) for the first passage to 0 from ``x``, capped at ``horizon``.

    Lean loop that does not materialise the path; ``hit`` is False when the
    passage has not happened by the horizon (supercritical paths escape with
    probability 1 - exp(-eta * x)).
    """
    if x < 0.0:
        raise ValueError("starting level must be >= 0")
    d = model.drift
    if d <= 0.0:
        raise ValueError("first passage needs drift d > 0")
    b = model.jumps.mass
    t, v = 0.0, float(x)
    while True:
        wait = rng.exponential(1.0 / b) if b > 0.0 else math.inf
        delta = v / d
        if delta <= wait:
            hit_time = t + delta
            if hit_time <= horizon:
                return True, hit_time
            return False, horizon
        if t + wait >= horizon:
            return False, horizon
        v += -d * wait + float(model.jumps.sample(rng))
        t += wait


def sample_path_grid(model: LevyModel, x0: float, horizon: float, h: float,
                     rng: np.random.Generator) -> GridPath:
    """Euler scheme on a uniform grid; supports a Brownian component.

    Per step: drift ``-(alpha + small-jump mean) * h``, Gaussian increment
    of variance ``2 * beta * h``, plus a Poisson(b*h) number of jumps drawn
    from the normalised jump measure.
    """
    if horizon <= 0.0 or h <= 0.0:
        raise ValueError("horizon and step must be positive")
    n = int(round(horizon / h))
    drift = model.alpha + model.jumps.small_mean()
    steps = np.full(n, -drift * h)
    if model.beta > 0.0:
        steps += math.sqrt(2.0 * model.beta * h) * rng.standard_normal(n)
    b = model.jumps.mass
    if b > 0.0:
        counts = rng.poisson(b * h, n)
        total = int(counts.sum())
        if total:
            cells = np.repeat(np.arange(n), counts)
            np.add.at(steps, cells, model.jumps.sample(rng, size=total))
    values = np.empty(n + 1)
    values[0] = x0
    np.cumsum(steps, out=values[1:])
    values[1:] += x0
    return GridPath(h, tuple(values))


# -- excursion extraction ------------------------------------------------------


@dataclass(frozen=True)
class Excursion:
    """One extracted excursion.

    Attributes:
        kind: "above_inf" or "below_sup".
        path: the excursion as a path from (relative) level 0.
        start_time: clock time at which the excursion opened.
        start_local_time: infimum descent (-I) resp. supremum level (S)
            at the opening instant; the natural local-time coordinate.
        complete: False when the input path ended mid-excursion.
    """

    kind: str
    path: EventPath
    start_time: float
    start_local_time: float
    complete: bool


def _check_extractable(path: EventPath):
    if path.initial_jump < 0.0:
        raise ValueError("extraction needs upward jumps")
    for dur, slope, jump in path.segments:
        if slope >= 0.0:
            raise ValueError("extraction needs strictly downward drift")
        if jump < 0.0:
            raise ValueError("extraction needs upward jumps")


def extract_excursions(path: EventPath) -> list:
    """Excursions of ``path`` above its running infimum.

    An excursion opens when a jump occurs while the path sits at its
    running infimum and closes when the path drifts back to the opening
    level.  The excursion path is the piece shifted to start from level 0
    by its opening jump.  Time spent at the infimum between excursions
    belongs to no excursion (that is where local time accrues).
    """
    _check_extractable(path)
    out = []
    v = path.x0 - path.initial_jump  # running value; starts at the pre-start
    t = 0.0
    in_exc = False
    exc_level = exc_start_t = exc_j = u = 0.0
    exc_segs: list[Segment] = []

    def open_exc(jump):
        nonlocal in_exc, exc_level, exc_start_t, exc_j, u, exc_segs
        in_exc, exc_level, exc_start_t = True, v, t
        exc_j, u, exc_segs = jump, jump, []

    def close_exc(complete):
        nonlocal in_exc
        out.append(Excursion("above_inf",
                             EventPath(exc_j, exc_j, tuple(exc_segs)),
                             exc_start_t, -exc_level, complete))
        in_exc = False

    if path.initial_jump > 0.0:
        open_exc(path.initial_jump)

    for dur, slope, jump in path.segments:
        if in_exc:
            u_end = u + slope * dur
            if u_end <= CLOSE_TOL:  # returns to the opening level here
                delta = min(u / -slope, dur)
                exc_segs.append((delta, slope, 0.0))
                close_exc(True)
                v = exc_level + slope * (dur - delta)
                t += dur
                if jump > 0.0:
                    open_exc(jump)
                continue
            exc_segs.append((dur, slope, jump))
            u = u_end + jump
            t += dur
        else:
            v += slope * dur  # on the infimum: every instant is a record
            t += dur
            if jump > 0.0:
                open_exc(jump)
    if in_exc:
        close_exc(False)
    return out


def extract_sup_excursions(path: EventPath) -> list:
    """Excursions of ``path`` below its running supremum.

    A record instant (a jump carrying the path to or above the running
    supremum) terminates the current excursion; the terminal jump is kept
    as the excursion's final jump, so a complete excursion ends at its
    nonnegative overshoot.  Excursion values are relative to the supremum
    at the opening instant, hence nonpositive until the terminal jump.
    """
    _check_extractable(path)
    out = []
    sup = path.x0 - path.initial_jump  # current record level
    t = 0.0
    exc_start_t = 0.0
    y = 0.0  # value relative to the supremum at the opening instant
    exc_segs: list[Segment] = []

    def close_exc(terminal_jump):
        nonlocal exc_segs, y, exc_start_t, sup
        if exc_segs:
            p = EventPath(0.0, 0.0, tuple(exc_segs))
        else:  # record at the opening instant itself (t = 0 jump)
            p = EventPath(terminal_jump, terminal_jump, ())
        out.append(Excursion("below_sup", p, exc_start_t, sup, True))
        sup = sup + y + terminal_jump
        exc_start_t, y, exc_segs = t, 0.0, []

    if path.initial_jump > 0.0:
        close_exc(path.initial_jump)

    for dur, slope, jump in path.segments:
        y_end = y + slope * dur
        t += dur
        if y_end + jump >= 0.0:  # record instant: terminal jump
            exc_segs.append((dur, slope, jump))
            y = y_end
            close_exc(jump)
        else:
            exc_segs.append((dur, slope, jump))
            y = y_end + jump
    if exc_segs:
        out.append(Excursion("below_sup", EventPath(0.0, 0.0, tuple(exc_segs)),
                             exc_start_t, sup, False))
    return out


# -- conditioned excursion sampling -------------------------------------------


@dataclass(frozen=True)
class AnyExcursion:
    """No conditioning: accepts every excursion."""

    def check(self, path: EventPath) -> bool:
        return True


@dataclass(frozen=True)
class LifetimeAtLeast:
    """Condition on the excursion lifetime exceeding a threshold."""

    min_lifetime: float

    def check(self, path: EventPath) -> bool:
        return path.lifetime >= self.min_lifetime


@dataclass(frozen=True)
class HeightAtLeast:
    """Condition on the excursion height (supremum) exceeding a threshold."""

    min_height: float

    def check(self, path: EventPath) -> bool:
        return path.sup() >= self.min_height


Condition = Union[AnyExcursion, LifetimeAtLeast, HeightAtLeast]


def sample_excursions(model: LevyModel, n: int, rng: np.random.Generator,
                      condition: Condition = AnyExcursion(),
                      max_attempts: Optional[int] = None,
                      max_events: int = DEFAULT_MAX_EVENTS) -> list:
    """``n`` independent excursions above the infimum, under a condition.

    Each draw opens with a jump from the normalised jump measure and runs
    the exact path until it returns to the opening level; by the strong
    Markov property this is exactly the law of the excursions extracted
    from one long path.  Conditioning is by rejection.  The model must not
    drift to +infinity (excursions would fail to close).
    """
    if model.psi_prime_at_zero() < 0.0:
        raise ValueError("excursions of a model drifting to +inf may never "
                         "close; condition the model first")
    if model.jumps.mass <= 0.0:
        raise ValueError("excursion sampling needs jumps")
    if max_attempts is None:
        max_attempts = max(1000, 10000 * n)
    out = []
    for _ in range(max_attempts):
        if len(out) >= n:
            break
        j = float(model.jumps.sample(rng))
        body = sample_path_fv(model, j, FirstPassage(0.0), rng,
                              max_events=max_events)
        exc = EventPath(j, j, body.segments)
        if condition.check(exc):
            out.append(exc)
    if len(out) < n:
        raise RuntimeError(
            f"only {len(out)}/{n} excursions met the condition in "
            f"{max_attempts} attempts")
    return out


def sample_killed_sup_excursions(model: LevyModel, n: int, depth: float,
                                 rng: np.random.Generator,
                                 max_attempts: Optional[int] = None,
                                 max_events: int = DEFAULT_MAX_EVENTS) -> list:
    """``n`` excursions below the running supremum, conditioned to reach
    ``-depth`` and killed at that (continuous) passage.

    An excursion below the supremum starts at 0, drifts down at rate ``d``
    and jumps upward; it closes at the first jump that carries it to or
    above 0, and with positive probability it never closes at all.  The
    killed path only depends on the excursion up to its first passage to
    ``-depth``, which happens before any closing jump, so rejection
    sampling never needs to resolve whether the excursion would eventually
    close: a draw is accepted at the passage and rejected at a closing
    jump, whichever comes first.
    """
    if not model.is_finite_variation:
        raise ValueError("exact sampling needs a finite-variation model")
    d = model.drift
    if d <= 0.0:
        raise ValueError("sampling needs drift d > 0")
    if depth <= 0.0:
        raise ValueError("depth must be positive")
    b = model.jumps.mass
    if max_attempts is None:
        max_attempts = max(1000, 10000 * n)
    out = []
    for _ in range(max_attempts):
        if len(out) >= n:
            break
        segs: list = []
        v = 0.0
        accepted = None
        for _ in range(max_events):
            wait = rng.exponential(1.0 / b) if b > 0.0 else math.inf
            delta = (v + depth) / d
            if delta <= wait:
                segs.append((delta, -d, 0.0))
                accepted = EventPath(0.0, 0.0, tuple(segs))
                break
            jump = float(model.jumps.sample(rng))
            v_pre = v - d * wait
            if v_pre + jump >= 0.0:
                break  # the excursion closes before reaching the depth
            segs.append((wait, -d, jump))
            v = v_pre + jump
        else:
            raise RuntimeError(
                f"no passage to -{depth} within {max_events} events")
        if accepted is not None:
            out.append(accepted)
    if len(out) < n:
        raise RuntimeError(
            f"only {len(out)}/{n} excursions reached depth {depth} in "
            f"{max_attempts} attempts")
    return out


def exit_probability_mc(model: LevyModel, x: float, a: float, n: int,
                        rng: np.random.Generator) -> float:
    """Monte Carlo estimate of P_x(hit 0 before exceeding ``a``).

    The lower boundary is always reached continuously (by drift) and the
    upper one only by a jump, so the two exit events are unambiguous path
    by path; no path needs to be materialised.
    """
    if not 0.0 < x < a:
        raise ValueError("need 0 < x < a")
    if not model.is_finite_variation:
        raise ValueError("exact sampling needs a finite-variation model")
    d = model.drift
    if d <= 0.0:
        raise ValueError("sampling needs drift d > 0")
    if n < 1:
        raise ValueError("need at least one replication")
    b = model.jumps.mass
    hits = 0
    for _ in range(n):
        v = float(x)
        while True:
            wait = rng.exponential(1.0 / b) if b > 0.0 else math.inf
            if v / d <= wait:
                hits += 1
                break
            v += -d * wait + float(model.jumps.sample(rng))
            if v >= a:
                break
    return hits / n

"""Two-sample statistical verification of the reversal invariances.

Every registered suite encodes one distributional identity satisfied by the
exact path transformations in this package: it draws two independent halves
of paths (or trees), applies the suite's transformation to half A, leaves
half B untouched, and compares scalar functionals across the halves with
distribution-free two-sample tests.  A suite passes when every required
functional's p-value clears the per-functional threshold.

Properties that hold *pathwise* under a transformation (lifetime, peak,
argmax, jump multiset under the supremum swap; lifetime and jump multiset
under rotation) are not statistics: they are asserted sample by sample and
any violation is counted as a bug in :class:`SuiteResult.exact_failures`.

Design notes
------------
- Independent halves instead of paired comparison: the identities under test
  are equalities in law, and pairing F(T(e)) with F(e) on the same draw
  induces dependence that standard two-sample tests do not license.
- Continuous functionals use the asymptotic Kolmogorov-Smirnov p-value at
  the effective sample size; integer-valued functionals (jump counts,
  crossing counts, widths) use a permutation p-value for the same statistic,
  because the asymptotic null is wrong under heavy ties.
- Sampling is conditioned to a positive-finite-mass event (everything here
  uses the unconditioned excursion law, a first-passage law, or a
  reach-a-depth conditioning); when a transformation is applied, the suite
  asserts per sample that it does not move paths in or out of the
  conditioning event, which is what licenses testing the identity on
  conditioned draws.
- Every block of samples comes from its own deterministic child stream, so
  results are byte-reproducible and independent of the worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from io import StringIO
from typing import Callable, Optional

import csv

import numpy as np
from scipy.special import kolmogorov

from levyexc.excursions import (
    argmax_time,
    local_time_count,
    peak_value,
    post_sup,
    pre_sup,
    supremum_swap,
)
from levyexc.models import ExponentialJumps, LevyModel, jumps_from_config
from levyexc.paths import EventPath
from levyexc.simulate import (
    FirstPassage,
    RngStream,
    sample_excursions,
    sample_killed_sup_excursions,
    sample_path_fv,
    worker_count,
)
from levyexc.trees import WidthProcess, sample_tree, width_process

__all__ = [
    "PER_FUNCTIONAL_ALPHA",
    "REJECT_ALPHA",
    "EXACT_RTOL",
    "DEFAULT_SEED",
    "CALIBRATION_SEED",
    "DEFAULT_SUITE_SIZES",
    "SUITE_NAMES",
    "TestReport",
    "SuiteResult",
    "ks_statistic",
    "ks_two_sample",
    "permutation_ks",
    "ks_null_calibration",
    "functional_by_name",
    "default_model",
    "suite_sampler",
    "run_suite",
    "run_suites",
    "reports_to_csv",
    "reports_to_json",
]

# Per-functional decision threshold; a suite passes when every required
# functional's p-value exceeds it.  With at most six functionals per suite
# the family-wise error rate stays below 0.6% per suite.
PER_FUNCTIONAL_ALPHA = 1e-3
# Threshold for tests that are *supposed* to reject (negative controls).
REJECT_ALPHA = 1e-6
# Relative tolerance of the pathwise exactness assertions.  The transforms
# copy floats verbatim; only sum reassociation (lifetime is a sum of
# durations read in a different order) can move a digit in the last place.
EXACT_RTOL = 1e-12
N_PERMUTATIONS = 2000
DEFAULT_SEED = 7
# Shipped seed of the null-calibration run.  The empirical rejection rate at
# 1000 repetitions has a ~0.007 standard error around the true ~0.049, so a
# fixed central seed keeps the shipped check deterministic and stable.
CALIBRATION_SEED = 2
# Samples per block; one child stream per block makes the draw order
# deterministic whatever the worker count.
BLOCK_SIZE = 512


def default_model() -> LevyModel:
    """The model every suite uses unless told otherwise: unit drift with
    exponential jumps of rate 1 and mean 1/2 (strictly subcritical)."""
    return LevyModel.from_drift(1.0, ExponentialJumps(1.0, 2.0))


# -- two-sample tests ----------------------------------------------------------


def _as_sample(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d sample")
    return arr


def ks_statistic(a, b) -> float:
    """Supremum distance between the two empirical distribution functions."""
    a = np.sort(_as_sample(a, "a"))
    b = np.sort(_as_sample(b, "b"))
    pool = np.concatenate([a, b])
    f_a = np.searchsorted(a, pool, side="right") / a.size
    f_b = np.searchsorted(b, pool, side="right") / b.size
    return float(np.max(np.abs(f_a - f_b)))


def ks_two_sample(a, b) -> tuple:
    """(D, p) for the two-sample Kolmogorov-Smirnov test.

    The p-value evaluates the asymptotic Kolmogorov survival function at
    ``sqrt(n_a n_b / (n_a + n_b)) * D``; it is intended for continuously
    distributed functionals (no ties).  Degenerate input (all pooled values
    equal) gives D = 0 and p = 1.
    """
    a = _as_sample(a, "a")
    b = _as_sample(b, "b")
    d = ks_statistic(a, b)
    effective = a.size * b.size / (a.size + b.size)
    p = float(kolmogorov(math.sqrt(effective) * d))
    return d, p


def permutation_ks(a, b, rng: np.random.Generator,
                   n_permutations: int = N_PERMUTATIONS) -> tuple:
    """(D, p) for the KS statistic with a permutation null.

    Valid under arbitrary ties, hence used for integer-valued functionals.
    The pooled sample is sorted once; relabelling turns the CDF difference
    into a running sum of +1/n_a and -1/n_b weights, read off at the end of
    every tie group.  The p-value uses the add-one convention, so its floor
    is 1/(n_permutations + 1).
    """
    a = _as_sample(a, "a")
    b = _as_sample(b, "b")
    if n_permutations < 1:
        raise ValueError("need at least one permutation")
    n_a, n_b = a.size, b.size
    pool = np.concatenate([a, b])
    order = np.argsort(pool, kind="stable")
    sorted_pool = pool[order]
    # Last index of every tie group: the CDF difference only matters there.
    ends = np.nonzero(np.diff(sorted_pool))[0]
    ends = np.concatenate([ends, [pool.size - 1]])
    weights = np.concatenate(
        [np.full(n_a, 1.0 / n_a), np.full(n_b, -1.0 / n_b)])
    observed = float(np.max(np.abs(np.cumsum(weights[order])[ends])))

    exceed = 0
    remaining = n_permutations
    chunk = max(1, min(n_permutations, 4_000_000 // pool.size))
    while remaining > 0:
        k = min(chunk, remaining)
        rows = rng.permuted(np.tile(weights, (k, 1)), axis=1)
        stats = np.max(np.abs(np.cumsum(rows, axis=1)[:, ends]), axis=1)
        exceed += int(np.count_nonzero(stats >= observed - 1e-12))
        remaining -= k
    p = (1 + exceed) / (1 + n_permutations)
    return observed, float(p)


def ks_null_calibration(n: int = 2000, repetitions: int = 1000,
                        alpha: float = 0.05,
                        seed: int = CALIBRATION_SEED) -> float:
    """Empirical rejection rate of :func:`ks_two_sample` under the null.

    Draws two identically distributed normal halves of size ``n`` per
    repetition and counts how often the asymptotic p-value falls below
    ``alpha``; the rate should sit in a tight band around ``alpha`` at the
    sizes the suites use.
    """
    stream = RngStream(seed).child("verify", "ks_calibration")
    rejections = 0
    for i in range(repetitions):
        g = stream.child(i).generator()
        x = g.standard_normal(2 * n)
        _, p = ks_two_sample(x[:n], x[n:])
        if p < alpha:
            rejections += 1
    return rejections / repetitions


# -- functional catalog --------------------------------------------------------


def _lifetime(path) -> float:
    return path.lifetime


def _height(path: EventPath) -> float:
    return peak_value(path)


def _argmax(path: EventPath) -> float:
    return argmax_time(path)


def _area(path: EventPath) -> float:
    return path.area()


def _jump_count(path: EventPath) -> float:
    return float(path.jump_count())


def _max_jump(path: EventPath) -> float:
    return path.max_jump()


def _value_at_fraction(q: float, path: EventPath) -> float:
    return path.evaluate(q * path.lifetime)


def _pre_value_at_fraction(q: float, path: EventPath) -> float:
    head = pre_sup(path)
    return head.evaluate(q * head.lifetime)


def _loctime_at_fraction(q: float, path: EventPath) -> float:
    return float(local_time_count(path, q * peak_value(path)))


def _width_at_fraction(q: float, wid: WidthProcess) -> float:
    return float(wid.value_at(q * wid.extinction_time))


def _width_left_at_fraction(q: float, wid: WidthProcess) -> float:
    return float(wid.left_limit(q * wid.extinction_time))


def _time_weighted_area(wid: WidthProcess) -> float:
    return wid.time_weighted_integral()


def _time_weighted_area_reversed(wid: WidthProcess) -> float:
    return wid.time_weighted_integral(reverse=True)


_PLAIN_FUNCTIONALS = {
    "lifetime": _lifetime,
    "height": _height,
    "argmax_time": _argmax,
    "area": _area,
    "jump_count": _jump_count,
    "max_jump": _max_jump,
    "time_weighted_area": _time_weighted_area,
    "time_weighted_area_reversed": _time_weighted_area_reversed,
}

_FRACTION_FUNCTIONALS = {
    "value_at_fraction": _value_at_fraction,
    "pre_value_at_fraction": _pre_value_at_fraction,
    "crossing_count_at_fraction": _loctime_at_fraction,
    "width_at_fraction": _width_at_fraction,
    "width_left_at_fraction": _width_left_at_fraction,
}


def functional_by_name(spec: str) -> Callable:
    """Resolve ``"area"`` or ``"value_at_fraction:0.3"`` to a callable.

    Fraction-parameterised functionals require a ``:q`` suffix with
    0 < q < 1; plain ones reject any parameter.
    """
    name, _, param = spec.partition(":")
    if name in _PLAIN_FUNCTIONALS:
        if param:
            raise ValueError(f"functional {name!r} takes no parameter")
        return _PLAIN_FUNCTIONALS[name]
    if name in _FRACTION_FUNCTIONALS:
        if not param:
            raise ValueError(f"functional {name!r} needs a ':q' parameter")
        q = float(param)
        if not 0.0 < q < 1.0:
            raise ValueError("fraction parameter must lie in (0, 1)")
        return partial(_FRACTION_FUNCTIONALS[name], q)
    known = sorted(_PLAIN_FUNCTIONALS) + sorted(_FRACTION_FUNCTIONALS)
    raise ValueError(f"unknown functional {spec!r}; known: {', '.join(known)}")


# -- reports -------------------------------------------------------------------


REPORT_FIELDS = ("suite", "functional", "n_a", "n_b", "statistic",
                 "p_value", "verdict", "seed", "model")


@dataclass(frozen=True)
class TestReport:
    """Outcome of one two-sample comparison inside a suite."""

    suite: str
    functional: str
    n_a: int
    n_b: int
    statistic: float
    p_value: float
    verdict: str  # "Pass" | "Reject"
    seed: int
    model: str  # canonical JSON of the model configuration

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in REPORT_FIELDS}


def reports_to_csv(reports) -> str:
    """CSV rendering (one row per report, header first); deterministic."""
    buf = StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_FIELDS)
    for r in reports:
        writer.writerow([r.suite, r.functional, r.n_a, r.n_b,
                         repr(r.statistic), repr(r.p_value), r.verdict,
                         r.seed, r.model])
    return buf.getvalue()


def reports_to_json(reports) -> str:
    """JSON rendering of the reports; deterministic."""
    return json.dumps([r.to_dict() for r in reports], sort_keys=True)


@dataclass(frozen=True)
class SuiteResult:
    """All reports of one suite plus the pathwise-exactness tally."""

    suite: str
    reports: tuple
    passed: bool
    exact_checked: int
    exact_failures: int


# -- samplers ------------------------------------------------------------------


def _blocked(total: int, stream: RngStream, block_fn: Callable) -> list:
    """Draw ``total`` objects in fixed-size blocks.

    Each block gets its own child stream keyed by its index, so the result
    is identical whatever the worker count; threads only help when the
    sampler releases the GIL, but correctness never depends on them.
    """
    if total < 1:
        raise ValueError("need at least one sample")
    sizes = [BLOCK_SIZE] * (total // BLOCK_SIZE)
    if total % BLOCK_SIZE:
        sizes.append(total % BLOCK_SIZE)

    def run(index: int, count: int) -> list:
        return block_fn(count, stream.child("block", index).generator())

    workers = worker_count()
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(run, range(len(sizes)), sizes))
    else:
        blocks = [run(i, k) for i, k in enumerate(sizes)]
    return [obj for block in blocks for obj in block]


def _excursion_sampler(model: LevyModel, n: int, stream: RngStream) -> list:
    return _blocked(n, stream,
                    lambda k, g: sample_excursions(model, k, g))


def _pre_sup_sampler(model: LevyModel, n: int, stream: RngStream) -> list:
    return [pre_sup(e) for e in _excursion_sampler(model, n, stream)]


def _post_sup_sampler(model: LevyModel, n: int, stream: RngStream) -> list:
    return [post_sup(e) for e in _excursion_sampler(model, n, stream)]


def _killed_shifted_sampler(x: float, model: LevyModel, n: int,
                            stream: RngStream) -> list:
    """First-passage paths to ``-x`` from 0, shifted at their argmax."""

    def block(k: int, g: np.random.Generator) -> list:
        return [post_sup(sample_path_fv(model, 0.0, FirstPassage(-x), g))
                for _ in range(k)]

    return _blocked(n, stream, block)


def _killed_sup_sampler(depth: float, model: LevyModel, n: int,
                        stream: RngStream) -> list:
    return _blocked(
        n, stream,
        lambda k, g: sample_killed_sup_excursions(model, k, depth, g))


def _width_sampler(model: LevyModel, n: int, stream: RngStream) -> list:
    jumps = model.jumps
    if jumps.mass <= 0.0:
        raise ValueError("width sampling needs jumps")
    if jumps.mean() >= 1.0:
        raise ValueError("width sampling needs a subcritical lifespan "
                         "measure (mean < 1)")
    return _blocked(
        n, stream,
        lambda k, g: [width_process(sample_tree(jumps, g))
                      for _ in range(k)])


def suite_sampler(name: str, **params) -> Callable:
    """The (untransformed) sampler a suite uses for its B half.

    Returns a callable ``(model, n, stream) -> list``; useful for drawing
    histogram data under the same law a suite tests.
    """
    if name not in _SUITE_BUILDERS:
        raise ValueError(f"unknown suite {name!r}; known: "
                         f"{', '.join(SUITE_NAMES)}")
    model = params.pop("model", None) or default_model()
    spec = _SUITE_BUILDERS[name](model, params)[0]
    return spec.sampler_b


# -- suite machinery -----------------------------------------------------------


@dataclass(frozen=True)
class _TestDef:
    functional: str
    f_a: Callable
    f_b: Callable
    kind: str  # "ks" | "perm"
    required: bool = True
    expect_reject: bool = False


@dataclass(frozen=True)
class _SuiteSpec:
    label: str
    sampler_a: Callable
    sampler_b: Callable
    transform: Optional[Callable]
    condition: Optional[Callable]
    tests: tuple
    exact_check: Optional[Callable]


def _rel_close(x: float, y: float, rtol: float = EXACT_RTOL) -> bool:
    return abs(x - y) <= rtol * max(1.0, abs(x), abs(y))


def _swap_exact(original: EventPath, transformed: EventPath) -> bool:
    """The supremum swap must preserve lifetime, peak, argmax and jumps."""
    return (_rel_close(original.lifetime, transformed.lifetime)
            and _rel_close(peak_value(original), peak_value(transformed))
            and _rel_close(argmax_time(original), argmax_time(transformed))
            and sorted(original.jumps()) == sorted(transformed.jumps()))


def _rotation_exact(original: EventPath, transformed: EventPath) -> bool:
    """Rotation must preserve lifetime and the jump multiset."""
    return (_rel_close(original.lifetime, transformed.lifetime)
            and sorted(original.jumps()) == sorted(transformed.jumps()))


def _rotate(path: EventPath) -> EventPath:
    return path.rotate()


def _ks_test(name: str, f: Callable) -> _TestDef:
    return _TestDef(name, f, f, "ks")


def _perm_test(name: str, f: Callable) -> _TestDef:
    return _TestDef(name, f, f, "perm")


def _rotation_tests() -> tuple:
    return (
        _ks_test("area", _area),
        _ks_test("value_at_fraction:0.5", partial(_value_at_fraction, 0.5)),
        _ks_test("max_jump", _max_jump),
        _perm_test("jump_count", _jump_count),
    )


def _suffix(tests, suffix: str) -> tuple:
    return tuple(
        _TestDef(t.functional + suffix, t.f_a, t.f_b, t.kind, t.required,
                 t.expect_reject) for t in tests)


def _build_sup_swap(model: LevyModel, params: dict) -> list:
    tests = (
        _ks_test("area", _area),
        _ks_test("value_at_fraction:0.3", partial(_value_at_fraction, 0.3)),
        _ks_test("value_at_fraction:0.7", partial(_value_at_fraction, 0.7)),
        _ks_test("max_jump", _max_jump),
        _perm_test("jump_count", _jump_count),
        _perm_test("crossing_count_at_fraction:0.25",
                   partial(_loctime_at_fraction, 0.25)),
    )
    return [_SuiteSpec("sup_swap", _excursion_sampler, _excursion_sampler,
                       supremum_swap, None, tests, _swap_exact)]


def _build_pre_sup(model: LevyModel, params: dict) -> list:
    return [_SuiteSpec("pre_sup_rotation", _pre_sup_sampler,
                       _pre_sup_sampler, _rotate, None, _rotation_tests(),
                       _rotation_exact)]


def _build_post_sup(model: LevyModel, params: dict) -> list:
    return [_SuiteSpec("post_sup_rotation", _post_sup_sampler,
                       _post_sup_sampler, _rotate, None, _rotation_tests(),
                       _rotation_exact)]


def _build_killed_passage(model: LevyModel, params: dict) -> list:
    xs = params.get("x_values", (0.5, 2.0))
    specs = []
    for x in xs:
        if x <= 0.0:
            raise ValueError("passage levels must be positive")
        sampler = partial(_killed_shifted_sampler, float(x))
        specs.append(_SuiteSpec(
            f"killed_passage_rotation[x={x:g}]", sampler, sampler, _rotate,
            None, _rotation_tests(), _rotation_exact))
    return specs


def _build_sup_excursion(model: LevyModel, params: dict) -> list:
    depth = float(params.get("depth", 0.5))
    sampler = partial(_killed_sup_sampler, depth)
    # The sampler conditions on the excursion reaching -depth; rotation must
    # not move paths in or out of that event.  The killed path ends at
    # -depth up to rounding, hence the tolerance.
    condition = lambda p: p.inf() <= -depth + 1e-9  # noqa: E731
    return [_SuiteSpec("sup_excursion_rotation", sampler, sampler, _rotate,
                       condition, _rotation_tests(), _rotation_exact)]


def _build_loctime_reversal(model: LevyModel, params: dict) -> list:
    fractions = params.get("fractions", (0.2, 0.35))
    tests = []
    for q in fractions:
        if not 0.0 < q < 1.0:
            raise ValueError("fractions must lie in (0, 1)")
        tests.append(_TestDef(
            f"crossing_count_at_fraction:{q:g}_vs_{1.0 - q:g}",
            partial(_loctime_at_fraction, q),
            partial(_loctime_at_fraction, 1.0 - q),
            "perm"))
    return [_SuiteSpec("loctime_reversal", _excursion_sampler,
                       _excursion_sampler, None, None, tuple(tests), None)]


def _build_width_reversal(model: LevyModel, params: dict) -> list:
    fractions = params.get("fractions", (0.2, 0.35))
    tests = []
    for q in fractions:
        if not 0.0 < q < 1.0:
            raise ValueError("fractions must lie in (0, 1)")
        tests.append(_TestDef(
            f"width_at_fraction:{q:g}_vs_left_{1.0 - q:g}",
            partial(_width_at_fraction, q),
            partial(_width_left_at_fraction, 1.0 - q),
            "perm"))
    tests.append(_TestDef("time_weighted_area_vs_reversed",
                          _time_weighted_area,
                          _time_weighted_area_reversed, "ks"))
    return [_SuiteSpec("width_reversal", _width_sampler, _width_sampler,
                       None, None, tuple(tests), None)]


def _scaled_mass_jumps(jumps, factor: float):
    """The same jump law with its arrival mass scaled by ``factor``."""
    cfg = jumps.to_config()
    family = cfg.get("family")
    if family in ("exp", "dirac"):
        cfg["b"] = cfg["b"] * factor
    elif family == "mixture":
        cfg["components"] = [dict(c, b=c["b"] * factor)
                             for c in cfg["components"]]
    else:
        raise ValueError("negative control needs a model with jumps")
    return jumps_from_config(cfg)


def _build_negative_control(model: LevyModel, params: dict) -> list:
    factor = float(params.get("mass_factor", 0.8))
    altered = LevyModel.from_drift(model.drift,
                                   _scaled_mass_jumps(model.jumps, factor))
    mismatch = _TestDef("lifetime_mass_mismatch", _lifetime, _lifetime,
                        "ks", required=True, expect_reject=True)
    # Informational: the pre- and post-supremum parts of the same excursion
    # have no reason to share an area law; the comparison documents the
    # power of the harness and never gates the suite.
    info = _TestDef("abs_area_pre_vs_post",
                    lambda e: abs(pre_sup(e).area()),
                    lambda e: abs(post_sup(e).area()),
                    "ks", required=False)
    spec_mismatch = _SuiteSpec(
        "negative_control[mass_mismatch]", _excursion_sampler,
        lambda m, n, s: _excursion_sampler(altered, n, s),
        None, None, (mismatch,), None)
    spec_info = _SuiteSpec(
        "negative_control[pre_vs_post]", _excursion_sampler,
        _excursion_sampler, None, None, (info,), None)
    return [spec_mismatch, spec_info]


_SUITE_BUILDERS = {
    "sup_swap": _build_sup_swap,
    "pre_sup_rotation": _build_pre_sup,
    "post_sup_rotation": _build_post_sup,
    "killed_passage_rotation": _build_killed_passage,
    "sup_excursion_rotation": _build_sup_excursion,
    "loctime_reversal": _build_loctime_reversal,
    "width_reversal": _build_width_reversal,
    "negative_control": _build_negative_control,
}

SUITE_NAMES = tuple(_SUITE_BUILDERS)

# Per-half sample sizes of the default full run.  The invariance suites pass
# at any size (their null is exactly true), so 2000 keeps them quick.  The
# negative control must *reject* at the 1e-6 threshold, and the KS distance
# between the two lifetime laws it compares is about 0.028, so dependable
# rejection needs tens of thousands of samples per half; 40000 gives
# p <= 1e-14 across seeds at a ~3 s cost.
DEFAULT_SUITE_SIZES = {name: 2000 for name in SUITE_NAMES}
DEFAULT_SUITE_SIZES["negative_control"] = 40000


def _run_spec(spec: _SuiteSpec, model: LevyModel, n: int, stream: RngStream,
              seed: int) -> tuple:
    """Run one spec; returns (reports, passed, checked, failures)."""
    objs_a = spec.sampler_a(model, n, stream.child("A"))
    objs_b = spec.sampler_b(model, n, stream.child("B"))
    checked = failures = 0
    if spec.transform is not None:
        transformed = []
        for obj in objs_a:
            out = spec.transform(obj)
            if spec.condition is not None:
                if spec.condition(out) != spec.condition(obj):
                    raise RuntimeError(
                        f"{spec.label}: transform moved a path across the "
                        "conditioning event")
            if spec.exact_check is not None:
                checked += 1
                if not spec.exact_check(obj, out):
                    failures += 1
            transformed.append(out)
    else:
        transformed = objs_a

    model_json = json.dumps(model.to_config(), sort_keys=True)
    reports = []
    passed = True
    for test in spec.tests:
        x_a = np.asarray([test.f_a(o) for o in transformed], dtype=float)
        x_b = np.asarray([test.f_b(o) for o in objs_b], dtype=float)
        if test.kind == "perm":
            gen = stream.child("perm", test.functional).generator()
            stat, p = permutation_ks(x_a, x_b, gen)
        else:
            stat, p = ks_two_sample(x_a, x_b)
        if test.expect_reject:
            verdict = "Reject" if p < REJECT_ALPHA else "Pass"
            ok = verdict == "Reject"
        else:
            verdict = "Pass" if p > PER_FUNCTIONAL_ALPHA else "Reject"
            ok = verdict == "Pass"
        if test.required and not ok:
            passed = False
        reports.append(TestReport(spec.label, test.functional, x_a.size,
                                  x_b.size, stat, p, verdict, seed,
                                  model_json))
    return reports, passed and failures == 0, checked, failures


def _null_spec(spec: _SuiteSpec) -> _SuiteSpec:
    """The identity version of a spec: no transform, half B mirrors half A."""
    tests = tuple(_TestDef(t.functional, t.f_a, t.f_a, t.kind, t.required,
                           False) for t in spec.tests)
    return _SuiteSpec(spec.label + "[null]", spec.sampler_a, spec.sampler_a,
                      None, None, tests, None)


def run_suite(name: str, model: Optional[LevyModel] = None, n: int = 2000,
              seed: int = DEFAULT_SEED, identity_null: bool = False,
              **params) -> SuiteResult:
    """Run one named suite and aggregate its reports.

    ``n`` is the sample count per half.  The invariance suites pass at any
    size; the negative control only rejects dependably at the sizes in
    :data:`DEFAULT_SUITE_SIZES` (its effect size is a KS distance of about
    0.028).  ``identity_null`` replaces the transformation with the identity
    and mirrors the functional pairs, so a correct harness passes at nominal
    rates; it is unavailable for the negative-control suite, whose whole
    point is to differ.  Extra keyword parameters reach the suite builder
    (``x_values``, ``depth``, ``fractions``, ``mass_factor``).
    """
    if name not in _SUITE_BUILDERS:
        raise ValueError(f"unknown suite {name!r}; known: "
                         f"{', '.join(SUITE_NAMES)}")
    if identity_null and name == "negative_control":
        raise ValueError("the negative-control suite has no null version")
    if model is None:
        model = default_model()
    specs = _SUITE_BUILDERS[name](model, dict(params))
    if identity_null:
        specs = [_null_spec(s) for s in specs]
    stream = RngStream(seed).child("verify", name)
    reports: list = []
    passed = True
    checked = failures = 0
    for spec in specs:
        sub = stream.child(spec.label)
        rep, ok, chk, fail = _run_spec(spec, model, n, sub, seed)
        reports.extend(rep)
        passed = passed and ok
        checked += chk
        failures += fail
    return SuiteResult(name, tuple(reports), passed, checked, failures)


def run_suites(names=None, model: Optional[LevyModel] = None,
               n: Optional[int] = None, seed: int = DEFAULT_SEED,
               n_by_suite: Optional[dict] = None, **params) -> list:
    """Run several suites; returns a list of :class:`SuiteResult`.

    When ``n`` is omitted each suite uses its entry in
    :data:`DEFAULT_SUITE_SIZES` (the negative control needs a much larger
    sample than the invariance suites to reject dependably).  ``n_by_suite``
    overrides the per-half count for individual suites either way.
    """
    if names is None:
        names = SUITE_NAMES
    results = []
    for name in names:
        if n_by_suite is not None and name in n_by_suite:
            count = int(n_by_suite[name])
        elif n is not None:
            count = int(n)
        else:
            count = DEFAULT_SUITE_SIZES.get(name, 2000)
        results.append(run_suite(name, model=model, n=count, seed=seed,
                                 **params))
    return results

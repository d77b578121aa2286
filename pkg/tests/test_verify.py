"""Tests for the two-sample harness: KS machinery, functional catalog,
suite execution, determinism, and the negative control's structure.

Statistical assertions run at reduced sizes with frozen seeds; the
full-size runs live in the acceptance tests.
"""

from __future__ import annotations

import json

import numpy as np
import pytest
import scipy.stats

from levyexc.paths import EventPath
from levyexc.simulate import RngStream
from levyexc.verify import (
    DEFAULT_SEED,
    DEFAULT_SUITE_SIZES,
    PER_FUNCTIONAL_ALPHA,
    REJECT_ALPHA,
    SUITE_NAMES,
    default_model,
    functional_by_name,
    ks_null_calibration,
    ks_statistic,
    ks_two_sample,
    permutation_ks,
    reports_to_csv,
    reports_to_json,
    run_suite,
    run_suites,
    suite_sampler,
)

EXC = EventPath(1.0, 1.0, ((0.5, -1.0, 2.0), (2.5, -1.0, 0.0)))


class TestKsTwoSample:
    def test_identical_arrays(self):
        x = np.linspace(0.0, 1.0, 500)
        d, p = ks_two_sample(x, x.copy())
        assert d == 0.0
        assert p == 1.0

    def test_degenerate_constant_samples(self):
        d, p = ks_two_sample(np.ones(200), np.ones(300))
        assert d == 0.0
        assert p == 1.0

    def test_separated_supports_reject(self):
        g = RngStream(11).child("sep").generator()
        a = g.standard_normal(1000)
        b = g.standard_normal(1000) + 100.0
        d, p = ks_two_sample(a, b)
        assert d == 1.0
        assert p < 1e-6

    def test_matches_scipy_asymptotic(self):
        g = RngStream(11).child("scipy").generator()
        a = g.standard_normal(800)
        b = g.standard_normal(900) + 0.05
        d, p = ks_two_sample(a, b)
        ref = scipy.stats.ks_2samp(a, b, method="asymp")
        assert d == pytest.approx(ref.statistic, rel=0, abs=1e-15)
        # scipy's asymptotic mode applies a slightly different finite-size
        # evaluation; agreement to a few percent is the right check.
        assert p == pytest.approx(ref.pvalue, rel=0.05, abs=1e-12)

    def test_statistic_with_ties(self):
        # Largest CDF gap is at 0.5: F_a = 3/6 vs F_b = 1/4.
        a = np.array([0.0, 0.5, 0.5, 1.0, 2.0, 3.0])
        b = np.array([0.5, 1.0, 1.0, 2.0])
        assert ks_statistic(a, b) == pytest.approx(3 / 6 - 1 / 4)

    def test_rejects_empty_or_2d(self):
        with pytest.raises(ValueError):
            ks_two_sample([], [1.0])
        with pytest.raises(ValueError):
            ks_two_sample(np.zeros((3, 3)), [1.0])


class TestPermutationKs:
    def test_observed_equals_ks_statistic(self):
        g = RngStream(3).child("perm").generator()
        a = g.integers(0, 6, 300).astype(float)
        b = g.integers(0, 6, 400).astype(float)
        d, _ = permutation_ks(a, b, RngStream(3).child("p2").generator())
        # Same statistic up to the float accumulation of the weight cumsum.
        assert d == pytest.approx(ks_statistic(a, b), abs=1e-12)

    def test_deterministic_given_stream(self):
        g = RngStream(5).child("data").generator()
        a = g.integers(0, 4, 200).astype(float)
        b = g.integers(0, 4, 200).astype(float)
        r1 = permutation_ks(a, b, RngStream(6).child("perm").generator())
        r2 = permutation_ks(a, b, RngStream(6).child("perm").generator())
        assert r1 == r2

    def test_separated_samples_hit_the_floor(self):
        a = np.zeros(100)
        b = np.ones(100)
        d, p = permutation_ks(a, b, RngStream(7).generator(),
                              n_permutations=2000)
        assert d == pytest.approx(1.0, abs=1e-12)
        assert p == pytest.approx(1 / 2001)

    def test_null_integer_samples_pass(self):
        g = RngStream(8).child("null").generator()
        a = g.poisson(3.0, 500).astype(float)
        b = g.poisson(3.0, 500).astype(float)
        _, p = permutation_ks(a, b, RngStream(8).child("perm").generator())
        assert p > PER_FUNCTIONAL_ALPHA

    def test_needs_a_permutation(self):
        with pytest.raises(ValueError):
            permutation_ks([1.0], [2.0], RngStream(1).generator(),
                           n_permutations=0)


class TestNullCalibration:
    def test_rate_in_band_at_acceptance_settings(self):
        # Band around the nominal 0.05 at 1000 repetitions, shipped seed.
        rate = ks_null_calibration(n=2000, repetitions=1000, alpha=0.05)
        assert 0.035 <= rate <= 0.065

    def test_deterministic(self):
        r1 = ks_null_calibration(n=200, repetitions=50, seed=3)
        r2 = ks_null_calibration(n=200, repetitions=50, seed=3)
        assert r1 == r2


class TestFunctionalByName:
    def test_plain_functionals(self):
        assert functional_by_name("lifetime")(EXC) == pytest.approx(3.0)
        assert functional_by_name("height")(EXC) == pytest.approx(2.5)
        assert functional_by_name("area")(EXC) == pytest.approx(EXC.area())
        assert functional_by_name("jump_count")(EXC) == 2.0
        assert functional_by_name("max_jump")(EXC) == 2.0

    def test_fraction_functionals(self):
        # At t = 1.5 the excursion sits at 2.5 - (1.5 - 0.5) = 1.5.
        f = functional_by_name("value_at_fraction:0.5")
        assert f(EXC) == pytest.approx(1.5)
        # Drift crossings: level 1.25 only by the final descent; level 0.75
        # by both descending segments.
        assert functional_by_name("crossing_count_at_fraction:0.5")(EXC) == 1.0
        assert functional_by_name("crossing_count_at_fraction:0.3")(EXC) == 2.0

    def test_plain_rejects_parameter(self):
        with pytest.raises(ValueError):
            functional_by_name("area:0.5")

    def test_fraction_requires_parameter(self):
        with pytest.raises(ValueError):
            functional_by_name("value_at_fraction")

    def test_fraction_range(self):
        with pytest.raises(ValueError):
            functional_by_name("value_at_fraction:1.5")

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown functional"):
            functional_by_name("entropy")


EXPECTED_REPORT_COUNTS = {
    "sup_swap": 6,
    "pre_sup_rotation": 4,
    "post_sup_rotation": 4,
    "killed_passage_rotation": 8,
    "sup_excursion_rotation": 4,
    "loctime_reversal": 2,
    "width_reversal": 3,
    "negative_control": 2,
}


class TestSuiteRuns:
    @pytest.mark.parametrize("name", [n for n in SUITE_NAMES
                                      if n != "negative_control"])
    def test_invariance_suite_passes_small(self, name):
        result = run_suite(name, n=300, seed=DEFAULT_SEED)
        assert result.suite == name
        assert result.passed
        assert result.exact_failures == 0
        assert len(result.reports) == EXPECTED_REPORT_COUNTS[name]
        assert all(r.verdict == "Pass" for r in result.reports)
        assert all(r.n_a == 300 and r.n_b == 300 for r in result.reports)

    def test_exactness_tallies(self):
        result = run_suite("sup_swap", n=300, seed=DEFAULT_SEED)
        assert result.exact_checked == 300
        # Rotation suites check the transformed half of every sub-spec.
        killed = run_suite("killed_passage_rotation", n=200, seed=DEFAULT_SEED)
        assert killed.exact_checked == 400
        # Pure relabelling suites have nothing to check exactly.
        loctime = run_suite("loctime_reversal", n=300, seed=DEFAULT_SEED)
        assert loctime.exact_checked == 0

    def test_identity_null_passes(self):
        result = run_suite("sup_swap", n=300, seed=DEFAULT_SEED,
                           identity_null=True)
        assert result.passed
        assert result.exact_checked == 0
        assert all(r.suite.endswith("[null]") for r in result.reports)

    def test_unknown_suite(self):
        with pytest.raises(ValueError, match="unknown suite"):
            run_suite("nope")

    def test_suite_params_validated(self):
        with pytest.raises(ValueError):
            run_suite("loctime_reversal", n=100, fractions=(0.0,))
        with pytest.raises(ValueError):
            run_suite("killed_passage_rotation", n=100, x_values=(-1.0,))


class TestNegativeControl:
    def test_structure_and_underpowered_verdict(self):
        result = run_suite("negative_control", n=2000, seed=DEFAULT_SEED)
        by_name = {r.functional: r for r in result.reports}
        mismatch = by_name["lifetime_mass_mismatch"]
        info = by_name["abs_area_pre_vs_post"]
        # The mismatch pair carries the gate: the suite passes iff it
        # rejects.  The two lifetime laws differ by a KS distance of only
        # ~0.028, far below what 2000 samples can push past the 1e-6
        # threshold, so this small run must come back non-rejecting.
        assert mismatch.verdict == "Pass"
        assert mismatch.p_value > REJECT_ALPHA
        assert not result.passed
        # The informational pair is hugely separated but never gates.
        assert info.verdict == "Reject"
        assert info.p_value < REJECT_ALPHA

    def test_shipped_size_is_powered(self):
        assert DEFAULT_SUITE_SIZES["negative_control"] == 40000

    def test_no_null_version(self):
        with pytest.raises(ValueError):
            run_suite("negative_control", identity_null=True)

    def test_needs_jumps(self):
        from levyexc.models import LevyModel, NullJumps
        with pytest.raises(ValueError):
            run_suite("negative_control", n=100,
                      model=LevyModel(alpha=1.0, beta=0.0, jumps=NullJumps()))


class TestRunSuites:
    def test_subset_and_order(self):
        results = run_suites(["loctime_reversal", "sup_swap"], n=200,
                             seed=DEFAULT_SEED)
        assert [r.suite for r in results] == ["loctime_reversal", "sup_swap"]

    def test_n_by_suite_override(self):
        results = run_suites(["sup_swap", "loctime_reversal"], n=200,
                             n_by_suite={"loctime_reversal": 150},
                             seed=DEFAULT_SEED)
        assert results[0].reports[0].n_a == 200
        assert results[1].reports[0].n_a == 150

    def test_default_sizes_cover_all_suites(self):
        assert set(DEFAULT_SUITE_SIZES) == set(SUITE_NAMES)


class TestDeterminism:
    def test_byte_identical_reports(self):
        a = run_suite("sup_swap", n=700, seed=9)
        b = run_suite("sup_swap", n=700, seed=9)
        assert reports_to_csv(a.reports) == reports_to_csv(b.reports)

    def test_independent_of_thread_count(self, monkeypatch):
        base = run_suite("pre_sup_rotation", n=700, seed=9)
        monkeypatch.setenv("LEVYEXC_THREADS", "4")
        threaded = run_suite("pre_sup_rotation", n=700, seed=9)
        assert reports_to_csv(base.reports) == reports_to_csv(
            threaded.reports)

    def test_seed_changes_reports(self):
        a = run_suite("loctime_reversal", n=300, seed=1)
        b = run_suite("loctime_reversal", n=300, seed=2)
        assert reports_to_csv(a.reports) != reports_to_csv(b.reports)


class TestReportsSerialization:
    def test_csv_shape_and_roundtrip_floats(self):
        result = run_suite("loctime_reversal", n=200, seed=DEFAULT_SEED)
        text = reports_to_csv(result.reports)
        lines = text.strip().split("\n")
        assert lines[0].startswith("suite,functional,n_a,n_b,statistic")
        assert len(lines) == 1 + len(result.reports)
        first = lines[1].split(",")
        assert float(first[4]) == result.reports[0].statistic

    def test_json_roundtrip(self):
        result = run_suite("loctime_reversal", n=200, seed=DEFAULT_SEED)
        data = json.loads(reports_to_json(result.reports))
        assert len(data) == len(result.reports)
        assert data[0]["suite"] == "loctime_reversal"
        assert data[0]["p_value"] == result.reports[0].p_value


class TestSuiteSampler:
    def test_returns_deterministic_sampler(self):
        sampler = suite_sampler("sup_swap")
        model = default_model()
        a = sampler(model, 50, RngStream(4).child("s"))
        b = sampler(model, 50, RngStream(4).child("s"))
        assert [p.lifetime for p in a] == [p.lifetime for p in b]
        assert len(a) == 50

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            suite_sampler("nope")

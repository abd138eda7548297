import math

import numpy as np
import pytest

from hetmed.bounds import (
    BOUND_NAMES,
    GAUSSIAN_DENSITY_CONSTANT,
    MEDIAN_LOWER_COEFF,
    MEDIAN_LOWER_TRIM_COEFF,
    MEDIAN_UPPER_COEFF_GAUSSIAN,
    VarianceProfile,
    compare_all,
    devroye_bound,
    dominance_check,
    mean_deviation_bound,
    median_lower_bound_gaussian,
    median_upper_bound,
    median_upper_bound_gaussian,
    mle_deviation_bound,
    trimmed_inverse_scale_sum,
    xia_bound,
)
from hetmed.verify import random_profile

# Independently computed with 30-digit arithmetic.
REF_GAUSSIAN_C = 0.24197072451914335
REF_UPPER_COEFF = 2.9222823653222779
REF_LOWER_COEFF = 0.12978492839750394
REF_TRIM_COEFF = 0.051776695296636881
REF_THM1_N1000_D01 = 0.1859838463447441  # profile [1]*1000, delta 0.1, j = 140
REF_THM2_N1000_D01 = 0.0062402439070831405  # same profile, j = 2
REF_XIA_N1000_D01 = 0.22115586058313996
REF_DEVROYE_N10000_D01_B1 = 64.845081541758467


def ones(n):
    return VarianceProfile((1.0,) * n)


class TestVarianceProfile:
    def test_sorts_input(self):
        assert VarianceProfile((3.0, 1.0, 2.0)).sigmas == (1.0, 2.0, 3.0)

    @pytest.mark.parametrize("bad", [(), (0.0,), (-1.0,), (math.inf,), (math.nan,)])
    def test_rejects_invalid(self, bad):
        with pytest.raises(ValueError):
            VarianceProfile(bad)

    def test_summaries(self):
        p = VarianceProfile((1.0, 2.0))
        assert p.n == 2
        assert p.sum_of_squares() == 5.0
        assert p.inverse_square_sum() == 1.25


class TestTrimmedInverseScaleSum:
    def test_examples(self):
        assert trimmed_inverse_scale_sum(ones(4), 0) == 4.0
        assert trimmed_inverse_scale_sum(VarianceProfile((1.0, 2.0, 4.0)), 1) == 0.75
        assert trimmed_inverse_scale_sum(ones(1000), 140) == 860.0

    def test_trim_index_domain(self):
        with pytest.raises(ValueError):
            trimmed_inverse_scale_sum(ones(3), 3)
        with pytest.raises(ValueError):
            trimmed_inverse_scale_sum(ones(3), -1)


class TestMeanDeviationBound:
    def test_hand_values(self):
        r = mean_deviation_bound(ones(4), math.exp(-2.0))
        assert r.value == pytest.approx(1.0, rel=1e-12)
        assert r.applicable and r.bound_name == "mean_eq1" and r.trim_index == 0
        single = mean_deviation_bound(VarianceProfile((2.5,)), math.exp(-0.5))
        assert single.value == pytest.approx(2.5, rel=1e-12)

    def test_grows_with_largest_scale(self):
        base = VarianceProfile((1.0, 1.0, 1.0, 1.0))
        grown = VarianceProfile((1.0, 1.0, 1.0, 10.0))
        assert (
            mean_deviation_bound(grown, 0.1).value
            > mean_deviation_bound(base, 0.1).value
        )

    @pytest.mark.parametrize("delta", [0.0, 1.0, -0.5, 1.5])
    def test_delta_domain(self, delta):
        with pytest.raises(ValueError):
            mean_deviation_bound(ones(3), delta)


class TestMleDeviationBound:
    def test_hand_value(self):
        r = mle_deviation_bound(ones(1), math.exp(-0.5))
        assert r.value == pytest.approx(1.0, rel=1e-12)

    def test_vanishes_with_smallest_scale(self):
        r = mle_deviation_bound(VarianceProfile((1e-9, 1.0, 1.0)), 0.1)
        assert r.value < 1e-7

    def test_bounded_under_huge_scale(self):
        small = mle_deviation_bound(VarianceProfile((1.0, 1.0, 1e6)), 0.1).value
        huge = mle_deviation_bound(VarianceProfile((1.0, 1.0, 1e12)), 0.1).value
        assert huge == pytest.approx(small, rel=1e-9)

    def test_never_exceeds_mean_bound(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            profile = random_profile(rng, int(rng.integers(1, 60)))
            delta = float(rng.uniform(0.01, 0.99))
            assert (
                mle_deviation_bound(profile, delta).value
                <= mean_deviation_bound(profile, delta).value * (1 + 1e-12)
            )


class TestMedianUpperBound:
    def test_frozen_value(self):
        r = median_upper_bound(ones(1000), 0.1, GAUSSIAN_DENSITY_CONSTANT)
        assert r.applicable
        assert r.trim_index == 140
        assert r.value == pytest.approx(REF_THM1_N1000_D01, rel=1e-12)
        assert abs(r.value - 0.18599) < 2e-5

    def test_homogeneous_in_scales(self):
        base = VarianceProfile(tuple(np.linspace(0.5, 4.0, 50)))
        scaled = VarianceProfile(tuple(3.0 * s for s in base.sigmas))
        rb = median_upper_bound(base, 0.2, 0.2)
        rs = median_upper_bound(scaled, 0.2, 0.2)
        assert rs.value == pytest.approx(3.0 * rb.value, rel=1e-12)
        assert rs.trim_index == rb.trim_index

    def test_small_delta_inapplicable(self):
        n, c = 50, 0.3
        gate = math.exp(-2 * n * c * c)
        r = median_upper_bound(ones(n), gate * 0.5, c)
        assert not r.applicable
        assert r.value is None

    @pytest.mark.parametrize("c", [0.0, 1.0, -0.2, 2.0])
    def test_c_domain(self, c):
        with pytest.raises(ValueError):
            median_upper_bound(ones(10), 0.1, c)


class TestMedianUpperBoundGaussian:
    def test_constants(self):
        assert GAUSSIAN_DENSITY_CONSTANT == pytest.approx(REF_GAUSSIAN_C, rel=1e-15)
        assert MEDIAN_UPPER_COEFF_GAUSSIAN == pytest.approx(REF_UPPER_COEFF, rel=1e-15)
        # two-digit display form
        assert abs(MEDIAN_UPPER_COEFF_GAUSSIAN - 2.93) < 0.01

    def test_matches_general_bound(self):
        general = median_upper_bound(ones(1000), 0.1, GAUSSIAN_DENSITY_CONSTANT)
        gauss = median_upper_bound_gaussian(ones(1000), 0.1)
        assert gauss.bound_name == "median_cor1"
        assert gauss.value == general.value
        assert gauss.trim_index == general.trim_index

    def test_trim_insensitivity(self):
        # the bound must ignore the values of the j smallest scales entirely
        base = ones(100)
        r = median_upper_bound_gaussian(base, 0.1)
        assert r.trim_index >= 1
        rng = np.random.default_rng(3)
        perturbed = tuple(rng.uniform(0.01, 1.0, r.trim_index)) + (1.0,) * (
            100 - r.trim_index
        )
        r2 = median_upper_bound_gaussian(VarianceProfile(perturbed), 0.1)
        assert r2.value == r.value
        assert r2.trim_index == r.trim_index

    def test_gate_matches_explicit_form(self):
        n = 80
        gate = math.exp(-n / (math.e * math.pi))
        assert not median_upper_bound_gaussian(ones(n), gate * 0.9).applicable
        assert median_upper_bound_gaussian(ones(n), gate * 1.1).applicable


class TestMedianLowerBoundGaussian:
    def test_constants(self):
        assert MEDIAN_LOWER_COEFF == pytest.approx(REF_LOWER_COEFF, rel=1e-15)
        assert MEDIAN_LOWER_TRIM_COEFF == pytest.approx(REF_TRIM_COEFF, rel=1e-15)
        assert round(MEDIAN_LOWER_COEFF, 2) == 0.13
        assert round(MEDIAN_LOWER_TRIM_COEFF, 2) == 0.05

    def test_frozen_value(self):
        r = median_lower_bound_gaussian(ones(1000), 0.1)
        assert r.applicable
        assert r.trim_index == 2
        assert r.value == pytest.approx(REF_THM2_N1000_D01, rel=1e-12)
        assert "0.13" in r.applicability_note and "0.05" in r.applicability_note

    @pytest.mark.parametrize("delta", [0.3, 0.25, 0.9])
    def test_large_delta_inapplicable(self, delta):
        assert not median_lower_bound_gaussian(ones(1000), delta).applicable

    def test_small_delta_inapplicable(self):
        # below exp(-(sqrt(2)-1)^2 n) the report is flagged, not raised
        assert not median_lower_bound_gaussian(ones(100), 1e-9).applicable

    def test_below_upper_bound_when_both_apply(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            profile = random_profile(rng, int(rng.integers(20, 400)))
            delta = float(rng.uniform(0.01, 0.24))
            lower = median_lower_bound_gaussian(profile, delta)
            upper = median_upper_bound_gaussian(profile, delta)
            if lower.applicable and upper.applicable:
                assert lower.value < upper.value


class TestXiaBound:
    def test_frozen_value(self):
        r = xia_bound(ones(1000), 0.1)
        assert r.value == pytest.approx(REF_XIA_N1000_D01, rel=1e-12)
        assert r.applicable  # sigma_1 = 1 > 2 * 0.2212
        assert r.trim_index == 0

    def test_small_sigma1_inapplicable(self):
        profile = VarianceProfile((0.01,) + (1.0,) * 999)
        r = xia_bound(profile, 0.1)
        assert not r.applicable
        assert r.value is not None  # value still reported for display

    def test_homogeneous(self):
        base = VarianceProfile(tuple(np.linspace(1.0, 5.0, 30)))
        scaled = VarianceProfile(tuple(2.0 * s for s in base.sigmas))
        assert xia_bound(scaled, 0.2).value == pytest.approx(
            2.0 * xia_bound(base, 0.2).value, rel=1e-12
        )


class TestDevroyeBound:
    def test_frozen_value(self):
        r = devroye_bound(ones(10_000), 0.1, 1.0)
        assert r.applicable
        assert r.trim_index == 1
        assert r.value == pytest.approx(REF_DEVROYE_N10000_D01_B1, rel=1e-10)

    def test_vacuous_when_range_exceeds_n(self):
        r = devroye_bound(ones(100), 0.1, 1.0)
        assert not r.applicable
        assert "j-range exceeds n" in r.applicability_note

    def test_inverse_in_beta(self):
        one = devroye_bound(ones(10_000), 0.1, 1.0).value
        two = devroye_bound(ones(10_000), 0.1, 2.0).value
        assert two == one / 2.0

    def test_scan_matches_bruteforce(self):
        rng = np.random.default_rng(9)
        profile = random_profile(rng, 2000)
        delta, beta = 0.05, 0.7
        r = devroye_bound(profile, delta, beta)
        assert r.applicable
        n = profile.n
        limit = 8.0 * math.sqrt(2.0 * n * math.log(6.0 / delta))
        best = -math.inf
        for j in range(1, math.floor(limit) + 1):
            ratio = (limit + 1.0 - j) / math.fsum(
                1.0 / s for s in profile.sigmas[j - 1 :]
            )
            best = max(best, ratio)
        expected = (
            8.0 * math.e * math.sqrt(2.0)
            * max(math.log(3.0 / delta), math.log(n + 1.0))
            / beta
            * best
        )
        assert r.value == pytest.approx(expected, rel=1e-9)

    def test_beta_domain(self):
        with pytest.raises(ValueError):
            devroye_bound(ones(100), 0.1, 0.0)
        with pytest.raises(ValueError):
            devroye_bound(ones(100), 0.1, -1.0)


class TestDominanceCheck:
    def test_constant_profile(self):
        c = dominance_check(ones(4))
        assert c.holds
        assert c.lhs == pytest.approx(1.0, rel=1e-12)
        assert c.rhs == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert c.ratio == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert c.trim_index == 2

    def test_scale_invariant_verdict(self):
        profile = VarianceProfile(tuple(np.linspace(0.2, 7.0, 40)))
        scaled = VarianceProfile(tuple(13.0 * s for s in profile.sigmas))
        a, b = dominance_check(profile), dominance_check(scaled)
        assert a.holds == b.holds
        assert b.ratio == pytest.approx(a.ratio, rel=1e-12)

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            dominance_check(ones(3))

    def test_fails_for_five_point_profiles(self):
        # With ceil(sqrt(5)) = 3 scales trimmed, only two reciprocals remain
        # in the denominator and the comparison genuinely fails for mildly
        # spread profiles; n = 5 is the single sample size where the trimmed
        # sum drops below n/2 terms.
        for sigmas in [(1.0, 2.0, 3.0, 4.0, 5.0), (0.6, 0.8, 1.0, 1.2, 1.4)]:
            check = dominance_check(VarianceProfile(sigmas))
            assert not check.holds
            assert check.trim_index == 3
        # every other small n holds even for the same shapes
        for n in [4, 6, 7, 8, 9, 10]:
            sigmas = tuple(float(i) for i in range(1, n + 1))
            assert dominance_check(VarianceProfile(sigmas)).holds


class TestCompareAll:
    def test_contains_every_bound_once(self):
        reports = compare_all(ones(1000), 0.1, beta=1.0)
        assert sorted(r.bound_name for r in reports) == sorted(BOUND_NAMES)

    def test_matches_direct_calls(self):
        profile = ones(1000)
        reports = {r.bound_name: r for r in compare_all(profile, 0.1, beta=1.0)}
        assert reports["median_cor1"].value == pytest.approx(
            REF_THM1_N1000_D01, rel=1e-12
        )
        assert reports["median_thm1"].value == reports["median_cor1"].value
        assert reports["median_lower_thm2"].value == pytest.approx(
            REF_THM2_N1000_D01, rel=1e-12
        )
        assert reports["xia_prop1"].value == pytest.approx(
            REF_XIA_N1000_D01, rel=1e-12
        )
        assert reports["mean_eq1"].value == mean_deviation_bound(profile, 0.1).value
        assert reports["mle_eq2"].value == mle_deviation_bound(profile, 0.1).value

    def test_applicable_sorted_ascending(self):
        reports = compare_all(ones(1000), 0.1, beta=1.0)
        applicable = [r for r in reports if r.applicable]
        values = [r.value for r in applicable]
        assert values == sorted(values)
        # inapplicable entries trail the list
        flags = [r.applicable for r in reports]
        assert flags == sorted(flags, reverse=True)

    def test_beta_omitted_flags_devroye(self):
        reports = {r.bound_name: r for r in compare_all(ones(1000), 0.1)}
        assert not reports["devroye_eq4"].applicable
        assert "beta not supplied" in reports["devroye_eq4"].applicability_note

    def test_custom_family_constant(self):
        cauchy_c = 1.0 / (2.0 * math.pi)
        reports = {
            r.bound_name: r
            for r in compare_all(ones(1000), 0.1, c_const=cauchy_c)
        }
        direct = median_upper_bound(ones(1000), 0.1, cauchy_c)
        assert reports["median_thm1"].value == direct.value
        # the Gaussian specialisation is untouched by c_const
        assert reports["median_cor1"].value == pytest.approx(
            REF_THM1_N1000_D01, rel=1e-12
        )


class TestSharedProperties:
    def test_homogeneity_across_all_bounds(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            profile = random_profile(rng, int(rng.integers(10, 300)))
            c = float(rng.uniform(0.5, 20.0))
            scaled = VarianceProfile(tuple(c * s for s in profile.sigmas))
            delta = float(rng.uniform(0.02, 0.24))
            before = {r.bound_name: r for r in compare_all(profile, delta, beta=1.0)}
            after = {r.bound_name: r for r in compare_all(scaled, delta, beta=1.0)}
            for name in BOUND_NAMES:
                if before[name].applicable and after[name].applicable:
                    assert after[name].value == pytest.approx(
                        c * before[name].value, rel=1e-9
                    )

    def test_delta_monotonicity(self):
        profile = VarianceProfile(tuple([0.5, 1.0, 2.0, 4.0] * 25))
        deltas = [0.9, 0.5, 0.249, 0.2, 0.1, 0.05, 0.01, 1e-3]
        values = {name: [] for name in BOUND_NAMES}
        for delta in deltas:
            for r in compare_all(profile, delta, beta=1.0):
                if r.applicable:
                    values[r.bound_name].append(r.value)
        for name, series in values.items():
            for lo, hi in zip(series, series[1:]):
                assert hi >= lo * (1 - 1e-12), name

    def test_bounded_under_one_huge_scale(self):
        for name in ("median_thm1", "median_cor1", "median_lower_thm2", "xia_prop1"):
            grown = {
                m: {
                    r.bound_name: r
                    for r in compare_all(
                        VarianceProfile((1.0,) * 99 + (m,)), 0.1, beta=1.0
                    )
                }
                for m in (1e9, 1e12)
            }
            a, b = grown[1e9][name], grown[1e12][name]
            if a.applicable and b.applicable:
                assert b.value == pytest.approx(a.value, rel=1e-9)
        # the plain-mean bound diverges in the same limit
        mean_a = mean_deviation_bound(VarianceProfile((1.0,) * 99 + (1e9,)), 0.1)
        mean_b = mean_deviation_bound(VarianceProfile((1.0,) * 99 + (1e12,)), 0.1)
        assert mean_b.value > 100.0 * mean_a.value

    def test_report_invariants(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            profile = random_profile(rng, int(rng.integers(5, 200)))
            delta = float(rng.uniform(1e-3, 0.999))
            for r in compare_all(profile, delta, beta=2.0):
                if r.applicable:
                    assert r.value >= 0.0
                    if r.bound_name.startswith("median"):
                        assert r.trim_index < profile.n
                assert r.delta == delta

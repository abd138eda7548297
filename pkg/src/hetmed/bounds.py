"""Closed-form deviation bounds driven by an ascending scale profile.

Each evaluator returns a :class:`BoundReport`.  Bounds whose hypotheses fail
for the supplied ``delta`` come back flagged inapplicable rather than raising,
because callers routinely sweep ``delta`` across validity boundaries.  All
logarithms are natural.  Computations use exact closed-form constants; the
rounded two-digit forms appear only in display strings.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "BOUND_NAMES",
    "BoundReport",
    "DominanceCheck",
    "GAUSSIAN_DENSITY_CONSTANT",
    "MEDIAN_LOWER_COEFF",
    "MEDIAN_LOWER_COEFF_DISPLAY",
    "MEDIAN_LOWER_TRIM_COEFF",
    "MEDIAN_LOWER_TRIM_COEFF_DISPLAY",
    "MEDIAN_UPPER_COEFF_GAUSSIAN",
    "VarianceProfile",
    "compare_all",
    "devroye_bound",
    "dominance_check",
    "mean_deviation_bound",
    "median_lower_bound_gaussian",
    "median_upper_bound",
    "median_upper_bound_gaussian",
    "mle_deviation_bound",
    "trimmed_inverse_scale_sum",
    "xia_bound",
]

# Density of the unit Gaussian at 1; the largest C valid for Gaussian data.
GAUSSIAN_DENSITY_CONSTANT = math.exp(-0.5) / math.sqrt(2.0 * math.pi)
# 1 / (C * sqrt(2)) for the Gaussian C above, i.e. sqrt(pi) * exp(1/2).
MEDIAN_UPPER_COEFF_GAUSSIAN = 1.0 / (GAUSSIAN_DENSITY_CONSTANT * math.sqrt(2.0))
# Exact coefficients of the Gaussian lower bound and its trim index.
MEDIAN_LOWER_COEFF = (2.0 - math.sqrt(2.0)) * math.sqrt(math.pi) / 8.0
MEDIAN_LOWER_TRIM_COEFF = (math.sqrt(2.0) - 1.0) / 8.0
MEDIAN_LOWER_COEFF_DISPLAY = 0.13
MEDIAN_LOWER_TRIM_COEFF_DISPLAY = 0.05
# Harmonic-mean bound constants.
XIA_COEFF = math.sqrt(2.0) / 0.35
DEVROYE_PREFACTOR = 8.0 * math.e * math.sqrt(2.0)

BOUND_NAMES = (
    "mean_eq1",
    "mle_eq2",
    "median_thm1",
    "median_cor1",
    "median_lower_thm2",
    "xia_prop1",
    "devroye_eq4",
)


@dataclass(frozen=True)
class VarianceProfile:
    """Ascending, strictly positive scale parameters sigma_1 <= ... <= sigma_n.

    Unsorted input is sorted by the constructor; the estimators never see the
    order anyway, so nothing is lost.
    """

    sigmas: tuple[float, ...]

    def __post_init__(self):
        sigmas = tuple(sorted(float(s) for s in self.sigmas))
        if not sigmas:
            raise ValueError("profile needs at least one scale")
        if any(not (math.isfinite(s) and s > 0.0) for s in sigmas):
            raise ValueError("every scale must be finite and strictly positive")
        object.__setattr__(self, "sigmas", sigmas)

    @property
    def n(self) -> int:
        return len(self.sigmas)

    def sum_of_squares(self) -> float:
        return math.fsum(s * s for s in self.sigmas)

    def inverse_square_sum(self) -> float:
        return math.fsum(s**-2.0 for s in self.sigmas)


@dataclass(frozen=True)
class BoundReport:
    """One evaluated deviation bound.

    ``value`` is the half-width of the certified interval, or None when the
    formula itself cannot be evaluated.  ``trim_index`` is the number of
    smallest scales the bound ignores (0 where trimming plays no role).
    """

    bound_name: str
    value: float | None
    delta: float
    trim_index: int = 0
    applicable: bool = True
    applicability_note: str = ""


def _require_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def trimmed_inverse_scale_sum(profile: VarianceProfile, j: int) -> float:
    """Sum of 1/sigma_i over the n - j largest scales."""
    if not 0 <= j < profile.n:
        raise ValueError(f"trim index must satisfy 0 <= j < n = {profile.n}, got {j}")
    return math.fsum(1.0 / s for s in profile.sigmas[j:])


def mean_deviation_bound(profile: VarianceProfile, delta: float) -> BoundReport:
    """Sub-Gaussian tail bound for the plain average: sqrt(2 sum(s^2) log(1/d)) / n.

    Grows without bound when the largest scale does; see
    :func:`median_upper_bound` for the contrast.
    """
    _require_delta(delta)
    value = math.sqrt(2.0 * profile.sum_of_squares() * math.log(1.0 / delta)) / profile.n
    return BoundReport("mean_eq1", value, delta)


def mle_deviation_bound(profile: VarianceProfile, delta: float) -> BoundReport:
    """Tail bound of the inverse-variance weighted mean: sqrt(2 log(1/d) / sum(s^-2)).

    The benchmark no scale-blind estimator can reach; it stays finite as the
    largest scale grows and vanishes as the smallest one shrinks.
    """
    _require_delta(delta)
    value = math.sqrt(2.0 * math.log(1.0 / delta) / profile.inverse_square_sum())
    return BoundReport("mle_eq2", value, delta)


def median_upper_bound(
    profile: VarianceProfile, delta: float, c_const: float
) -> BoundReport:
    """Trimmed harmonic-sum bound on the median deviation.

    ``c_const`` is the density floor of the model: each unit observation must
    satisfy P(0 <= Z <= t) >= c_const * t for t <= 1.  The bound drops the
    j smallest scales, j = floor(sqrt(n log(1/d)) / (C sqrt(2))), and reads

        sqrt(n log(2/d)) / (C sqrt(2) * sum_{i>j} 1/sigma_i).

    Requires delta > exp(-2 n C^2); smaller deltas yield an inapplicable
    report, not an exception.
    """
    if not 0.0 < c_const < 1.0:
        raise ValueError(f"c_const must lie in (0, 1), got {c_const}")
    _require_delta(delta)
    n = profile.n
    gate = math.exp(-2.0 * n * c_const * c_const)
    coeff = 1.0 / (c_const * math.sqrt(2.0))
    if delta <= gate:
        return BoundReport(
            "median_thm1",
            None,
            delta,
            0,
            False,
            f"requires delta > exp(-2*n*C^2) = {gate:.6g}",
        )
    j = math.floor(coeff * math.sqrt(n * math.log(1.0 / delta)))
    if j >= n:
        # Unreachable once the gate above passed; kept as a hard guard.
        return BoundReport(
            "median_thm1", None, delta, 0, False, f"trim index {j} reached n = {n}"
        )
    value = coeff * math.sqrt(n * math.log(2.0 / delta)) / trimmed_inverse_scale_sum(
        profile, j
    )
    return BoundReport("median_thm1", value, delta, j)


def median_upper_bound_gaussian(profile: VarianceProfile, delta: float) -> BoundReport:
    """Gaussian specialisation of :func:`median_upper_bound`.

    Uses the exact constant C = exp(-1/2)/sqrt(2 pi) ~= 0.241971, so the
    leading coefficient is sqrt(pi) e^(1/2) ~= 2.92244 (displayed as 2.93).
    """
    report = median_upper_bound(profile, delta, GAUSSIAN_DENSITY_CONSTANT)
    return replace(report, bound_name="median_cor1")


def median_lower_bound_gaussian(profile: VarianceProfile, delta: float) -> BoundReport:
    """Matching lower bound on the Gaussian median deviation.

    With probability at least delta the median deviates by at least

        0.129786 * sqrt(n log(1/d)) / sum_{i>j} 1/sigma_i,

    j = floor(0.051777 * sqrt(n log(1/d))).  Valid for
    delta in (exp(-(sqrt(2)-1)^2 n), 1/4); outside that window the report is
    flagged inapplicable.
    """
    _require_delta(delta)
    n = profile.n
    low_gate = math.exp(-((math.sqrt(2.0) - 1.0) ** 2) * n)
    note = (
        f"exact coefficients {MEDIAN_LOWER_COEFF:.6f}/{MEDIAN_LOWER_TRIM_COEFF:.6f} "
        f"(display constants {MEDIAN_LOWER_COEFF_DISPLAY}/{MEDIAN_LOWER_TRIM_COEFF_DISPLAY})"
    )
    if not low_gate < delta < 0.25:
        return BoundReport(
            "median_lower_thm2",
            None,
            delta,
            0,
            False,
            f"requires delta in ({low_gate:.6g}, 0.25); " + note,
        )
    j = math.floor(MEDIAN_LOWER_TRIM_COEFF * math.sqrt(n * math.log(1.0 / delta)))
    if j >= n:
        return BoundReport(
            "median_lower_thm2", None, delta, 0, False, f"trim index {j} reached n = {n}"
        )
    value = (
        MEDIAN_LOWER_COEFF
        * math.sqrt(n * math.log(1.0 / delta))
        / trimmed_inverse_scale_sum(profile, j)
    )
    return BoundReport("median_lower_thm2", value, delta, j, True, note)


def xia_bound(profile: VarianceProfile, delta: float) -> BoundReport:
    """Untrimmed harmonic-sum bound, valid only when the smallest scale is large.

    value = (sqrt(2)/0.35) * sqrt(n log(2/d)) / sum_i 1/sigma_i.  The bound
    holds when sigma_1 exceeds twice that value; otherwise the report keeps
    the value for display but is flagged inapplicable (the trimmed median
    bound carries no such restriction).
    """
    _require_delta(delta)
    value = (
        XIA_COEFF
        * math.sqrt(profile.n * math.log(2.0 / delta))
        / trimmed_inverse_scale_sum(profile, 0)
    )
    sigma1 = profile.sigmas[0]
    threshold = 2.0 * value
    if sigma1 > threshold:
        return BoundReport("xia_prop1", value, delta)
    return BoundReport(
        "xia_prop1",
        value,
        delta,
        0,
        False,
        f"needs smallest scale > {threshold:.6g}, got {sigma1:.6g}; "
        "the trimmed median bound covers this regime without the restriction",
    )


def devroye_bound(profile: VarianceProfile, delta: float, beta: float) -> BoundReport:
    """Adaptive-trim bound requiring an exponential lower tail.

    ``beta`` is the tail constant in P(|Z| >= t) >= exp(-beta * t); Gaussian
    tails fail that condition for large t, which the note records.  The value
    is DEVROYE_PREFACTOR * max(log(3/d), log(n+1)) / beta times an exact scan
    of (L + 1 - j) / sum_{i>=j} 1/sigma_i over integer j in [1, floor(L)],
    L = 8 sqrt(2 n log(6/d)).  The scan is exhaustive because the ratio need
    not be monotone for arbitrary profiles.  If floor(L) >= n the bound is
    vacuous and the report says so.
    """
    _require_delta(delta)
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    n = profile.n
    tail_note = "assumes P(|Z| >= t) >= exp(-beta t); Gaussian tails fail this for large t"
    limit = 8.0 * math.sqrt(2.0 * n * math.log(6.0 / delta))
    j_max = math.floor(limit)
    if j_max < 1:
        return BoundReport(
            "devroye_eq4", None, delta, 0, False, "j-range is empty; " + tail_note
        )
    if j_max >= n:
        return BoundReport(
            "devroye_eq4",
            None,
            delta,
            0,
            False,
            f"j-range exceeds n ({j_max} >= {n}); " + tail_note,
        )
    inv = 1.0 / np.asarray(profile.sigmas)
    # suffix[j-1] = sum_{i=j}^{n} 1/sigma_i (1-indexed j)
    suffix = np.cumsum(inv[::-1])[::-1]
    js = np.arange(1, j_max + 1)
    ratios = (limit + 1.0 - js) / suffix[: j_max]
    best = int(np.argmax(ratios))
    prefix = DEVROYE_PREFACTOR * max(math.log(3.0 / delta), math.log(n + 1.0)) / beta
    value = prefix * float(ratios[best])
    return BoundReport("devroye_eq4", value, delta, int(js[best]), True, tail_note)


@dataclass(frozen=True)
class DominanceCheck:
    """Outcome of the trimmed-median vs. mean-bound comparison."""

    holds: bool
    lhs: float
    rhs: float
    ratio: float
    trim_index: int
    n: int


def dominance_check(profile: VarianceProfile) -> DominanceCheck:
    """Compare sqrt(n) / sum_{i > ceil(sqrt(n))} 1/sigma_i against 2 sqrt(2 sum s^2) / n.

    Returns whether the left side is dominated and the ratio rhs/lhs.
    Requires n >= 4.  Note the trim drops ceil(sqrt(n)) scales; at n = 5 that
    is one scale more than n/2 coverage allows, and the comparison can fail
    there (e.g. sigmas 1..5).
    """
    n = profile.n
    if n < 4:
        raise ValueError(f"dominance check needs n >= 4, got n = {n}")
    j = math.isqrt(n)
    if j * j < n:
        j += 1
    lhs = math.sqrt(n) / trimmed_inverse_scale_sum(profile, j)
    rhs = 2.0 * math.sqrt(2.0 * profile.sum_of_squares()) / n
    return DominanceCheck(lhs <= rhs, lhs, rhs, rhs / lhs, j, n)


def compare_all(
    profile: VarianceProfile,
    delta: float,
    beta: float | None = None,
    c_const: float | None = None,
) -> list[BoundReport]:
    """Evaluate every bound on one profile; one report per bound name.

    ``c_const`` feeds the general median bound (Gaussian constant when
    omitted); ``beta`` enables the exponential-tail bound.  Applicable
    entries come first, sorted ascending by value.
    """
    if c_const is None:
        c_const = GAUSSIAN_DENSITY_CONSTANT
    reports = [
        mean_deviation_bound(profile, delta),
        mle_deviation_bound(profile, delta),
        median_upper_bound(profile, delta, c_const),
        median_upper_bound_gaussian(profile, delta),
        median_lower_bound_gaussian(profile, delta),
        xia_bound(profile, delta),
    ]
    if beta is None:
        reports.append(
            BoundReport("devroye_eq4", None, delta, 0, False, "beta not supplied")
        )
    else:
        reports.append(devroye_bound(profile, delta, beta))
    applicable = sorted(
        (r for r in reports if r.applicable), key=lambda r: (r.value, r.bound_name)
    )
    inapplicable = [r for r in reports if not r.applicable]
    return applicable + inapplicable

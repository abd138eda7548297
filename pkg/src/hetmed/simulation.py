"""Reproducible Monte Carlo experiments: bound coverage and estimator error.

Trials draw from counter-based Philox streams keyed by (seed, trial index),
so any single trial can be regenerated in isolation and results are
bit-identical regardless of execution order or worker count.  Uniforms use
the midpoint rule u = (k + 1/2) / 2^53, which keeps them strictly inside
(0, 1) and makes every sample an exact quantile of its family.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats as _scipy_stats

from .bounds import (
    BOUND_NAMES,
    BoundReport,
    VarianceProfile,
    mean_deviation_bound,
    median_lower_bound_gaussian,
    median_upper_bound,
    median_upper_bound_gaussian,
    mle_deviation_bound,
    xia_bound,
)
from .distributions import FAMILIES, unit_density_at_one, unit_quantile
from .estimators import Dataset

__all__ = [
    "ComparisonReport",
    "CoverageCell",
    "CoverageReport",
    "ProfileSpec",
    "QuantileRow",
    "SimulationConfig",
    "clopper_pearson",
    "constant_c_for",
    "generate_dataset",
    "materialize_profile",
    "run_coverage",
    "run_estimator_comparison",
]

# Parameter names accepted per profile kind (strict, for config parsing).
PROFILE_KINDS = {
    "constant": ("sigma",),
    "geometric": ("sigma0", "ratio"),
    "polynomial": ("exponent",),
    "one_tiny": ("epsilon",),
    "one_huge": ("magnitude",),
    "explicit": ("values",),
}

# Bounds whose hypotheses are Gaussian-specific; coverage marks them
# inapplicable for other families.  The general median bound runs everywhere
# with the family's own density constant.
_GAUSSIAN_ONLY = {
    "mean_eq1": "Gaussian-tail bound for the plain mean",
    "mle_eq2": "Gaussian-tail bound for the weighted mean",
    "median_cor1": "Gaussian specialisation of the trimmed median bound",
    "median_lower_thm2": "lower-bound constants derived for Gaussian densities",
    "xia_prop1": "harmonic-mean bound stated for Gaussian observations",
}

_ERROR_SOURCE = {
    "mean_eq1": "mean",
    "mle_eq2": "mle_oracle",
    "median_thm1": "median",
    "median_cor1": "median",
    "median_lower_thm2": "median",
    "xia_prop1": "median",
    "devroye_eq4": "median",
}


@dataclass(frozen=True)
class ProfileSpec:
    """Recipe for a scale profile of any length.

    ``one_tiny`` pins the smallest scale at ``epsilon`` with the rest at 1;
    ``one_huge`` pins the largest at ``magnitude``.  These realise the two
    limiting thought experiments (one near-certain observation, one
    near-useless one).
    """

    kind: str
    sigma: float = 1.0
    sigma0: float = 1.0
    ratio: float = 2.0
    exponent: float = 1.0
    epsilon: float = 1e-3
    magnitude: float = 1e3
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(
                f"unknown profile kind {self.kind!r}; choose from {sorted(PROFILE_KINDS)}"
            )
        if self.values is not None:
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def constant(cls, sigma):
        return cls(kind="constant", sigma=sigma)

    @classmethod
    def geometric(cls, sigma0, ratio):
        return cls(kind="geometric", sigma0=sigma0, ratio=ratio)

    @classmethod
    def polynomial(cls, exponent):
        return cls(kind="polynomial", exponent=exponent)

    @classmethod
    def one_tiny(cls, epsilon):
        return cls(kind="one_tiny", epsilon=epsilon)

    @classmethod
    def one_huge(cls, magnitude):
        return cls(kind="one_huge", magnitude=magnitude)

    @classmethod
    def explicit(cls, values):
        return cls(kind="explicit", values=tuple(values))


def materialize_profile(spec: ProfileSpec, n: int) -> VarianceProfile:
    """Expand a profile recipe to an ascending profile of length n."""
    if n < 1:
        raise ValueError(f"profile length must be >= 1, got {n}")
    kind = spec.kind
    if kind == "constant":
        if not spec.sigma > 0.0:
            raise ValueError("constant profile needs sigma > 0")
        sigmas = [spec.sigma] * n
    elif kind == "geometric":
        if not (spec.sigma0 > 0.0 and spec.ratio > 0.0):
            raise ValueError("geometric profile needs sigma0 > 0 and ratio > 0")
        sigmas = [spec.sigma0 * spec.ratio**k for k in range(n)]
    elif kind == "polynomial":
        sigmas = [float(i) ** spec.exponent for i in range(1, n + 1)]
    elif kind == "one_tiny":
        if not spec.epsilon > 0.0:
            raise ValueError("one_tiny profile needs epsilon > 0")
        sigmas = [spec.epsilon] + [1.0] * (n - 1)
    elif kind == "one_huge":
        if not spec.magnitude > 0.0:
            raise ValueError("one_huge profile needs magnitude > 0")
        sigmas = [1.0] * (n - 1) + [spec.magnitude]
    else:  # explicit
        if spec.values is None:
            raise ValueError("explicit profile needs values")
        if len(spec.values) != n:
            raise ValueError(
                f"explicit profile has {len(spec.values)} values, expected n = {n}"
            )
        sigmas = list(spec.values)
    return VarianceProfile(tuple(sigmas))


@dataclass(frozen=True)
class SimulationConfig:
    """Full description of one Monte Carlo experiment."""

    family: str
    profile_spec: ProfileSpec
    n: int
    deltas: tuple[float, ...]
    trials: int
    seed: int
    theta: float = 0.0
    nu: float = 3.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unsupported family {self.family!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        deltas = tuple(float(d) for d in self.deltas)
        if not deltas:
            raise ValueError("deltas must be non-empty")
        if any(not 0.0 < d < 1.0 for d in deltas):
            raise ValueError("every delta must lie in (0, 1)")
        object.__setattr__(self, "deltas", deltas)
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not self.nu > 0.0:
            raise ValueError("nu must be positive")


def constant_c_for(family: str, nu: float = 3.0) -> float:
    """Density floor constant of the family for the trimmed median bound.

    gaussian -> exp(-1/2)/sqrt(2 pi), laplace -> exp(-1)/2,
    cauchy -> 1/(2 pi), student_t -> unit density at 1.
    """
    return unit_density_at_one(family, nu)


def _unit_uniforms(seed: int, trial_index: int, n: int) -> np.ndarray:
    bitgen = np.random.Philox(key=int(seed), counter=int(trial_index) << 128)
    raw = np.random.Generator(bitgen).integers(0, 1 << 53, size=n, dtype=np.uint64)
    return (raw.astype(np.float64) + 0.5) * 2.0**-53


def generate_dataset(
    family: str,
    theta: float,
    profile: VarianceProfile,
    seed: int,
    trial_index: int,
    nu: float = 3.0,
) -> Dataset:
    """Draw x_i = theta + sigma_i * z_i for one trial, reproducibly.

    The uniform stream is keyed by (seed, trial_index, i); regenerating any
    trial needs nothing but those integers.
    """
    u = _unit_uniforms(seed, trial_index, profile.n)
    z = unit_quantile(family, u, nu)
    values = theta + np.asarray(profile.sigmas) * z
    return Dataset(
        values=tuple(float(v) for v in values),
        scales=profile.sigmas,
        true_location=float(theta),
    )


def _collect_errors(
    config: SimulationConfig, profile: VarianceProfile, threads: int
) -> dict[str, np.ndarray]:
    """Absolute estimation errors per trial for median, mean and oracle MLE.

    Each trial is a pure function of (config, trial index); chunks may be
    filled by any number of threads without changing a single bit.
    """
    sig = np.asarray(profile.sigmas)
    weights = sig**-2.0
    weight_sum = math.fsum(weights)
    n = profile.n
    mid = n // 2
    trials = config.trials
    theta = config.theta
    err = {
        "median": np.empty(trials),
        "mean": np.empty(trials),
        "mle_oracle": np.empty(trials),
    }

    def fill(lo: int, hi: int) -> None:
        for t in range(lo, hi):
            u = _unit_uniforms(config.seed, t, n)
            z = unit_quantile(config.family, u, config.nu)
            x = theta + sig * z
            err["median"][t] = abs(float(np.partition(x, mid)[mid]) - theta)
            err["mean"][t] = abs(math.fsum(x) / n - theta)
            err["mle_oracle"][t] = abs(math.fsum(weights * x) / weight_sum - theta)

    if threads <= 1:
        fill(0, trials)
    else:
        chunk = max(1, -(-trials // (threads * 8)))
        starts = range(0, trials, chunk)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda lo: fill(lo, min(lo + chunk, trials)), starts))
    return err


def clopper_pearson(successes: int, trials: int, confidence: float = 0.99):
    """Exact two-sided binomial confidence interval for a proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    alpha = 1.0 - confidence
    if successes == 0:
        low = 0.0
    else:
        low = float(_scipy_stats.beta.ppf(alpha / 2.0, successes, trials - successes + 1))
    if successes == trials:
        high = 1.0
    else:
        high = float(
            _scipy_stats.beta.ppf(1.0 - alpha / 2.0, successes + 1, trials - successes)
        )
    return low, high


@dataclass(frozen=True)
class CoverageCell:
    """Exceedance tally of one bound at one delta."""

    bound_name: str
    delta: float
    bound_value: float | None
    trials: int
    exceedances: int | None
    empirical: float | None
    ci_low: float | None
    ci_high: float | None
    verdict: str  # "consistent" | "violated" | "inapplicable"
    note: str = ""


@dataclass(frozen=True)
class CoverageReport:
    config: SimulationConfig
    cells: tuple[CoverageCell, ...]

    @property
    def all_consistent(self) -> bool:
        return all(c.verdict != "violated" for c in self.cells)

    def cell(self, bound_name: str, delta: float) -> CoverageCell:
        for c in self.cells:
            if c.bound_name == bound_name and c.delta == delta:
                return c
        raise KeyError((bound_name, delta))


def _bound_reports(
    profile: VarianceProfile, delta: float, c_family: float
) -> dict[str, BoundReport]:
    return {
        "mean_eq1": mean_deviation_bound(profile, delta),
        "mle_eq2": mle_deviation_bound(profile, delta),
        "median_thm1": median_upper_bound(profile, delta, c_family),
        "median_cor1": median_upper_bound_gaussian(profile, delta),
        "median_lower_thm2": median_lower_bound_gaussian(profile, delta),
        "xia_prop1": xia_bound(profile, delta),
        # No tail constant is part of a simulation config, so the
        # exponential-tail bound is carried through as inapplicable.
        "devroye_eq4": BoundReport(
            "devroye_eq4", None, delta, 0, False, "beta not supplied"
        ),
    }


def _coverage_cells(
    config: SimulationConfig,
    profile: VarianceProfile,
    errors: dict[str, np.ndarray],
) -> tuple[CoverageCell, ...]:
    c_family = constant_c_for(config.family, config.nu)
    trials = config.trials
    cells = []
    for delta in config.deltas:
        reports = _bound_reports(profile, delta, c_family)
        for name in BOUND_NAMES:
            report = reports[name]
            if config.family != "gaussian" and name in _GAUSSIAN_ONLY:
                report = BoundReport(
                    name,
                    None,
                    delta,
                    0,
                    False,
                    f"{_GAUSSIAN_ONLY[name]}; family is {config.family}",
                )
            if not report.applicable:
                cells.append(
                    CoverageCell(
                        name, delta, report.value, trials,
                        None, None, None, None, "inapplicable",
                        report.applicability_note,
                    )
                )
                continue
            errs = errors[_ERROR_SOURCE[name]]
            if name == "median_lower_thm2":
                # Lower bound: deviations at least this large are promised
                # with probability >= delta, so the count is inclusive.
                count = int(np.count_nonzero(errs >= report.value))
                low, high = clopper_pearson(count, trials)
                verdict = "violated" if high < delta else "consistent"
            else:
                count = int(np.count_nonzero(errs > report.value))
                low, high = clopper_pearson(count, trials)
                verdict = "violated" if low > delta else "consistent"
            cells.append(
                CoverageCell(
                    name, delta, report.value, trials,
                    count, count / trials, low, high, verdict,
                    report.applicability_note,
                )
            )
    return tuple(cells)


def run_coverage(config: SimulationConfig, threads: int = 1) -> CoverageReport:
    """Measure how often each applicable bound is exceeded.

    Bounds are evaluated once per (profile, delta) before the trial loop.
    Upper bounds count strict exceedances |err| > value and are consistent
    unless the whole confidence interval sits above delta; the lower bound
    counts |err| >= value and is consistent unless the interval sits below
    delta.
    """
    profile = materialize_profile(config.profile_spec, config.n)
    errors = _collect_errors(config, profile, threads)
    return CoverageReport(config=config, cells=_coverage_cells(config, profile, errors))


@dataclass(frozen=True)
class QuantileRow:
    estimator: str
    q50: float
    q90: float
    q99: float


@dataclass(frozen=True)
class ComparisonReport:
    config: SimulationConfig
    rows: tuple[QuantileRow, ...]

    def row(self, estimator: str) -> QuantileRow:
        for r in self.rows:
            if r.estimator == estimator:
                return r
        raise KeyError(estimator)


def _quantile_rows(
    config: SimulationConfig, errors: dict[str, np.ndarray]
) -> tuple[QuantileRow, ...]:
    rows = []
    for name in ("mean", "median", "mle_oracle"):
        errs = np.sort(errors[name])
        def q(p, errs=errs):
            idx = min(len(errs) - 1, max(0, math.ceil(p * len(errs)) - 1))
            return float(errs[idx])
        rows.append(QuantileRow(name, q(0.5), q(0.9), q(0.99)))
    return tuple(rows)


def run_estimator_comparison(
    config: SimulationConfig, threads: int = 1
) -> ComparisonReport:
    """Head-to-head error quantiles (0.5 / 0.9 / 0.99) per estimator.

    Quantiles are order statistics of the fully sorted error sample, so the
    report is deterministic.  The weighted mean uses the true scales and is
    labelled ``mle_oracle`` accordingly.
    """
    profile = materialize_profile(config.profile_spec, config.n)
    errors = _collect_errors(config, profile, threads)
    return ComparisonReport(config=config, rows=_quantile_rows(config, errors))


def run_experiment(config: SimulationConfig, threads: int = 1):
    """Coverage report and comparison table from one shared set of trials."""
    profile = materialize_profile(config.profile_spec, config.n)
    errors = _collect_errors(config, profile, threads)
    coverage = CoverageReport(
        config=config, cells=_coverage_cells(config, profile, errors)
    )
    comparison = ComparisonReport(config=config, rows=_quantile_rows(config, errors))
    return coverage, comparison

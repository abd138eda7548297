"""Randomized and exhaustive verification suites behind ``hetmed verify``.

Each suite is deterministic given its seed and returns a :class:`SuiteResult`
whose cases carry a one-line detail string, so the CLI can print margins and
the test suite can assert on outcomes through the same code path.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bounds import VarianceProfile, dominance_check
from .oracles import (
    SAFE_RANGE_COEFF,
    corollary2_range_check,
    lemma1_exact_check,
    lemma2_equivalence_check,
)

__all__ = [
    "SuiteCase",
    "SuiteResult",
    "random_profile",
    "run_cor2_suite",
    "run_dominance_suite",
    "run_lemma1_suite",
    "run_lemma2_suite",
]


@dataclass(frozen=True)
class SuiteCase:
    label: str
    holds: bool
    report_only: bool
    detail: str


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: tuple[SuiteCase, ...]
    summary: str = ""

    @property
    def failures(self) -> tuple[SuiteCase, ...]:
        return tuple(c for c in self.cases if not c.holds and not c.report_only)

    @property
    def passed(self) -> bool:
        return not self.failures


def random_profile(rng: np.random.Generator, n: int) -> VarianceProfile:
    """One ascending scale profile drawn from a mixed bag of shapes."""
    kind = rng.integers(0, 8)
    if kind == 0:
        sigmas = np.full(n, float(rng.uniform(0.1, 10.0)))
    elif kind == 1:
        sigmas = rng.uniform(0.5, 2.0, n)
    elif kind == 2:
        sigmas = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), n))
    elif kind == 3:
        sigmas = np.exp(rng.standard_normal(n))
    elif kind == 4:
        # Ratio shrinks with n so the largest scale stays representable.
        ratio = 1.0 + rng.uniform(0.0, 10.0) / n
        sigmas = ratio ** np.arange(n)
    elif kind == 5:
        sigmas = np.arange(1.0, n + 1.0) ** rng.uniform(0.25, 2.0)
    elif kind == 6:
        sigmas = np.concatenate(([1e-6], np.ones(n - 1))) if n > 1 else np.ones(1)
    else:
        sigmas = np.concatenate((np.ones(n - 1), [1e6])) if n > 1 else np.ones(1)
    scale = 10.0 ** rng.integers(-2, 3)
    return VarianceProfile(tuple(np.sort(sigmas * scale)))


def run_lemma1_suite(
    n_list, delta_list, p_mode: str = "half", cases: int = 50, seed: int = 0
) -> SuiteResult:
    """Exact anticoncentration tails over an (n, delta) grid.

    ``p_mode`` "half" uses p_i = 1/2; "random" draws ``cases`` probability
    vectors uniformly from [1/4, 3/4] per grid cell.  Cells with
    delta > 1/4 are evaluated in report-only mode: they never fail the
    suite, because the stated constant is only claimed below 1/4.
    """
    if p_mode not in ("half", "random"):
        raise ValueError(f"p_mode must be 'half' or 'random', got {p_mode!r}")
    if cases < 1:
        raise ValueError("cases must be >= 1")
    rng = np.random.default_rng(seed)
    out = []
    for n in n_list:
        for delta in delta_list:
            report_only = delta > 0.25
            if p_mode == "half":
                draws = [np.full(n, 0.5)]
            else:
                draws = [rng.uniform(0.25, 0.75, n) for _ in range(cases)]
            for idx, probs in enumerate(draws):
                check = lemma1_exact_check(probs, delta)
                # Allow accumulated arithmetic slack, nothing more.
                holds = check.margin >= -1e-12
                label = f"n={n} delta={delta:g} p={p_mode}"
                if p_mode == "random":
                    label += f" draw={idx}"
                detail = (
                    f"tail={check.tail:.6f} target={check.target:.6f} "
                    f"margin={check.margin:+.6f} "
                    f"(proof-constant tail={check.proof_tail:.6f})"
                )
                out.append(SuiteCase(label, holds, report_only, detail))
    bad = sum(1 for c in out if not c.holds and not c.report_only)
    return SuiteResult(
        "lemma1", tuple(out), f"{len(out)} exact tails checked: {bad} below target"
    )


def _threshold_grid(values: np.ndarray, rng: np.random.Generator) -> float:
    """Pick t >= 0 from midpoints between order statistics plus the flanks."""
    v = np.sort(values)
    candidates = [0.0, float(abs(v[-1]) + 1.0)]
    if v.size > 1:
        mids = (v[:-1] + v[1:]) / 2.0
        candidates.extend(float(m) for m in mids if m >= 0.0)
    return candidates[rng.integers(0, len(candidates))]


def run_lemma2_suite(cases: int = 100_000, max_n: int = 31, seed: int = 7) -> SuiteResult:
    """Randomized instances of the counting identity; any disagreement fails.

    Thresholds come from a grid that includes midpoints between order
    statistics, so they never coincide with a data point.
    """
    if cases < 1 or max_n < 1:
        raise ValueError("cases and max_n must be >= 1")
    rng = np.random.default_rng(seed)
    failures = []
    for idx in range(cases):
        n = int(rng.integers(1, max_n + 1))
        scales = np.exp(rng.uniform(math.log(0.1), math.log(10.0), n))
        values = scales * rng.standard_normal(n)
        t = _threshold_grid(values, rng)
        check = lemma2_equivalence_check(values, scales, t)
        if not check.agree:
            failures.append(
                SuiteCase(
                    f"case={idx} n={n} t={t:.6g}",
                    False,
                    False,
                    f"median={check.median:.6g} count={check.count_at_or_above} "
                    f"estimator_side={check.estimator_side} "
                    f"counting_side={check.counting_side}",
                )
            )
    return SuiteResult(
        "lemma2",
        tuple(failures),
        f"{cases} randomized instances, max n = {max_n}: "
        f"{len(failures)} disagreement(s)",
    )


def run_cor2_suite(grid: int = 1000, seed: int = 7, profiles: int = 100) -> SuiteResult:
    """Sweep t over [0, SAFE_RANGE_COEFF * sigma_1] for random profiles.

    Each profile must keep min p_i(t) >= 1/4 (within 1e-9) across the whole
    grid, and must witness p_i < 1/4 at t = sigma_1, confirming the safe
    window is not vacuously loose.
    """
    if grid < 2 or profiles < 1:
        raise ValueError("grid must be >= 2 and profiles >= 1")
    rng = np.random.default_rng(seed)
    out = []
    for idx in range(profiles):
        n = int(rng.integers(1, 50))
        profile = random_profile(rng, n)
        sigma1 = profile.sigmas[0]
        ts = np.linspace(0.0, SAFE_RANGE_COEFF * sigma1, grid)
        worst = min(corollary2_range_check(profile.sigmas, t).p_min for t in ts)
        inside = worst >= 0.25 - 1e-9
        witness = corollary2_range_check(profile.sigmas, sigma1)
        nonvacuous = witness.p_min < 0.25
        out.append(
            SuiteCase(
                f"profile={idx} n={n}",
                inside and nonvacuous,
                False,
                f"min p over grid = {worst:.6f}; p_min at t=sigma_1 = {witness.p_min:.6f}",
            )
        )
    bad = sum(1 for c in out if not c.holds)
    return SuiteResult(
        "cor2",
        tuple(out),
        f"{profiles} profiles x {grid}-point grid: {bad} outside the window",
    )


def run_dominance_suite(
    cases: int = 10_000, max_n: int = 2000, seed: int = 7
) -> SuiteResult:
    """Random profiles with n in [4, max_n] through :func:`dominance_check`."""
    if cases < 1 or max_n < 4:
        raise ValueError("cases must be >= 1 and max_n >= 4")
    rng = np.random.default_rng(seed)
    failures = []
    worst_ratio = math.inf
    for idx in range(cases):
        n = int(rng.integers(4, max_n + 1))
        profile = random_profile(rng, n)
        check = dominance_check(profile)
        worst_ratio = min(worst_ratio, check.ratio)
        if not check.holds:
            head = ", ".join(f"{s:.4g}" for s in profile.sigmas[:6])
            failures.append(
                SuiteCase(
                    f"case={idx} n={n}",
                    False,
                    False,
                    f"lhs={check.lhs:.6g} rhs={check.rhs:.6g} ratio={check.ratio:.4f} "
                    f"trim={check.trim_index} sigmas=[{head}{', ...' if n > 6 else ''}]",
                )
            )
    return SuiteResult(
        "dominance",
        tuple(failures),
        f"{cases} random profiles, n in [4, {max_n}]: {len(failures)} violation(s); "
        f"worst rhs/lhs ratio = {worst_ratio:.4f}",
    )

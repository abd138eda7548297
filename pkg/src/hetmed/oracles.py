"""Exact, simulation-free verification of the combinatorial facts the median
analysis rests on: a Poisson-binomial anticoncentration inequality, the
counting identity behind the upper-median convention, and the window in which
Gaussian exceedance probabilities stay inside [1/4, 3/4].
"""

import math
from dataclasses import dataclass

import numpy as np

from .distributions import gaussian_cdf, gaussian_sf
from .estimators import empirical_median

__all__ = [
    "ANTICONC_COEFF",
    "ANTICONC_COEFF_PROOF",
    "AnticoncentrationCheck",
    "CountingIdentityCheck",
    "ExactTail",
    "ProbabilityRangeCheck",
    "SAFE_RANGE_COEFF",
    "corollary2_range_check",
    "lemma1_exact_check",
    "lemma2_equivalence_check",
    "poisson_binomial_pmf",
]

# Stated anticoncentration constant, and the sharper one the derivation
# actually yields (1 - 1/sqrt(2) ~= 0.292893).
ANTICONC_COEFF = 0.3
ANTICONC_COEFF_PROOF = 1.0 - 1.0 / math.sqrt(2.0)

# Largest t/sigma_1 for which every Gaussian exceedance probability provably
# stays >= 1/4: sqrt(2*pi)/4 ~= 0.626657 (0.63 in two digits).
SAFE_RANGE_COEFF = math.sqrt(2.0 * math.pi) / 4.0


@dataclass(frozen=True)
class ExactTail:
    """Full probability mass of a sum of independent Bernoulli variables."""

    pmf: tuple[float, ...]
    mean: float

    @property
    def n(self) -> int:
        return len(self.pmf) - 1

    def tail_at_or_above(self, k: int) -> float:
        """P(S >= k), exactly accumulated."""
        if k <= 0:
            return math.fsum(self.pmf)
        if k > self.n:
            return 0.0
        return math.fsum(self.pmf[k:])


def poisson_binomial_pmf(probs) -> ExactTail:
    """Exact distribution of S = sum of independent Bernoulli(p_i).

    Standard convolution recurrence, one variable at a time; O(n^2) work and
    O(n) space.  Total mass stays within 1e-12 of 1 for n up to 1e4.
    """
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probs must be a non-empty one-dimensional sequence")
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("every probability must lie in [0, 1]")
    pmf = np.zeros(p.size + 1)
    pmf[0] = 1.0
    for k, pk in enumerate(p, start=1):
        shifted = pmf[: k].copy()
        pmf[: k] *= 1.0 - pk
        pmf[1 : k + 1] += shifted * pk
    return ExactTail(pmf=tuple(float(q) for q in pmf), mean=math.fsum(p))


@dataclass(frozen=True)
class AnticoncentrationCheck:
    """Exact tail of a Poisson-binomial sum against the delta/2 target.

    ``threshold``/``tail``/``margin``/``holds`` use the stated coefficient
    0.3; the ``proof_*`` fields repeat the computation with the sharper
    1 - 1/sqrt(2).  ``margin`` is ``tail - target``.
    """

    n: int
    delta: float
    mean: float
    target: float
    threshold: float
    tail: float
    margin: float
    holds: bool
    proof_threshold: float
    proof_tail: float
    proof_margin: float
    proof_holds: bool


def _tail_from(exact: ExactTail, threshold: float) -> float:
    # S is integer valued, so S >= threshold means S >= ceil(threshold);
    # for integer thresholds ceil is the identity and the comparison stays
    # inclusive.
    return exact.tail_at_or_above(math.ceil(threshold))


def lemma1_exact_check(probs, delta: float) -> AnticoncentrationCheck:
    """Check P(S >= E[S] + 0.3 sqrt(n log(2/delta))) >= delta/2 exactly.

    All p_i must lie in [1/4, 3/4] and delta in (exp(-n), 1).  The claim with
    coefficient 0.3 demonstrably fails for delta near 1/2, so callers treat
    delta > 1/4 as report-only territory.
    """
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probs must be a non-empty one-dimensional sequence")
    if np.any((p < 0.25) | (p > 0.75)):
        raise ValueError("every probability must lie in [1/4, 3/4]")
    n = p.size
    if not math.exp(-n) < delta < 1.0:
        raise ValueError(f"delta must lie in (exp(-n), 1) = ({math.exp(-n):.3g}, 1)")
    exact = poisson_binomial_pmf(p)
    offset = math.sqrt(n * math.log(2.0 / delta))
    target = delta / 2.0

    threshold = exact.mean + ANTICONC_COEFF * offset
    tail = _tail_from(exact, threshold)
    proof_threshold = exact.mean + ANTICONC_COEFF_PROOF * offset
    proof_tail = _tail_from(exact, proof_threshold)
    return AnticoncentrationCheck(
        n=n,
        delta=delta,
        mean=exact.mean,
        target=target,
        threshold=threshold,
        tail=tail,
        margin=tail - target,
        holds=tail >= target,
        proof_threshold=proof_threshold,
        proof_tail=proof_tail,
        proof_margin=proof_tail - target,
        proof_holds=proof_tail >= target,
    )


@dataclass(frozen=True)
class CountingIdentityCheck:
    """Both sides of the order-statistic counting identity at one threshold."""

    n: int
    t: float
    median: float
    count_at_or_above: int
    estimator_side: bool
    counting_side: bool
    agree: bool
    d_value: float
    b_value: float


def lemma2_equivalence_check(values, scales, t: float) -> CountingIdentityCheck:
    """Verify that median >= t coincides with the centering-count criterion.

    The raw criterion compares D(t) = sum(1{x_i >= t} - P(X_i > t)) against
    B(t) = sum(P(0 <= X_i <= t)); both are reported for inspection, computed
    for centered Gaussian observations with the given scales.  Because
    P(X_i > t) + P(0 <= X_i <= t) = 1/2 for t >= 0, the comparison reduces to
    the exact integer test 2 * #{x_i >= t} >= n, which is what decides the
    verdict (no floating-point tie-breaking).
    """
    if t < 0.0:
        raise ValueError(f"the identity is stated for t >= 0, got t = {t}")
    x = np.asarray(values, dtype=float)
    s = np.asarray(scales, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("values must be a non-empty one-dimensional sequence")
    if s.shape != x.shape:
        raise ValueError(f"scales has shape {s.shape}, expected {x.shape}")
    if not np.all(s > 0.0):
        raise ValueError("every scale must be strictly positive")
    n = x.size
    count = int(np.count_nonzero(x >= t))
    med = empirical_median(x)
    estimator_side = med >= t
    counting_side = 2 * count >= n
    upper = gaussian_sf(t / s)  # P(X_i > t) at theta = 0
    d_value = count - math.fsum(upper)
    b_value = math.fsum(gaussian_cdf(t / s) - 0.5)  # P(0 <= X_i <= t)
    return CountingIdentityCheck(
        n=n,
        t=float(t),
        median=med,
        count_at_or_above=count,
        estimator_side=estimator_side,
        counting_side=counting_side,
        agree=estimator_side == counting_side,
        d_value=d_value,
        b_value=b_value,
    )


@dataclass(frozen=True)
class ProbabilityRangeCheck:
    """Extremes of p_i(t) = P(X_i >= t) over a Gaussian scale profile."""

    n: int
    t: float
    p_min: float
    p_max: float
    holds: bool


def corollary2_range_check(scales, t: float) -> ProbabilityRangeCheck:
    """Check that every p_i(t) = P(X_i >= t) lies in [1/4, 3/4].

    Observations are centered Gaussians with the given scales.  The
    guaranteed-safe window is t <= SAFE_RANGE_COEFF * min(scales); the check
    itself accepts any t >= 0 so callers can witness where the window ends.
    """
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    s = np.asarray(scales, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("scales must be a non-empty one-dimensional sequence")
    if not np.all(s > 0.0):
        raise ValueError("every scale must be strictly positive")
    p = gaussian_sf(t / s)
    p_min = float(np.min(p))
    p_max = float(np.max(p))
    return ProbabilityRangeCheck(
        n=s.size,
        t=float(t),
        p_min=p_min,
        p_max=p_max,
        holds=(p_min >= 0.25) and (p_max <= 0.75),
    )

"""Point estimators for the common location of a heteroscedastic sample.

Every function here is a pure function of its inputs: permutation-invariant,
translation-equivariant, and safe to call from any number of threads.
Sums are accumulated with ``math.fsum`` so that the mean and the weighted
mean do not depend on input order beyond one unit in the last place.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Dataset", "empirical_mean", "empirical_median", "mle_oracle"]


@dataclass(frozen=True)
class Dataset:
    """Observations sharing one location parameter.

    ``scales`` carries the per-observation scale parameters and is only
    needed by the oracle weighted mean.  ``true_location`` is filled in by
    the simulator so estimation errors can be measured afterwards.
    """

    values: tuple[float, ...]
    scales: tuple[float, ...] | None = None
    true_location: float | None = None

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("Dataset needs at least one observation")
        object.__setattr__(self, "values", values)
        if self.scales is not None:
            scales = tuple(float(s) for s in self.scales)
            if len(scales) != len(values):
                raise ValueError(
                    f"scales has length {len(scales)}, expected {len(values)}"
                )
            if any(not s > 0.0 for s in scales):
                raise ValueError("every scale must be strictly positive")
            object.__setattr__(self, "scales", scales)
        if self.true_location is not None:
            object.__setattr__(self, "true_location", float(self.true_location))

    def __len__(self):
        return len(self.values)


def _as_1d(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("values must be a non-empty one-dimensional sequence")
    return arr


def empirical_median(values) -> float:
    """Upper median: the (n // 2 + 1)-th smallest observation.

    This is the order-statistic convention under which ``median >= t`` holds
    exactly when at least half of the observations are ``>= t``, for even and
    odd sample sizes alike.  Repeated values are kept as a multiset; the
    middle pair is never averaged.
    """
    arr = _as_1d(values)
    k = arr.size // 2
    return float(np.partition(arr, k)[k])


def empirical_mean(values) -> float:
    """Arithmetic mean with exactly-rounded accumulation."""
    arr = _as_1d(values)
    return math.fsum(arr) / arr.size


def mle_oracle(values, scales) -> float:
    """Inverse-variance weighted mean, computable only with the true scales.

    Returns ``sum(x_i / s_i^2) / sum(1 / s_i^2)``.  Reduces to
    :func:`empirical_mean` when all scales are equal.
    """
    arr = _as_1d(values)
    sc = np.asarray(scales, dtype=float)
    if sc.shape != arr.shape:
        raise ValueError(f"scales has shape {sc.shape}, expected {arr.shape}")
    if not np.all(sc > 0.0):
        raise ValueError("every scale must be strictly positive")
    weights = sc**-2.0
    return math.fsum(weights * arr) / math.fsum(weights)

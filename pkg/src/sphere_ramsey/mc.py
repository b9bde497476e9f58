"""Monte Carlo plumbing: reproducible substreams, estimate records, KS helpers.

Every sampler in the package draws from a counter-based Philox stream derived
from (master seed, purpose label, worker index).  Workers never share a
stream, and reductions run in worker-index order, so a result is a pure
function of (seed, workers).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np


def purpose_key(purpose: str) -> int:
    digest = hashlib.blake2s(purpose.encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little")


def substream(seed: int, purpose: str, worker: int = 0) -> np.random.Generator:
    """Dedicated generator for (seed, purpose, worker)."""
    ss = np.random.SeedSequence(seed, spawn_key=(purpose_key(purpose), worker))
    return np.random.Generator(np.random.Philox(ss))


def chunk_counts(n: int, workers: int) -> list[int]:
    """Split n samples across workers; first chunks absorb the remainder."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    base, rem = divmod(n, workers)
    return [base + (1 if w < rem else 0) for w in range(workers)]


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_error: float
    n_samples: int
    n_accepted: int
    seed: int
    workers: int

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "n_accepted": self.n_accepted,
            "seed": self.seed,
            "workers": self.workers,
        }


@dataclass(frozen=True)
class PredictionComparison:
    estimate: MCEstimate
    prediction: float
    prediction_source: str

    @property
    def z_score(self) -> float:
        if self.estimate.std_error == 0.0:
            return math.inf if self.estimate.value != self.prediction else 0.0
        return (self.estimate.value - self.prediction) / self.estimate.std_error

    def as_dict(self) -> dict:
        d = self.estimate.as_dict()
        d.update(
            prediction=self.prediction,
            prediction_source=self.prediction_source,
            z_score=self.z_score,
        )
        return d


def from_binomial(hits: int, n: int, seed: int, workers: int) -> MCEstimate:
    """Estimate of a probability from hit counts; stderr = sqrt(p(1-p)/n)."""
    if n <= 0:
        return MCEstimate(math.nan, math.nan, 0, 0, seed, workers)
    p = hits / n
    se = math.sqrt(max(p * (1.0 - p), 0.0) / n)
    return MCEstimate(p, se, n, hits, seed, workers)


def from_moments(total: float, total_sq: float, n: int, seed: int, workers: int,
                 n_samples: int | None = None) -> MCEstimate:
    """Estimate of a mean from first and second moment accumulators."""
    if n <= 0:
        return MCEstimate(math.nan, math.nan, 0, 0, seed, workers)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    se = math.sqrt(var / n)
    return MCEstimate(mean, se, n_samples if n_samples is not None else n, n, seed, workers)


def ks_statistic(samples: np.ndarray, cdf) -> float:
    """One-sample Kolmogorov-Smirnov distance against a CDF.

    ``cdf`` may be vectorized or scalar-valued; scalar callables are mapped.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    try:
        f = np.asarray(cdf(x), dtype=float)
        if f.shape != x.shape:
            raise TypeError("scalar cdf")
    except (TypeError, ValueError):
        f = np.asarray([cdf(float(v)) for v in x], dtype=float)
    grid = np.arange(1, n + 1) / n
    d_plus = np.max(grid - f)
    d_minus = np.max(f - (grid - 1.0 / n))
    return float(max(d_plus, d_minus))


def ks_critical_value(n: int, alpha: float) -> float:
    """Asymptotic one-sample KS critical value at significance alpha."""
    return math.sqrt(-0.5 * math.log(alpha / 2.0)) / math.sqrt(n)

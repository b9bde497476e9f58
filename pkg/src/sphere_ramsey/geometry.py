"""Uniform sphere sampling, spherical-cap measures, thresholds, projections.

Conventions: points of the k-sphere live in R^{k+1} and are stored as 1-D
numpy arrays (rows of 2-D arrays for batches).  The cap threshold c solves
P(<x, e> <= -c/sqrt(k)) = p for x uniform on S^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .mc import MCEstimate, chunk_counts, from_binomial, substream
from .specials import (
    log_beta,
    normal_quantile,
    regularized_incomplete_beta,
    regularized_incomplete_beta_c,
)

#: Unit-norm tolerance for inputs that must be sphere points.
UNIT_TOL = 1e-9


def sample_unit_vectors(k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n independent uniform points on S^k, one per row.

    Normalized standard Gaussians: dimension-independent and branch-free.
    The measure-zero all-zeros draw is resampled.
    """
    if k < 1:
        raise DomainError(f"sphere dimension must be >= 1, got {k}")
    g = rng.standard_normal((n, k + 1))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms < 1e-150):
        bad = norms < 1e-150
        g[bad] = rng.standard_normal((int(np.count_nonzero(bad)), k + 1))
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def sample_unit_vector(k: int, rng: np.random.Generator) -> np.ndarray:
    return sample_unit_vectors(k, 1, rng)[0]


def log_marginal_norm(k: int) -> float:
    """log of the 1-D marginal normalizer: integral of (1-t^2)^((k-2)/2) over [-1, 1].

    Equals log B(1/2, k/2); the direct log-gamma difference cancels
    catastrophically for huge k, so beyond z = k/2 = 1e6 the Stirling-type
    expansion log B(1/2, z) = log(pi)/2 - log(z)/2 + 1/(8z) + O(1/z^2)
    takes over.
    """
    z = 0.5 * k
    if z >= 1e6:
        return 0.5 * math.log(math.pi) - 0.5 * math.log(z) + 1.0 / (8.0 * z)
    return log_beta(0.5, z)


def cap_probability(k: int, a: float) -> float:
    """Measure of the cap {x in S^k : <x, e> <= a}.

    Equals the normalized integral of (1-t^2)^((k-2)/2) over [-1, a],
    evaluated through the regularized incomplete beta function.
    """
    if k < 1:
        raise DomainError(f"sphere dimension must be >= 1, got {k}")
    if not -1.0 <= a <= 1.0:
        raise DomainError(f"cap height must lie in [-1, 1], got {a!r}")
    x = a * a
    xc = (1.0 - a) * (1.0 + a)
    if a <= 0.0:
        return 0.5 * regularized_incomplete_beta_c(0.5, 0.5 * k, x, xc)
    return 0.5 + 0.5 * regularized_incomplete_beta(0.5, 0.5 * k, x, xc)


def cap_density(k: int, a: float) -> float:
    """Density of <x, e> at a, i.e. d/da of cap_probability."""
    if not -1.0 < a < 1.0:
        return 0.0
    return math.exp(0.5 * (k - 2) * math.log1p(-a * a) - log_marginal_norm(k))


@dataclass(frozen=True)
class CapThreshold:
    k: int
    p: float
    c: float
    residual: float

    def as_dict(self) -> dict:
        return {"k": self.k, "p": self.p, "c": self.c, "residual": self.residual}


def solve_cap_threshold(k: int, p: float) -> CapThreshold:
    """The threshold c >= 0 with cap_probability(k, -c/sqrt(k)) = p.

    Bisection on the cap height a = -c/sqrt(k) in [-1, 0] (the defining
    integral is monotone in a, so the bracket is guaranteed), then Newton
    polish against the exact density.
    """
    if not 0.0 < p <= 0.5:
        raise DomainError(f"cap target probability must lie in (0, 1/2], got {p!r}")
    if k < 1:
        raise DomainError(f"sphere dimension must be >= 1, got {k}")
    if p == 0.5:
        return CapThreshold(k=k, p=p, c=0.0, residual=0.0)
    lo, hi = -1.0, 0.0
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if cap_probability(k, mid) < p:
            lo = mid
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    residual = abs(cap_probability(k, a) - p)
    for _ in range(3):
        d = cap_density(k, a)
        if d <= 0.0 or residual == 0.0:
            break
        cand = min(a - (cap_probability(k, a) - p) / d, 0.0)
        if cand <= -1.0:
            cand = -1.0 + 1e-16
        cand_res = abs(cap_probability(k, cand) - p)
        if cand_res >= residual:
            break
        a, residual = cand, cand_res
    return CapThreshold(k=k, p=p, c=-a * math.sqrt(k), residual=residual)


def cap_threshold_limit(p: float) -> float:
    """Large-k limit of the cap threshold: the (1-p)-quantile of the normal law."""
    return -normal_quantile(p)


@dataclass(frozen=True)
class CapLimitRow:
    k: int
    c: float
    limit: float
    error: float


def verify_cpk_asymptotic(p: float, k_list: list[int]) -> list[CapLimitRow]:
    """Threshold-vs-normal-quantile error table over a list of dimensions."""
    limit = cap_threshold_limit(p)
    rows = []
    for k in k_list:
        if k < 10:
            raise DomainError(f"asymptotic table expects k >= 10, got {k}")
        c = solve_cap_threshold(k, p).c
        rows.append(CapLimitRow(k=k, c=c, limit=limit, error=c - limit))
    return rows


def gap_coefficient(k: int, p: float) -> float:
    """Second-order gap coefficient (exp(-c^2)/(2*pi))^(3/2) at the cap threshold."""
    c = solve_cap_threshold(k, p).c
    return (math.exp(-c * c) / (2.0 * math.pi)) ** 1.5


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of R^{k+1} held as rows of an orthonormal basis."""

    basis: np.ndarray  # shape (r, k+1)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def from_spanning(cls, vectors: np.ndarray, tol: float = 1e-10) -> "Subspace":
        """Orthonormalize a spanning set by modified Gram-Schmidt.

        One re-orthogonalization pass keeps the Gram matrix within ~1e-14 of
        the identity for a few hundred vectors.  Raises DomainError when a
        vector is (numerically) dependent on its predecessors.
        """
        v = np.atleast_2d(np.asarray(vectors, dtype=float)).copy()
        rows = []
        for i in range(v.shape[0]):
            w = v[i]
            for _ in range(2):
                for q in rows:
                    w = w - (q @ w) * q
            norm = np.linalg.norm(w)
            if norm <= tol:
                raise DomainError("spanning set is numerically rank-deficient")
            rows.append(w / norm)
        return cls(basis=np.array(rows))


def project(sub: Subspace, y: np.ndarray) -> np.ndarray:
    """Orthogonal projection of y onto the subspace."""
    if sub.basis.shape[1] != y.shape[-1]:
        raise DomainError("ambient dimensions disagree")
    coords = sub.basis @ y
    return sub.basis.T @ coords


def projection_norm_tail(k: int, r: int, threshold: float) -> float:
    """P(|pi_r(y)| > threshold) for y uniform on S^k and an r-dim subspace.

    |pi_r(y)|^2 follows Beta(r/2, (k-r+1)/2), so the tail is the complement
    of its CDF at threshold^2.
    """
    if threshold < 0.0:
        raise DomainError(f"threshold must be >= 0, got {threshold!r}")
    if not 1 <= r <= k:
        raise DomainError(f"subspace dimension must satisfy 1 <= r <= k, got r={r}, k={k}")
    if threshold >= 1.0:
        return 0.0
    x = threshold * threshold
    xc = (1.0 - threshold) * (1.0 + threshold)
    return regularized_incomplete_beta_c(0.5 * r, 0.5 * (k - r + 1), x, xc)


def sample_span_coords(k: int, m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Coordinates of uniform S^k points on a fixed m-dim subspace, (n, m).

    For z uniform on S^k the coordinate vector w onto any fixed orthonormal
    m-frame has density proportional to (1-|w|^2)^((k-m-1)/2); sampling
    m Gaussians against an independent chi-square of the complementary
    dimension realizes it exactly.
    """
    if not 1 <= m <= k:
        raise DomainError(f"need 1 <= m <= k, got m={m}, k={k}")
    g = rng.standard_normal((n, m))
    s = rng.chisquare(k + 1 - m, n)
    scale = np.sqrt(np.einsum("ij,ij->i", g, g) + s)
    return g / scale[:, None]


@dataclass(frozen=True)
class ShiftedCapCheck:
    """Monte Carlo acceptance of a shifted cap next to its first-order prediction."""

    estimate: MCEstimate
    prediction: float
    exact: float
    h: float
    prediction_source: str

    @property
    def z_score(self) -> float:
        if self.estimate.std_error == 0.0:
            return math.nan
        return (self.estimate.value - self.prediction) / self.estimate.std_error


def shifted_cap_check(k: int, r: int, p: float, A: float, D: float, N: int,
                      seed: int, workers: int = 1) -> ShiftedCapCheck:
    """Estimate P(<y, e> <= -c/sqrt(k) - A/(D*sqrt(k))) for y uniform on S^{k-r}.

    Reported beside the prediction p - A*exp(-c^2/2)/(sqrt(2*pi)*D) and the
    exact cap value on S^{k-r}.  Only the inner product with the fixed
    direction matters, so the sampler draws that 1-D marginal directly.
    """
    if N <= 0:
        raise DomainError("sample count must be positive")
    if not 1 <= r <= k // 2:
        raise DomainError(f"need 1 <= r <= k/2, got r={r}, k={k}")
    c = solve_cap_threshold(k, p).c
    h = -c / math.sqrt(k) - A / (D * math.sqrt(k))
    hits = 0
    for w, n_chunk in enumerate(chunk_counts(N, workers)):
        if n_chunk == 0:
            continue
        rng = substream(seed, "shifted-cap", w)
        t = sample_span_coords(k - r, 1, n_chunk, rng)[:, 0]
        hits += int(np.count_nonzero(t <= h))
    prediction = p - A * math.exp(-0.5 * c * c) / (math.sqrt(2.0 * math.pi) * D)
    exact = cap_probability(k - r, h)
    return ShiftedCapCheck(
        estimate=from_binomial(hits, N, seed, workers),
        prediction=prediction,
        exact=exact,
        h=h,
        prediction_source="p - A*exp(-c^2/2)/(sqrt(2*pi)*D)",
    )

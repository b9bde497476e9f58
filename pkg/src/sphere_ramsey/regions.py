"""Neighborhood regions of point sequences and their rejection samplers.

Regions are intersections of caps (red) or cap complements (blue) around a
sequence, optionally restricted to the points keeping the extended sequence
perfect.  Two exact samplers are provided:

* a direct sampler drawing full ambient vectors, the reference path;
* an in-span sampler drawing only the coordinates of a candidate on the
  sequence's span.  Membership and perfectness depend on those coordinates
  alone, and their marginal law (Gaussians against a complementary
  chi-square) is exact, so rejection in the span reproduces the conditioned
  distribution of everything that lives in the span at a cost independent
  of the ambient dimension.

The chain sampler extends the same reduction to whole random tuples: it
grows the upper-triangular coordinate factor column by column, which
carries the exact joint law of all pairwise inner products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RejectionExhaustedError
from .geometry import sample_span_coords, sample_unit_vectors
from .sequences import _as_points

DEFAULT_BATCH = 1 << 14


def _color_mask(inner: np.ndarray, h: float, color: str) -> np.ndarray:
    if color == "red":
        return np.all(inner <= h, axis=1)
    if color == "blue":
        return np.all(inner > h, axis=1)
    raise DomainError(f"color must be 'red' or 'blue', got {color!r}")


@dataclass(frozen=True)
class RegionGeometry:
    """Pre-factored sequence data shared by the samplers.

    E has orthonormal rows spanning the sequence; R is upper triangular
    with column j carrying the coordinates of x_{j+1} on that basis.
    """

    points: np.ndarray        # (r, k+1)
    E: np.ndarray             # (r, k+1)
    R: np.ndarray             # (r, r)
    k: int
    c: float
    perfect_bound: float | None

    @property
    def r(self) -> int:
        return self.points.shape[0]

    @property
    def h(self) -> float:
        return -self.c / math.sqrt(self.k)

    @classmethod
    def build(cls, seq, k: int, c: float, perfect_bound: float | None = None) -> "RegionGeometry":
        pts = _as_points(seq) if len(seq) else np.empty((0, k + 1))
        r = pts.shape[0]
        if r > 0 and pts.shape[1] != k + 1:
            raise DomainError(f"points have ambient dim {pts.shape[1]}, expected {k + 1}")
        e_rows = np.empty((r, k + 1))
        rmat = np.zeros((r, r))
        for i in range(r):
            w = pts[i].copy()
            for _ in range(2):
                for j in range(i):
                    w -= (e_rows[j] @ w) * e_rows[j]
            nrm = float(np.linalg.norm(w))
            if nrm <= 1e-10:
                raise DomainError("sequence is numerically rank-deficient")
            e_rows[i] = w / nrm
            rmat[: i + 1, i] = e_rows[: i + 1] @ pts[i]
        return cls(points=pts, E=e_rows, R=rmat, k=k, c=c, perfect_bound=perfect_bound)


@dataclass(frozen=True)
class RegionSample:
    samples: np.ndarray
    n_candidates: int
    n_accepted: int

    @property
    def acceptance_rate(self) -> float:
        return self.n_accepted / self.n_candidates if self.n_candidates else math.nan


def sample_direct(geom: RegionGeometry, color: str, n_target: int,
                  rng: np.random.Generator, max_candidates: int,
                  batch: int = DEFAULT_BATCH) -> RegionSample:
    """Full ambient vectors conditioned on the region, by plain rejection."""
    accepted: list[np.ndarray] = []
    got = 0
    used = 0
    while got < n_target:
        if used >= max_candidates:
            raise RejectionExhaustedError(
                f"{used} candidates produced only {got}/{n_target} region samples")
        b = min(batch, max_candidates - used)
        z = sample_unit_vectors(geom.k, b, rng)
        used += b
        if geom.r == 0:
            mask = np.ones(b, dtype=bool)
        else:
            inner = z @ geom.points.T
            mask = _color_mask(inner, geom.h, color)
            if geom.perfect_bound is not None:
                w = z @ geom.E.T
                mask &= np.einsum("ij,ij->i", w, w) <= geom.perfect_bound ** 2
        hits = z[mask]
        if hits.shape[0]:
            accepted.append(hits[: n_target - got])
            got += min(hits.shape[0], n_target - got)
    out = np.vstack(accepted) if accepted else np.empty((0, geom.k + 1))
    return RegionSample(samples=out, n_candidates=used, n_accepted=got)


def sample_coords(geom: RegionGeometry, color: str, n_target: int,
                  rng: np.random.Generator, max_candidates: int,
                  batch: int = 1 << 16) -> RegionSample:
    """Span coordinates of region samples; cost independent of ambient k.

    Returns the coordinates w of accepted candidates on the sequence basis E
    (so the inner products with the sequence are w @ R and the projection
    onto any prefix span is a coordinate prefix).
    """
    if geom.r == 0:
        raise DomainError("in-span sampling needs a nonempty sequence")
    accepted: list[np.ndarray] = []
    got = 0
    used = 0
    while got < n_target:
        if used >= max_candidates:
            raise RejectionExhaustedError(
                f"{used} candidates produced only {got}/{n_target} region samples")
        b = min(batch, max_candidates - used)
        w = sample_span_coords(geom.k, geom.r, b, rng)
        used += b
        inner = w @ geom.R
        mask = _color_mask(inner, geom.h, color)
        if geom.perfect_bound is not None:
            mask &= np.einsum("ij,ij->i", w, w) <= geom.perfect_bound ** 2
        hits = w[mask]
        if hits.shape[0]:
            accepted.append(hits[: n_target - got])
            got += min(hits.shape[0], n_target - got)
    out = np.vstack(accepted) if accepted else np.empty((0, geom.r))
    return RegionSample(samples=out, n_candidates=used, n_accepted=got)


def embed_coords(geom: RegionGeometry, w: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Lift span coordinates back to full sphere points.

    Conditioned on its span component, a uniform sphere point is uniform on
    the complement sphere of the remaining radius; a fresh Gaussian draw
    projected off the span realizes that.
    """
    w = np.atleast_2d(w)
    n = w.shape[0]
    g = rng.standard_normal((n, geom.k + 1))
    g -= (g @ geom.E.T) @ geom.E
    g /= np.linalg.norm(g, axis=1)[:, None]
    radial = np.sqrt(np.clip(1.0 - np.einsum("ij,ij->i", w, w), 0.0, None))
    return w @ geom.E + radial[:, None] * g


def sample_in_region(seq, color: str, c: float, k: int, rng: np.random.Generator,
                     perfect_bound: float | None = None, n: int = 1,
                     max_tries: int = 10 ** 7) -> RegionSample:
    """Uniform samples from a (perfect) red/blue common neighborhood.

    Rejection from the uniform sphere is the only conditioning mechanism;
    acceptance counts are recorded on the result.  Raises
    RejectionExhaustedError when max_tries candidates do not suffice.
    """
    geom = RegionGeometry.build(seq, k=k, c=c, perfect_bound=perfect_bound)
    return sample_direct(geom, color, n, rng, max_candidates=max_tries)


def sample_chain_factors(k: int, r: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Upper-triangular coordinate factors of n independent uniform r-tuples.

    Column j of each factor holds the coordinates of the (j+1)-th point on
    the orthonormal basis of its predecessors, drawn from the exact span
    marginal; the diagonal carries the leftover radial part.  The pairwise
    inner products of the tuple are recovered as F^T F.
    """
    if r < 1:
        raise DomainError(f"tuple length must be >= 1, got {r}")
    if r > k:
        raise DomainError(f"tuple length {r} exceeds sphere dimension {k}")
    f = np.zeros((n, r, r))
    f[:, 0, 0] = 1.0
    for j in range(1, r):
        w = sample_span_coords(k, j, n, rng)
        f[:, :j, j] = w
        f[:, j, j] = np.sqrt(np.clip(1.0 - np.einsum("ij,ij->i", w, w), 0.0, None))
    return f


def chain_gram(factors: np.ndarray) -> np.ndarray:
    return np.einsum("bmi,bmj->bij", factors, factors)


def chain_clique_mask(factors: np.ndarray, h: float, color: str) -> np.ndarray:
    """Which tuples induce a monochromatic clique of the requested color."""
    gram = chain_gram(factors)
    r = factors.shape[1]
    iu = np.triu_indices(r, k=1)
    off = gram[:, iu[0], iu[1]]
    if color == "red":
        return np.all(off <= h, axis=1)
    if color == "blue":
        return np.all(off > h, axis=1)
    raise DomainError(f"color must be 'red' or 'blue', got {color!r}")


def chain_perfect_mask(factors: np.ndarray, bound: float) -> np.ndarray:
    """Which tuples are perfect: every prefix projection norm within bound."""
    r = factors.shape[1]
    if r == 1:
        return np.ones(factors.shape[0], dtype=bool)
    ok = np.ones(factors.shape[0], dtype=bool)
    for j in range(1, r):
        proj_sq = np.einsum("bm,bm->b", factors[:, :j, j], factors[:, :j, j])
        ok &= proj_sq <= bound * bound
    return ok

"""Monte Carlo estimators for clique probabilities, conditional measures,
coefficient means, and projection inner products, with quadrature oracles.

All estimators are pure functions of (seed, workers) plus their parameters:
each worker chunk draws from its own counter-based substream and reductions
run in worker order.  Requests outside the desk-scale envelope are rejected
up front rather than silently truncated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as _sp

from .constants import alpha_coefficient, solve_p_C
from .errors import DomainError, InfeasibleParametersError, RejectionExhaustedError
from .geometry import (
    cap_probability,
    log_marginal_norm,
    projection_norm_tail,
    sample_span_coords,
    sample_unit_vectors,
    solve_cap_threshold,
)
from .mc import (
    MCEstimate,
    PredictionComparison,
    chunk_counts,
    from_binomial,
    from_moments,
    ks_critical_value,
    substream,
)
from .regions import (
    RegionGeometry,
    chain_clique_mask,
    chain_perfect_mask,
    sample_chain_factors,
    sample_coords,
    sample_direct,
)
from .sequences import is_perfect, perfect_bound

# Desk-scale envelope: beyond this the estimators are not honest at
# interactive cost, so requests are refused outright.
DESK_MAX_K = 30_000
DESK_MAX_R = 8
DESK_MAX_SAMPLES = 10 ** 8

REJECTION_FACTOR = 4000  # candidate budget per requested conditioned sample


def _check_envelope(k: int, r: int, n: int) -> None:
    if k > DESK_MAX_K:
        raise InfeasibleParametersError(
            f"k={k} exceeds the desk-scale envelope (k <= {DESK_MAX_K})")
    if r > DESK_MAX_R:
        raise InfeasibleParametersError(
            f"r={r} exceeds the desk-scale envelope (r <= {DESK_MAX_R})")
    if n > DESK_MAX_SAMPLES:
        raise InfeasibleParametersError(
            f"N={n} exceeds the desk-scale envelope (N <= {DESK_MAX_SAMPLES})")


def _default_alpha(C: float) -> float:
    return alpha_coefficient(C, solve_p_C(C))


# ---------------------------------------------------------------------------
# clique probabilities


def estimate_clique_prob(k: int, p: float, r: int, color: str, n_samples: int,
                         seed: int, workers: int = 1, method: str = "auto") -> MCEstimate:
    """Probability that a random r-tuple induces a monochromatic clique.

    method "direct" samples full ambient tuples; "chain" samples the exact
    joint law of the pairwise inner products through triangular coordinate
    factors, which is orders of magnitude cheaper at large k.  "auto" picks
    "chain" above k = 256.  Both are unbiased samplers of the same quantity.
    """
    if r < 2:
        raise DomainError(f"clique size must be >= 2, got {r}")
    if n_samples < 1000:
        raise DomainError(f"need at least 1000 samples, got {n_samples}")
    _check_envelope(k, r, n_samples)
    if method == "auto":
        method = "chain" if k > 256 else "direct"
    c = solve_cap_threshold(k, p).c
    h = -c / math.sqrt(k)
    hits = 0
    for w, n_chunk in enumerate(chunk_counts(n_samples, workers)):
        if n_chunk == 0:
            continue
        rng = substream(seed, f"clique-{method}", w)
        hits += _clique_hits(k, r, h, color, n_chunk, rng, method)
    return from_binomial(hits, n_samples, seed, workers)


def _clique_hits(k: int, r: int, h: float, color: str, n: int,
                 rng: np.random.Generator, method: str) -> int:
    hits = 0
    if method == "direct":
        batch = max(1, (1 << 27) // (8 * r * (k + 1)))
        done = 0
        while done < n:
            b = min(batch, n - done)
            z = sample_unit_vectors(k, b * r, rng).reshape(b, r, k + 1)
            gram = np.einsum("bik,bjk->bij", z, z)
            iu = np.triu_indices(r, k=1)
            off = gram[:, iu[0], iu[1]]
            ok = np.all(off <= h, axis=1) if color == "red" else np.all(off > h, axis=1)
            hits += int(np.count_nonzero(ok))
            done += b
    elif method == "chain":
        batch = 1 << 16
        done = 0
        while done < n:
            b = min(batch, n - done)
            f = sample_chain_factors(k, r, b, rng)
            hits += int(np.count_nonzero(chain_clique_mask(f, h, color)))
            done += b
    else:
        raise DomainError(f"unknown method {method!r}")
    return hits


def exact_pair_region_prob(k: int, rho: float, c: float, color: str) -> float:
    """Measure of the common red/blue neighborhood of a pair at inner product rho.

    The span coordinates (u, v) of a uniform sphere point carry the density
    proportional to (1-u^2-v^2)^((k-3)/2); integrating out v exactly leaves a
    1-D integral of the cap CDF one dimension down against the 1-D marginal,
    which adaptive quadrature evaluates to ~1e-11.
    """
    if k < 3:
        raise DomainError(f"pair-region quadrature needs k >= 3, got {k}")
    if not abs(rho) < 1.0:
        raise DomainError(f"pair inner product must lie in (-1, 1), got {rho!r}")
    if color not in ("red", "blue"):
        raise DomainError(f"color must be 'red' or 'blue', got {color!r}")
    h = -c / math.sqrt(k)
    s = math.sqrt((1.0 - rho) * (1.0 + rho))
    log_norm = log_marginal_norm(k)

    def weight(u: float) -> float:
        return math.exp(0.5 * (k - 2) * math.log1p(-u * u) - log_norm)

    def t_cut(u: float) -> float:
        denom = s * math.sqrt((1.0 - u) * (1.0 + u))
        if denom == 0.0:
            return math.inf if h - rho * u > 0 else -math.inf
        return (h - rho * u) / denom

    def cap_clipped(t: float) -> float:
        if t <= -1.0:
            return 0.0
        if t >= 1.0:
            return 1.0
        return cap_probability(k - 1, t)

    span = 48.0 / math.sqrt(k)
    if color == "red":
        lo, hi = max(-1.0, h - span), h

        def integrand(u: float) -> float:
            return weight(u) * cap_clipped(t_cut(u))
    else:
        lo, hi = h, min(1.0, h + span)

        def integrand(u: float) -> float:
            return weight(u) * (1.0 - cap_clipped(t_cut(u)))

    val, _ = integrate.quad(integrand, lo, hi, epsabs=1e-11, epsrel=1e-11, limit=400)
    return float(val)


# ---------------------------------------------------------------------------
# conditioned region sampling and kappa ratios


@dataclass(frozen=True)
class KappaEstimate:
    estimate: MCEstimate
    n_tuples: int
    n_secondary: int
    tuple_values: np.ndarray | None = None


def estimate_kappa(k: int, p: float, ell: float, C: float, r: int, color: str,
                   n_tuples: int, seed: int, workers: int = 1,
                   alpha: float | None = None, n_secondary: int = 512,
                   with_samples: bool = False) -> KappaEstimate:
    """Conditional mean of the perfect-neighborhood measure over perfect
    monochromatic r-tuples (the ratio of consecutive perfect clique
    probabilities).

    Tuples are rejection-sampled from the exact chain law conditioned on
    (monochromatic clique, perfect); each accepted tuple gets a secondary
    hit-sampling estimate of its perfect-neighborhood measure.  The reported
    standard error is the spread of per-tuple estimates over sqrt(#tuples),
    which includes the secondary sampling noise.
    """
    if r < 1:
        raise DomainError(f"need r >= 1, got {r}")
    _check_envelope(k, r + 1, n_tuples * n_secondary)
    alpha = _default_alpha(C) if alpha is None else alpha
    bound = perfect_bound(alpha, ell, k)
    c = solve_cap_threshold(k, p).c
    h = -c / math.sqrt(k)
    values: list[np.ndarray] = []
    for w, t_chunk in enumerate(chunk_counts(n_tuples, workers)):
        if t_chunk == 0:
            continue
        rng = substream(seed, "kappa", w)
        factors = _conditioned_tuples(k, r, h, color, bound, t_chunk, rng)
        vals = np.empty(t_chunk)
        for i in range(t_chunk):
            vals[i] = _perfect_region_measure(factors[i], k, h, color, bound,
                                              n_secondary, rng)
        values.append(vals)
    all_vals = np.concatenate(values) if values else np.empty(0)
    est = from_moments(float(np.sum(all_vals)), float(np.sum(all_vals ** 2)),
                       all_vals.size, seed, workers,
                       n_samples=n_tuples * n_secondary)
    return KappaEstimate(estimate=est, n_tuples=n_tuples, n_secondary=n_secondary,
                         tuple_values=all_vals if with_samples else None)


def _conditioned_tuples(k: int, r: int, h: float, color: str, bound: float,
                        n: int, rng: np.random.Generator) -> np.ndarray:
    if r == 1:
        return sample_chain_factors(k, 1, n, rng)
    out = []
    got = 0
    used = 0
    budget = REJECTION_FACTOR * max(n, 1000)
    while got < n:
        if used >= budget:
            raise RejectionExhaustedError(
                f"{used} tuple candidates produced only {got}/{n} conditioned tuples")
        b = min(1 << 14, budget - used)
        f = sample_chain_factors(k, r, b, rng)
        used += b
        mask = chain_clique_mask(f, h, color) & chain_perfect_mask(f, bound)
        hits = f[mask]
        if hits.shape[0]:
            out.append(hits[: n - got])
            got += min(hits.shape[0], n - got)
    return np.concatenate(out, axis=0)


def _perfect_region_measure(factor: np.ndarray, k: int, h: float, color: str,
                            bound: float, n_secondary: int,
                            rng: np.random.Generator) -> float:
    """Hit fraction of uniform points landing in the perfect neighborhood."""
    r = factor.shape[0]
    w = sample_span_coords(k, r, n_secondary, rng)
    inner = w @ factor
    if color == "red":
        ok = np.all(inner <= h, axis=1)
    else:
        ok = np.all(inner > h, axis=1)
    ok &= np.einsum("ij,ij->i", w, w) <= bound * bound
    return float(np.count_nonzero(ok)) / n_secondary


def estimate_perfect_clique_prob(k: int, p: float, ell: float, C: float, r: int,
                                 color: str, n_samples: int, seed: int,
                                 workers: int = 1, alpha: float | None = None) -> MCEstimate:
    """Probability that a random r-tuple is simultaneously monochromatic and perfect."""
    if r < 2:
        raise DomainError(f"need r >= 2, got {r}")
    _check_envelope(k, r, n_samples)
    alpha = _default_alpha(C) if alpha is None else alpha
    bound = perfect_bound(alpha, ell, k)
    c = solve_cap_threshold(k, p).c
    h = -c / math.sqrt(k)
    hits = 0
    for w, n_chunk in enumerate(chunk_counts(n_samples, workers)):
        if n_chunk == 0:
            continue
        rng = substream(seed, "perfect-clique", w)
        done = 0
        while done < n_chunk:
            b = min(1 << 16, n_chunk - done)
            f = sample_chain_factors(k, r, b, rng)
            mask = chain_clique_mask(f, h, color) & chain_perfect_mask(f, bound)
            hits += int(np.count_nonzero(mask))
            done += b
    return from_binomial(hits, n_samples, seed, workers)


# ---------------------------------------------------------------------------
# Q ratios (conditional neighborhood measure after appending a point)


@dataclass(frozen=True)
class QEstimate:
    comparison: PredictionComparison
    inner_expectation: float
    n_denominator: int


def estimate_Q(seq, y, color: str, p: float, alpha: float, ell: float,
               n_samples: int, seed: int, workers: int = 1) -> QEstimate:
    """Ratio of perfect-neighborhood measures of (seq, y) to seq.

    Sampled as a conditional hit fraction on a shared candidate stream; the
    first-order prediction couples the cap density with the mean projected
    inner product between y and the conditioned samples, estimated from the
    same stream.
    """
    pts = np.atleast_2d(np.asarray(seq, dtype=float))
    y = np.asarray(y, dtype=float)
    k = pts.shape[1] - 1
    r = pts.shape[0]
    _check_envelope(k, r + 1, n_samples)
    stacked = np.vstack([pts, y[None, :]])
    verdict = is_perfect(stacked, alpha, ell, k)
    if not verdict.is_perfect:
        raise DomainError("(seq, y) must be a perfect sequence")
    bound = verdict.bound
    c = solve_cap_threshold(k, p).c
    h = -c / math.sqrt(k)
    geom = RegionGeometry.build(stacked, k=k, c=c, perfect_bound=bound)

    den = num = 0
    dot_sum = 0.0
    for w, n_chunk in enumerate(chunk_counts(n_samples, workers)):
        if n_chunk == 0:
            continue
        rng = substream(seed, "q-ratio", w)
        done = 0
        budget = REJECTION_FACTOR * n_chunk
        used = 0
        while done < n_chunk:
            if used >= budget:
                raise RejectionExhaustedError(
                    f"{used} candidates produced only {done}/{n_chunk} denominator hits")
            b = min(1 << 16, budget - used)
            wc = sample_span_coords(k, r + 1, b, rng)
            used += b
            inner = wc @ geom.R
            if color == "red":
                den_mask = np.all(inner[:, :r] <= h, axis=1)
            else:
                den_mask = np.all(inner[:, :r] > h, axis=1)
            den_mask &= np.einsum("ij,ij->i", wc[:, :r], wc[:, :r]) <= bound * bound
            wd = wc[den_mask]
            if not wd.shape[0]:
                continue
            take = wd[: n_chunk - done]
            done += take.shape[0]
            den += take.shape[0]
            inner_t = take @ geom.R
            if color == "red":
                num_mask = inner_t[:, r] <= h
            else:
                num_mask = inner_t[:, r] > h
            num_mask &= np.einsum("ij,ij->i", take, take) <= bound * bound
            num += int(np.count_nonzero(num_mask))
            # <pi_[r](y), pi_[r](z)>: y's span coordinates are column r of R.
            dot_sum += float(np.sum(take[:, :r] @ geom.R[:r, r]))

    q_hat = num / den if den else math.nan
    se = math.sqrt(max(q_hat * (1.0 - q_hat), 0.0) / den) if den else math.nan
    inner_mean = dot_sum / den if den else math.nan
    scale = math.sqrt(k / (2.0 * math.pi)) * math.exp(-0.5 * c * c)
    if color == "red":
        prediction = p - scale * inner_mean
        source = "p - sqrt(k/(2*pi))*exp(-c^2/2)*E[<proj y, proj z>]"
    else:
        prediction = 1.0 - p + scale * inner_mean
        source = "1 - p + sqrt(k/(2*pi))*exp(-c^2/2)*E[<proj y, proj z>]"
    est = MCEstimate(q_hat, se, n_samples, den, seed, workers)
    return QEstimate(comparison=PredictionComparison(est, prediction, source),
                     inner_expectation=inner_mean, n_denominator=den)


# ---------------------------------------------------------------------------
# coefficient means and projection inner products


def sample_perfect_sequence(k: int, r: int, alpha: float, ell: float,
                            rng: np.random.Generator, max_tries: int = 200) -> np.ndarray:
    """Uniform r-tuple conditioned on being perfect (usually the first draw)."""
    bound = perfect_bound(alpha, ell, k)
    for _ in range(max_tries):
        pts = sample_unit_vectors(k, r, rng)
        verdict = is_perfect(pts, alpha, ell, k)
        if verdict.is_perfect:
            return pts
    raise RejectionExhaustedError(
        f"no perfect sequence of length {r} in {max_tries} tries at bound {bound:g}")


def estimate_coefficient_mean(k: int, p: float, r: int, s_index: int, color: str,
                              n_samples: int, seed: int, workers: int = 1,
                              alpha: float | None = None, ell: float | None = None,
                              C: float = 2.0, points=None) -> PredictionComparison:
    """Mean corner coordinate E[a_s] for points conditioned into the perfect
    red/blue neighborhood of a perfect sequence.

    The span coordinates of each accepted candidate give its corner
    coordinates exactly (a = w @ R); the first-order prediction is the
    normal hazard mean at the cap threshold scaled into the span.
    """
    if not 1 <= s_index <= r:
        raise DomainError(f"need 1 <= s_index <= r, got {s_index}")
    _check_envelope(k, r, n_samples)
    alpha = _default_alpha(C) if alpha is None else alpha
    ell = float(r) if ell is None else ell
    bound = perfect_bound(alpha, ell, k)
    c = solve_cap_threshold(k, p).c
    if points is None:
        points = sample_perfect_sequence(k, r, alpha, ell, substream(seed, "coef-seq"))
    else:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if not is_perfect(points, alpha, ell, k).is_perfect:
            raise DomainError("supplied sequence must be perfect")
    geom = RegionGeometry.build(points, k=k, c=c, perfect_bound=bound)

    total = total_sq = 0.0
    got = 0
    for w, n_chunk in enumerate(chunk_counts(n_samples, workers)):
        if n_chunk == 0:
            continue
        rng = substream(seed, "coef-mean", w)
        res = sample_coords(geom, color, n_chunk, rng,
                            max_candidates=REJECTION_FACTOR * n_chunk)
        coeffs = res.samples @ geom.R[:, s_index - 1]
        total += float(np.sum(coeffs))
        total_sq += float(np.sum(coeffs ** 2))
        got += res.n_accepted
    est = from_moments(total, total_sq, got, seed, workers, n_samples=n_samples)
    scale = math.exp(-0.5 * c * c) / math.sqrt(2.0 * math.pi * k)
    if color == "red":
        prediction = -scale / p
        source = "-exp(-c^2/2)/(p*sqrt(2*pi*k))"
    else:
        prediction = scale / (1.0 - p)
        source = "exp(-c^2/2)/((1-p)*sqrt(2*pi*k))"
    return PredictionComparison(est, prediction, source)


def estimate_projection_inner(k: int, p: float, r: int, s: int, color: str,
                              n_samples: int, seed: int, workers: int = 1,
                              alpha: float | None = None, ell: float | None = None,
                              C: float = 2.0, points=None) -> PredictionComparison:
    """Mean of <pi_[s](y), pi_[s](z)> for y, z independently conditioned into
    the perfect neighborhoods of the full sequence and of its s-prefix.

    s may equal r (both points then condition on the full sequence).  The
    projections live in the span of the first s basis vectors, so only span
    coordinates are sampled.
    """
    if not 0 <= s <= r:
        raise DomainError(f"need 0 <= s <= r, got s={s}, r={r}")
    _check_envelope(k, r, n_samples)
    alpha = _default_alpha(C) if alpha is None else alpha
    ell = float(r) if ell is None else ell
    c = solve_cap_threshold(k, p).c
    if color == "red":
        prediction = math.exp(-c * c) / (2.0 * math.pi * p * p) * s / k
        source = "exp(-c^2)/(2*pi*p^2) * s/k"
    else:
        prediction = math.exp(-c * c) / (2.0 * math.pi * (1.0 - p) ** 2) * s / k
        source = "exp(-c^2)/(2*pi*(1-p)^2) * s/k"
    if s == 0:
        est = MCEstimate(0.0, 0.0, n_samples, n_samples, seed, workers)
        return PredictionComparison(est, prediction, source)
    bound = perfect_bound(alpha, ell, k)
    if points is None:
        points = sample_perfect_sequence(k, r, alpha, ell, substream(seed, "proj-seq"))
    else:
        points = np.atleast_2d(np.asarray(points, dtype=float))
    geom_full = RegionGeometry.build(points, k=k, c=c, perfect_bound=bound)
    geom_pre = RegionGeometry.build(points[:s], k=k, c=c, perfect_bound=bound)

    total = total_sq = 0.0
    got = 0
    for w, n_chunk in enumerate(chunk_counts(n_samples, workers)):
        if n_chunk == 0:
            continue
        rng_y = substream(seed, "proj-inner-y", w)
        rng_z = substream(seed, "proj-inner-z", w)
        wy = sample_coords(geom_full, color, n_chunk, rng_y,
                           max_candidates=REJECTION_FACTOR * n_chunk).samples
        wz = sample_coords(geom_pre, color, n_chunk, rng_z,
                           max_candidates=REJECTION_FACTOR * n_chunk).samples
        prods = np.einsum("ij,ij->i", wy[:, :s], wz[:, :s])
        total += float(np.sum(prods))
        total_sq += float(np.sum(prods ** 2))
        got += n_chunk
    est = from_moments(total, total_sq, got, seed, workers, n_samples=n_samples)
    return PredictionComparison(est, prediction, source)


# ---------------------------------------------------------------------------
# complement uniformity (hat-z) and perfect fraction


@dataclass(frozen=True)
class HatzReport:
    n: int
    r: int
    k: int
    ks_stats: np.ndarray
    ks_max: float
    ks_critical: float
    corr: float
    corr_bound: float

    @property
    def ks_pass(self) -> bool:
        return self.ks_max <= self.ks_critical

    @property
    def corr_pass(self) -> bool:
        return abs(self.corr) <= self.corr_bound

    @property
    def passed(self) -> bool:
        return self.ks_pass and self.corr_pass


def hatz_uniformity_test(seq, color: str, n_samples: int, seed: int, *,
                         p: float, k: int | None = None,
                         alpha: float | None = None,
                         ell: float | None = None, C: float = 2.0,
                         significance: float = 1e-3) -> HatzReport:
    """Distributional test of the off-span part of conditioned samples.

    Samples z from the (perfect) neighborhood with the direct full-vector
    sampler, splits z into its span part and normalized complement part,
    and

    * KS-tests every complement coordinate against the exact 1-D marginal
      of the uniform law on the complement sphere (Bonferroni-adjusted
      critical value at the family significance), and
    * checks that the span radius is uncorrelated with a fixed complement
      coordinate.

    With an empty sequence (r = 0, then k must be passed) this reduces to a
    uniformity self-test of the sphere sampler.
    """
    arr = np.asarray(seq, dtype=float)
    if arr.size:
        pts = np.atleast_2d(arr)
        r = pts.shape[0]
        k = pts.shape[1] - 1
    else:
        if k is None:
            raise DomainError("an empty sequence needs an explicit sphere dimension k")
        r = 0
        pts = np.empty((0, k + 1))
    _check_envelope(k, max(r, 1), n_samples)
    alpha = _default_alpha(C) if alpha is None else alpha
    ell = float(max(r, 1)) if ell is None else ell
    bound = perfect_bound(alpha, ell, k)
    c = solve_cap_threshold(k, p).c
    geom = RegionGeometry.build(pts, k=k, c=c, perfect_bound=bound if r else None)
    rng = substream(seed, "hatz")
    z = sample_direct(geom, color, n_samples, rng,
                      max_candidates=REJECTION_FACTOR * n_samples).samples

    if r > 0:
        span_coords = z @ geom.E.T
        zhat = z - span_coords @ geom.E
        span_radius = np.linalg.norm(span_coords, axis=1)
    else:
        zhat = z
        span_radius = np.zeros(n_samples)
    hat_norm = np.linalg.norm(zhat, axis=1)
    u = zhat / hat_norm[:, None]

    # Orthonormal completion of the span basis.
    if r > 0:
        full = np.hstack([geom.E.T, np.eye(k + 1)])
        q, _ = np.linalg.qr(full)
        comp = q[:, r:k + 1]
    else:
        comp = np.eye(k + 1)
    coords = u @ comp  # (n, k+1-r), each column follows the S^{k-r} marginal

    def marginal_cdf(t: np.ndarray) -> np.ndarray:
        kk = k - r
        x = np.clip(t * t, 0.0, 1.0)
        lower = 0.5 * _sp.betaincc(0.5, 0.5 * kk, x)
        upper = 0.5 + 0.5 * _sp.betainc(0.5, 0.5 * kk, x)
        return np.where(t <= 0.0, lower, upper)

    m = coords.shape[1]
    srt = np.sort(coords, axis=0)
    grid = (np.arange(1, n_samples + 1) / n_samples)[:, None]
    f = marginal_cdf(srt)
    ks_stats = np.maximum(np.max(grid - f, axis=0),
                          np.max(f - (grid - 1.0 / n_samples), axis=0))
    ks_crit = ks_critical_value(n_samples, significance / m)

    if r > 0 and np.std(span_radius) > 0:
        corr = float(np.corrcoef(span_radius, coords[:, 0])[0, 1])
    else:
        corr = 0.0
    return HatzReport(n=n_samples, r=r, k=k, ks_stats=ks_stats,
                      ks_max=float(np.max(ks_stats)), ks_critical=float(ks_crit),
                      corr=corr, corr_bound=4.0 / math.sqrt(n_samples))


@dataclass(frozen=True)
class PerfectFractionReport:
    estimate: MCEstimate
    union_lower_bound: float      # 1 - r * (beta tail at dim r); loose, assertable
    prefix_tail_bound: float      # 1 - sum of exact per-prefix tails; nearly tight
    half_threshold_bound: float   # 1 - (r-1) * tail at half the bound


def perfect_fraction(k: int, ell: float, C: float, r: int, n_samples: int,
                     seed: int, workers: int = 1,
                     alpha: float | None = None) -> PerfectFractionReport:
    """Fraction of uniform r-tuples that are perfect, with analytic bounds."""
    if r < 1:
        raise DomainError(f"need r >= 1, got {r}")
    _check_envelope(k, r, n_samples)
    alpha = _default_alpha(C) if alpha is None else alpha
    bound = perfect_bound(alpha, ell, k)
    hits = 0
    for w, n_chunk in enumerate(chunk_counts(n_samples, workers)):
        if n_chunk == 0:
            continue
        rng = substream(seed, "perfect-fraction", w)
        done = 0
        while done < n_chunk:
            b = min(1 << 16, n_chunk - done)
            f = sample_chain_factors(k, r, b, rng)
            hits += int(np.count_nonzero(chain_perfect_mask(f, bound)))
            done += b
    est = from_binomial(hits, n_samples, seed, workers)
    tails = [projection_norm_tail(k, i, min(bound, 1.0)) for i in range(1, r)]
    prefix_lb = max(0.0, 1.0 - sum(tails))
    union_lb = max(0.0, 1.0 - r * projection_norm_tail(k, min(r, k), min(bound, 1.0)))
    dim = min(max(math.ceil(C * ell), r), k)
    half_tail = projection_norm_tail(k, dim, min(bound / 2.0, 1.0)) if r > 1 else 0.0
    half_lb = 1.0 - (r - 1) * half_tail
    return PerfectFractionReport(estimate=est, union_lower_bound=union_lb,
                                 prefix_tail_bound=prefix_lb,
                                 half_threshold_bound=half_lb)

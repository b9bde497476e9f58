import math

import numpy as np
import pytest

from sphere_ramsey import geometry, regions
from sphere_ramsey.errors import DomainError, RejectionExhaustedError
from sphere_ramsey.mc import substream


def test_sample_in_region_respects_constraints():
    rng = substream(30, "t-regions")
    k, p = 120, 0.382
    c = geometry.solve_cap_threshold(k, p).c
    pts = geometry.sample_unit_vectors(k, 2, rng)
    res = regions.sample_in_region(pts, "red", c, k, rng, n=500)
    h = -c / math.sqrt(k)
    inner = res.samples @ pts.T
    assert np.all(inner <= h)
    assert res.n_accepted == 500
    assert res.n_candidates >= 500

    res_b = regions.sample_in_region(pts, "blue", c, k, rng, n=500)
    assert np.all(res_b.samples @ pts.T > h)


def test_sample_in_region_perfect_constraint():
    rng = substream(31, "t-regions")
    k, p = 150, 0.382
    c = geometry.solve_cap_threshold(k, p).c
    pts = geometry.sample_unit_vectors(k, 2, rng)
    bound = 0.25
    geom = regions.RegionGeometry.build(pts, k=k, c=c, perfect_bound=bound)
    res = regions.sample_direct(geom, "red", 300, rng, max_candidates=10 ** 7)
    w = res.samples @ geom.E.T
    assert np.all(np.einsum("ij,ij->i", w, w) <= bound ** 2 + 1e-15)


def test_single_point_acceptance_rate_is_p():
    rng = substream(32, "t-regions")
    k, p = 90, 0.31
    c = geometry.solve_cap_threshold(k, p).c
    pts = geometry.sample_unit_vectors(k, 1, rng)
    res = regions.sample_in_region(pts, "red", c, k, rng, n=20_000)
    rate = res.acceptance_rate
    se = math.sqrt(p * (1 - p) / res.n_candidates)
    assert rate == pytest.approx(p, abs=4 * se)


def test_rejection_budget_exhausts():
    rng = substream(33, "t-regions")
    k = 60
    c = geometry.solve_cap_threshold(k, 0.05).c
    pts = geometry.sample_unit_vectors(k, 3, rng)
    with pytest.raises(RejectionExhaustedError):
        regions.sample_in_region(pts, "red", c, k, rng, n=1000, max_tries=2000)


def test_coords_and_direct_agree_in_law():
    # same conditional law through the ambient and in-span samplers
    rng = substream(34, "t-regions")
    k, p = 400, 0.382
    c = geometry.solve_cap_threshold(k, p).c
    pts = geometry.sample_unit_vectors(k, 2, rng)
    geom = regions.RegionGeometry.build(pts, k=k, c=c)
    n = 4000
    direct = regions.sample_direct(geom, "red", n, rng, max_candidates=10 ** 7)
    w_direct = direct.samples @ geom.E.T
    coords = regions.sample_coords(geom, "red", n, rng, max_candidates=10 ** 7)
    # compare the first in-span coordinate by a two-sample KS at ~4.5 sigma
    a = np.sort(w_direct[:, 0])
    b = np.sort(coords.samples[:, 0])
    emp = np.arange(1, n + 1) / n
    other = np.searchsorted(b, a, side="right") / n
    d = np.max(np.abs(emp - other))
    assert d <= 1.63 * math.sqrt(2.0 / n) * 1.4


def test_embed_coords_consistency():
    rng = substream(35, "t-regions")
    k, p = 200, 0.4
    c = geometry.solve_cap_threshold(k, p).c
    pts = geometry.sample_unit_vectors(k, 3, rng)
    geom = regions.RegionGeometry.build(pts, k=k, c=c)
    coords = regions.sample_coords(geom, "red", 200, rng, max_candidates=10 ** 7)
    z = regions.embed_coords(geom, coords.samples, rng)
    assert np.max(np.abs(np.linalg.norm(z, axis=1) - 1.0)) <= 1e-10
    # embedded points carry the requested span coordinates and stay in region
    w_back = z @ geom.E.T
    assert np.max(np.abs(w_back - coords.samples)) <= 1e-10
    assert np.all(z @ pts.T <= -c / math.sqrt(k) + 1e-15)


def test_chain_factors_match_gram_law():
    # pairwise inner products from chain factors match full sampling moments
    rng = substream(36, "t-regions")
    k, r, n = 100, 3, 60_000
    f = regions.sample_chain_factors(k, r, n, rng)
    gram = regions.chain_gram(f)
    offdiag = gram[:, 0, 1]
    assert abs(np.mean(offdiag)) <= 4.0 / math.sqrt(n * (k + 1))
    assert np.var(offdiag) == pytest.approx(1.0 / (k + 1), rel=0.05)
    diag = gram[:, np.arange(r), np.arange(r)]
    assert np.max(np.abs(diag - 1.0)) <= 1e-12


def test_chain_masks():
    rng = substream(37, "t-regions")
    k, r, n = 50, 3, 5000
    f = regions.sample_chain_factors(k, r, n, rng)
    gram = regions.chain_gram(f)
    h = -0.05
    mask = regions.chain_clique_mask(f, h, "red")
    iu = np.triu_indices(r, k=1)
    ref = np.all(gram[:, iu[0], iu[1]] <= h, axis=1)
    assert np.array_equal(mask, ref)
    bound = 0.2
    pmask = regions.chain_perfect_mask(f, bound)
    ref_p = np.ones(n, dtype=bool)
    for j in range(1, r):
        ref_p &= np.einsum("bm,bm->b", f[:, :j, j], f[:, :j, j]) <= bound ** 2
    assert np.array_equal(pmask, ref_p)


def test_chain_rejects_bad_sizes():
    rng = substream(38, "t-regions")
    with pytest.raises(DomainError):
        regions.sample_chain_factors(5, 6, 10, rng)
    with pytest.raises(DomainError):
        regions.sample_chain_factors(5, 0, 10, rng)

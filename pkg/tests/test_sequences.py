import math

import numpy as np
import pytest

from sphere_ramsey import geometry, sequences
from sphere_ramsey.errors import DomainError, SingularSequenceError
from sphere_ramsey.mc import substream


def unit(v):
    return v / np.linalg.norm(v)


def pair_sequence(k, rho):
    x1 = np.zeros(k + 1)
    x1[0] = 1.0
    x2 = np.zeros(k + 1)
    x2[0] = rho
    x2[1] = math.sqrt(1.0 - rho * rho)
    return np.array([x1, x2])


def test_orthogonal_sequence_is_perfect():
    pts = np.eye(6)[:4]
    v = sequences.is_perfect(pts, alpha=1.0, ell=1.0, k=5)
    assert v.is_perfect
    assert np.allclose(v.per_index_norms, 0.0)


def test_duplicate_point_not_perfect():
    pts = pair_sequence(10, 1.0 - 1e-16)  # numerically x2 == x1
    pts[1] = pts[0]
    v = sequences.is_perfect(pts, alpha=1.0, ell=1.0, k=10)  # bound < 1
    assert v.bound < 1.0
    assert not v.is_perfect
    assert v.per_index_norms[0] == pytest.approx(1.0, abs=1e-12)


def test_singleton_perfect_by_convention():
    pts = np.eye(5)[:1]
    assert sequences.is_perfect(pts, alpha=0.0, ell=1.0, k=4).is_perfect


def test_prefix_monotonicity():
    rng = substream(7, "t-seq")
    k = 300
    pts = geometry.sample_unit_vectors(k, 8, rng)
    alpha, ell = 3.0, 5.0
    full = sequences.is_perfect(pts, alpha, ell, k)
    if not full.is_perfect:
        pytest.skip("draw was not perfect; seed chosen so this does not happen")
    for r in range(1, 8):
        assert sequences.is_perfect(pts[:r], alpha, ell, k).is_perfect


def test_non_unit_rejected():
    pts = np.eye(4)[:2] * 1.5
    with pytest.raises(DomainError):
        sequences.is_perfect(pts, 1.0, 1.0, 3)


def test_profile_of_perfect_sequence():
    pts = np.eye(6)[:3]
    prof = sequences.non_perfect_index(pts, 1.0, 1.0, 5)
    assert prof.index == 0 and prof.profile == () and prof.faithful


def test_profile_duplicate_position():
    rng = substream(8, "t-seq")
    k = 200
    base = geometry.sample_unit_vectors(k, 4, rng)
    for m in (2, 3, 4):
        pts = base.copy()
        pts[m - 1] = pts[0]  # duplicate lands at position m
        prof = sequences.non_perfect_index(pts, 2.0, 2.0, k)
        assert prof.profile == (m,)
        assert prof.faithful == (m == 4)


def test_profile_trailing_block_is_faithful():
    rng = substream(9, "t-seq")
    k = 200
    base = geometry.sample_unit_vectors(k, 4, rng)
    pts = base.copy()
    pts[2] = base[0]
    pts[3] = base[1]
    prof = sequences.non_perfect_index(pts, 2.0, 2.0, k)
    assert prof.profile == (3, 4) and prof.faithful


def test_faithful_reorder_matches_expected_permutation():
    # profile {2} with r = 4 must produce order (x1, x3, x4, x2), profile {4};
    # the bound 0.5 is wide enough that only the planted duplicate violates it
    rng = substream(10, "t-seq")
    k = 200
    base = geometry.sample_unit_vectors(k, 4, rng)
    pts = base.copy()
    pts[1] = pts[0]
    assert sequences.non_perfect_index(pts, 5.0, 2.0, k).profile == (2,)
    out, perm = sequences.faithful_reorder(pts, 5.0, 2.0, k)
    assert perm == (0, 2, 3, 1)
    prof = sequences.non_perfect_index(out, 5.0, 2.0, k)
    assert prof.profile == (4,) and prof.faithful and prof.index == 1


def test_faithful_reorder_identity_when_faithful():
    rng = substream(11, "t-seq")
    k = 200
    pts = geometry.sample_unit_vectors(k, 5, rng)
    out, perm = sequences.faithful_reorder(pts, 2.0, 2.0, k)
    assert perm == (0, 1, 2, 3, 4)
    out2, perm2 = sequences.faithful_reorder(out, 2.0, 2.0, k)
    assert perm2 == (0, 1, 2, 3, 4)


def test_faithful_reorder_preserves_gram():
    rng = substream(12, "t-seq")
    k = 150
    base = geometry.sample_unit_vectors(k, 5, rng)
    pts = base.copy()
    pts[2] = pts[0]
    out, perm = sequences.faithful_reorder(pts, 2.0, 2.0, k)
    g_in = np.sort((pts @ pts.T)[np.triu_indices(5, 1)])
    g_out = np.sort((out @ out.T)[np.triu_indices(5, 1)])
    assert np.allclose(g_in, g_out, atol=1e-14)
    assert sorted(perm) == list(range(5))


def test_dual_basis_orthonormal_input():
    pts = np.eye(7)[:4]
    dec = sequences.dual_basis(pts)
    assert np.allclose(dec.V, dec.X, atol=1e-12)
    assert np.allclose(dec.lambdas, 1.0, atol=1e-12)
    assert np.allclose(dec.mus, 1.0, atol=1e-12)


def test_dual_basis_pair_closed_forms():
    rho = 0.1
    dec = sequences.dual_basis(pair_sequence(30, rho))
    assert dec.lambdas == pytest.approx([1 + rho, 1 - rho], abs=1e-12)
    norms_sq = np.sum(dec.V ** 2, axis=0)
    assert norms_sq == pytest.approx(1.0 / (1 - rho * rho), rel=1e-12)
    rows = sequences.basis_alignment(dec)
    assert rows[1].v_dot_e == pytest.approx(1.0 / math.sqrt(1 - rho * rho), rel=1e-12)
    diag = sequences.spectral_diagnostics(dec)
    assert diag.gram_frob_sq == pytest.approx(2 * rho * rho, rel=1e-12)


def test_dual_basis_invariants_random():
    rng = substream(13, "t-seq")
    k, r = 500, 20
    pts = geometry.sample_unit_vectors(k, r, rng)
    dec = sequences.dual_basis(pts)
    assert np.max(np.abs(dec.V.T @ dec.X - np.eye(r))) <= 1e-9
    assert np.max(np.abs(np.sort(dec.mus) - 1.0 / np.sort(dec.lambdas)[::-1])) <= 1e-9
    assert np.max(np.abs(dec.E.T @ dec.E - np.eye(r))) <= 1e-10
    signs = np.einsum("ij,ij->j", dec.X, dec.E)
    assert np.all(signs > 0)


def test_dual_basis_rejects_rank_deficient():
    pts = np.eye(5)[:3].copy()
    pts[2] = pts[0]
    with pytest.raises(SingularSequenceError):
        sequences.dual_basis(pts)


def test_corner_coordinates_match_inner_products():
    rng = substream(14, "t-seq")
    k, r = 500, 20
    pts = geometry.sample_unit_vectors(k, r, rng)
    dec = sequences.dual_basis(pts)
    for j in range(3):
        y = geometry.sample_unit_vectors(k, 1, rng)[0]
        a = sequences.corner_coordinates(dec, y)
        assert np.max(np.abs(a - pts @ y)) <= 1e-9
        recon = dec.V @ a
        proj = dec.E @ (dec.E.T @ y)
        assert np.max(np.abs(recon - proj)) <= 1e-9


def test_corner_coordinates_of_sequence_points():
    pts = pair_sequence(25, 0.3)
    dec = sequences.dual_basis(pts)
    a = sequences.corner_coordinates(dec, pts[1])
    assert a == pytest.approx([0.3, 1.0], abs=1e-12)


def test_corner_coordinates_orthogonal_point():
    pts = pair_sequence(25, 0.3)
    dec = sequences.dual_basis(pts)
    y = np.zeros(26)
    y[7] = 1.0
    assert np.max(np.abs(sequences.corner_coordinates(dec, y))) <= 1e-10


def test_corner_membership_equivalence():
    rng = substream(15, "t-seq")
    k = 500
    c = geometry.solve_cap_threshold(k, 0.382).c
    h = -c / math.sqrt(k)
    agree = 0
    trials = 300
    for _ in range(trials):
        r = int(rng.integers(2, 21))
        pts = geometry.sample_unit_vectors(k, r, rng)
        dec = sequences.dual_basis(pts)
        y = geometry.sample_unit_vectors(k, 1, rng)[0]
        a = sequences.corner_coordinates(dec, y)
        direct = pts @ y
        for color in ("red", "blue"):
            got = sequences.corner_region_test(a, c, k, color)
            ref = bool(np.all(direct <= h)) if color == "red" else bool(np.all(direct > h))
            agree += int(got == ref)
    assert agree == 2 * trials


def test_spectral_diagnostics_two_paths():
    rng = substream(16, "t-seq")
    pts = geometry.sample_unit_vectors(400, 8, rng)
    dec = sequences.dual_basis(pts)
    diag = sequences.spectral_diagnostics(dec, d=11.0)
    assert diag.gram_frob_sq == pytest.approx(diag.gram_frob_sq_eig, abs=1e-9)
    assert diag.dual_frob_sq == pytest.approx(diag.dual_frob_sq_eig, abs=1e-9)
    assert diag.d == 11.0
    assert diag.dual_proj_sq >= 0.0


def test_spectral_diagnostics_orthonormal_zero():
    dec = sequences.dual_basis(np.eye(9)[:5])
    diag = sequences.spectral_diagnostics(dec)
    assert diag.max_eig_dev <= 1e-12
    assert diag.gram_frob_sq <= 1e-12
    assert diag.dual_proj_sq <= 1e-12


def test_frobenius_shrinks_with_dimension_scale():
    # mean off-diagonal energy scales like 1/D^2 at k = D^2 * ell^2
    rng = substream(17, "t-seq")
    ell, r = 2, 4
    means = {}
    for d in (20, 40):
        k = d * d * ell * ell
        vals = []
        for _ in range(50):
            pts = geometry.sample_unit_vectors(k, r, rng)
            diag = sequences.spectral_diagnostics(sequences.dual_basis(pts))
            vals.append(diag.gram_frob_sq)
        means[d] = np.mean(vals)
    ratio = means[20] / means[40]
    assert 2.0 <= ratio <= 6.0


def test_basis_alignment_identity():
    rng = substream(18, "t-seq")
    pts = geometry.sample_unit_vectors(600, 12, rng)
    dec = sequences.dual_basis(pts)
    for row in sequences.basis_alignment(dec):
        assert row.v_dot_e == pytest.approx(row.gs_identity, abs=1e-9)
        assert row.v_dot_e >= 1.0 - 1e-12
        assert row.e_residual_proj >= 0.0


def test_alignment_gap_scales_with_ell_over_k():
    # <v_i, e_i> - 1 shrinks ~4x when k quadruples at fixed sequence length
    rng = substream(19, "t-seq")
    r = 10
    gaps = {}
    for k in (10_000, 40_000):
        acc = []
        for _ in range(30):
            pts = geometry.sample_unit_vectors(k, r, rng)
            rows = sequences.basis_alignment(sequences.dual_basis(pts))
            acc.extend(row.v_dot_e - 1.0 for row in rows[1:])
        gaps[k] = np.mean(acc)
    ratio = gaps[10_000] / gaps[40_000]
    assert 2.0 <= ratio <= 6.0

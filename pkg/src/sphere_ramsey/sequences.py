"""Perfect-sequence classification and the dual-basis spectral toolkit.

A sequence (x_1, ..., x_r) of unit vectors is *perfect* for a bound
b = alpha*sqrt(ell)/sqrt(k) when every prefix projection satisfies
|pi_{[i]}(x_{i+1})| <= b.  Ties at the bound count as perfect; the
non-perfect profile collects the positions with strict violations.
Positions are 1-based to match the sequence indexing used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .errors import DomainError, SingularSequenceError

UNIT_TOL = 1e-9
RANK_EIG_TOL = 1e-8  # smallest Gram eigenvalue below this => dual vectors blow up


def perfect_bound(alpha: float, ell: float, k: int) -> float:
    return alpha * math.sqrt(ell) / math.sqrt(k)


def _as_points(seq) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(seq, dtype=float))
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise DomainError("sequence must contain at least one vector")
    norms = np.linalg.norm(pts, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise DomainError("sequence entries must be unit vectors")
    return pts


def prefix_projection_norms(seq) -> np.ndarray:
    """|pi_{[i]}(x_{i+1})| for i = 1..r-1.

    The prefix basis grows by modified Gram-Schmidt with a second pass;
    numerically dependent entries leave the span unchanged, so duplicated
    points are handled exactly (their projection norm is 1).
    """
    pts = _as_points(seq)
    r = pts.shape[0]
    norms = np.empty(max(r - 1, 0))
    basis: list[np.ndarray] = []
    for j in range(r):
        x = pts[j]
        if j > 0:
            if basis:
                q = np.array(basis)
                norms[j - 1] = float(np.linalg.norm(q @ x))
            else:
                norms[j - 1] = 0.0
        w = x.copy()
        for _ in range(2):
            for b in basis:
                w -= (b @ w) * b
        nrm = np.linalg.norm(w)
        if nrm > 1e-12:
            basis.append(w / nrm)
    return norms


@dataclass(frozen=True)
class PerfectVerdict:
    is_perfect: bool
    per_index_norms: np.ndarray
    bound: float


def is_perfect(seq, alpha: float, ell: float, k: int) -> PerfectVerdict:
    """Perfectness verdict; a singleton is perfect by convention."""
    norms = prefix_projection_norms(seq)
    bound = perfect_bound(alpha, ell, k)
    return PerfectVerdict(bool(np.all(norms <= bound)), norms, bound)


@dataclass(frozen=True)
class NonPerfectProfile:
    index: int
    profile: tuple[int, ...]  # 1-based positions in {2..r} violating the bound
    faithful: bool


def non_perfect_index(seq, alpha: float, ell: float, k: int) -> NonPerfectProfile:
    """Count and positions of bound violations, plus the faithfulness flag.

    Faithful means the violations are empty or form the consecutive block
    ending at the last position.
    """
    norms = prefix_projection_norms(seq)
    bound = perfect_bound(alpha, ell, k)
    r = len(norms) + 1
    profile = tuple(i + 2 for i, v in enumerate(norms) if v > bound)
    j = len(profile)
    faithful = j == 0 or profile == tuple(range(r - j + 1, r + 1))
    return NonPerfectProfile(index=j, profile=profile, faithful=faithful)


def faithful_reorder(seq, alpha: float, ell: float, k: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reorder so the bound violations move to a consecutive tail block.

    Keeps the relative order within the kept and moved groups, which
    preserves the non-perfect index; the output is a permutation of the
    input, so the induced edge colors are unchanged up to relabeling.
    Returns (reordered points, 0-based permutation applied).
    """
    pts = _as_points(seq)
    prof = non_perfect_index(pts, alpha, ell, k)
    moved = set(p - 1 for p in prof.profile)
    order = [i for i in range(pts.shape[0]) if i not in moved]
    order += [i for i in range(pts.shape[0]) if i in moved]
    perm = tuple(order)
    return pts[list(perm)], perm


@dataclass(frozen=True)
class SequenceDecomposition:
    """Matrix data attached to a full-rank point sequence.

    X holds the points as columns; V = X (X^T X)^{-1} is the dual basis
    (so V^T X = I); E holds the Gram-Schmidt orthonormal basis with
    <x_i, e_i> > 0; lambdas / mus are the eigenvalues of X^T X (descending)
    and V^T V (ascending); gs_residuals[i] = |x_i - pi_{[i-1]}(x_i)|.
    """

    X: np.ndarray
    V: np.ndarray
    E: np.ndarray
    lambdas: np.ndarray
    mus: np.ndarray
    gs_residuals: np.ndarray

    @property
    def r(self) -> int:
        return self.X.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.X.shape[0]


def dual_basis(seq) -> SequenceDecomposition:
    """Dual basis, orthonormal basis, and both spectra for a sequence.

    The r x r Gram matrix is inverted by Cholesky; nothing of ambient size
    is ever formed.  A smallest Gram eigenvalue at or below 1e-8 raises
    SingularSequenceError.
    """
    pts = _as_points(seq)
    x = pts.T  # columns are the sequence
    r = x.shape[1]
    gram = x.T @ x
    eig = np.linalg.eigvalsh(gram)
    if eig[0] <= RANK_EIG_TOL:
        raise SingularSequenceError(
            f"smallest Gram eigenvalue {eig[0]:.3e} is at or below {RANK_EIG_TOL:g}")
    lam = np.linalg.cholesky(gram)
    v = cho_solve((lam, True), x.T).T
    mus = np.linalg.eigvalsh(v.T @ v)

    e_cols = np.empty_like(x)
    residuals = np.empty(r)
    for i in range(r):
        w = x[:, i].copy()
        for _ in range(2):
            for j in range(i):
                w -= (e_cols[:, j] @ w) * e_cols[:, j]
        nrm = float(np.linalg.norm(w))
        residuals[i] = nrm
        e_cols[:, i] = w / nrm
    return SequenceDecomposition(
        X=x, V=v, E=e_cols, lambdas=eig[::-1].copy(), mus=mus, gs_residuals=residuals)


def corner_coordinates(dec: SequenceDecomposition, y: np.ndarray) -> np.ndarray:
    """Coefficients a with pi(y) = sum_i a_i v_i.

    Computed by projecting onto the span and solving in the dual basis, a
    numerically distinct route from the identity a_i = <y, x_i> it must
    reproduce.
    """
    y = np.asarray(y, dtype=float)
    ytilde = dec.E @ (dec.E.T @ y)
    coeffs, *_ = np.linalg.lstsq(dec.V, ytilde, rcond=None)
    return coeffs


def corner_region_test(coeffs: np.ndarray, c: float, k: int, color: str) -> bool:
    """Membership in the red/blue common neighborhood from corner coordinates."""
    h = -c / math.sqrt(k)
    if color == "red":
        return bool(np.all(coeffs <= h))
    if color == "blue":
        return bool(np.all(coeffs > h))
    raise DomainError(f"color must be 'red' or 'blue', got {color!r}")


def _proj_norm_onto(cols: np.ndarray, vec: np.ndarray) -> float:
    """Norm of the orthogonal projection of vec onto span(cols)."""
    if cols.shape[1] == 0:
        return 0.0
    w, *_ = np.linalg.lstsq(cols, vec, rcond=None)
    return float(np.linalg.norm(cols @ w))


@dataclass(frozen=True)
class SpectralDiagnostics:
    max_eig_dev: float
    gram_frob_sq: float          # ||X^T X - I||_F^2, entrywise
    gram_frob_sq_eig: float      # same, as sum (lambda_i - 1)^2
    dual_frob_sq: float          # ||V^T V - I||_F^2, entrywise
    dual_frob_sq_eig: float      # same, as sum (mu_i - 1)^2
    dual_proj_sq: float          # sum_i |pi_{V_r(i)}(v_i)|^2
    d: float | None = None       # dimension-scale context, when supplied


def spectral_diagnostics(dec: SequenceDecomposition, d: float | None = None) -> SpectralDiagnostics:
    """Frobenius and eigenvalue deviations from orthonormality, both routes."""
    r = dec.r
    eye = np.eye(r)
    gram = dec.X.T @ dec.X
    vtv = dec.V.T @ dec.V
    gram_frob = float(np.sum((gram - eye) ** 2))
    dual_frob = float(np.sum((vtv - eye) ** 2))
    gram_eig = float(np.sum((dec.lambdas - 1.0) ** 2))
    dual_eig = float(np.sum((dec.mus - 1.0) ** 2))
    proj_sq = 0.0
    for i in range(r):
        others = [j for j in range(r) if j != i]
        proj_sq += _proj_norm_onto(dec.V[:, others], dec.V[:, i]) ** 2
    return SpectralDiagnostics(
        max_eig_dev=float(np.max(np.abs(dec.lambdas - 1.0))),
        gram_frob_sq=gram_frob,
        gram_frob_sq_eig=gram_eig,
        dual_frob_sq=dual_frob,
        dual_frob_sq_eig=dual_eig,
        dual_proj_sq=proj_sq,
        d=d,
    )


@dataclass(frozen=True)
class AlignmentRow:
    index: int                 # 1-based
    v_dot_e: float             # <v_i, e_i>
    e_residual_proj: float     # |pi_{V_r(i)}(e_i)|
    gs_identity: float         # 1/|x_i - pi_{[i-1]}(x_i)|, must equal v_dot_e


def basis_alignment(dec: SequenceDecomposition) -> list[AlignmentRow]:
    """Alignment of the dual basis with the orthonormal basis, per index."""
    rows = []
    for i in range(dec.r):
        others = [j for j in range(dec.r) if j != i]
        rows.append(AlignmentRow(
            index=i + 1,
            v_dot_e=float(dec.V[:, i] @ dec.E[:, i]),
            e_residual_proj=_proj_norm_onto(dec.V[:, others], dec.E[:, i]),
            gs_identity=1.0 / float(dec.gs_residuals[i]),
        ))
    return rows

"""Self-verification battery: one named check per acceptance-style criterion.

Each check runs at a ``quick`` level (sample counts capped at 1e5, meant for
smoke runs and the determinism re-run) or ``full`` level (the stated
tolerances at the stated sample sizes).  Checks are deterministic functions
of (level, seed); runtimes are reported but never compared.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import baseline, estimators, geometry, graph, sequences
from .constants import solve_p_C, threshold_constants
from .mc import ks_statistic, substream

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
P2 = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass
class CheckResult:
    name: str
    criterion: int
    passed: bool
    runtime_s: float
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "criterion": self.criterion,
            "passed": self.passed,
            "runtime_s": self.runtime_s,
            "details": self.details,
        }


def check_constants_closed_forms(level: str, seed: int) -> tuple[bool, dict]:
    p2 = solve_p_C(2.0)
    tc = threshold_constants(2.0)
    f_values = {c: threshold_constants(c).f_pC for c in (1.1, 1.5, 2.0, 5.0, 10.0)}
    ok = (abs(p2 - P2) <= 1e-12
          and abs(tc.M_C - GOLDEN) <= 1e-10
          and all(v > 0.0 for v in f_values.values()))
    return ok, {
        "p_2": p2, "p_2_err": p2 - P2,
        "M_2": tc.M_C, "M_2_err": tc.M_C - GOLDEN,
        "f_values": {str(k): v for k, v in f_values.items()},
    }


def check_cap_closed_forms(level: str, seed: int) -> tuple[bool, dict]:
    grid = [(-0.9 + 0.1 * i) for i in range(19)]
    cap_err = max(abs(geometry.cap_probability(2, a) - (1.0 + a) / 2.0) for a in grid)
    c2 = geometry.solve_cap_threshold(2, 0.25).c
    c1 = geometry.solve_cap_threshold(1, 0.25).c
    ok = (cap_err <= 1e-10
          and abs(c2 - math.sqrt(2.0) / 2.0) <= 1e-9
          and abs(c1 - math.sin(math.pi / 4.0)) <= 1e-9)
    return ok, {"cap_grid_max_err": cap_err,
                "c_k2_err": c2 - math.sqrt(2.0) / 2.0,
                "c_k1_err": c1 - math.sin(math.pi / 4.0)}


def check_cap_threshold_decay(level: str, seed: int) -> tuple[bool, dict]:
    rows = geometry.verify_cpk_asymptotic(0.3, [100, 400, 1600])
    errs = [row.error for row in rows]
    ratios = [errs[i + 1] / errs[i] for i in range(len(errs) - 1)]
    ok = all(e > 0 for e in errs) and all(r <= 0.6 for r in ratios)
    return ok, {"errors": errs, "ratios": ratios}


def check_projection_beta_law(level: str, seed: int) -> tuple[bool, dict]:
    k, r, n = 200, 10, 100_000
    rng = substream(seed, "beta-law")
    base = geometry.sample_unit_vectors(k, r, rng)
    sub = geometry.Subspace.from_spanning(base)
    y = geometry.sample_unit_vectors(k, n, rng)
    norm_sq = np.einsum("ij,ij->i", y @ sub.basis.T, y @ sub.basis.T)

    def beta_cdf(x: np.ndarray) -> np.ndarray:
        from scipy import special
        return special.betainc(0.5 * r, 0.5 * (k - r + 1), np.clip(x, 0.0, 1.0))

    d = ks_statistic(norm_sq, beta_cdf)
    return d <= 0.006, {"ks": d, "tolerance": 0.006, "n": n}


def check_geometric_dependency(level: str, seed: int) -> tuple[bool, dict]:
    k = 100
    p = solve_p_C(2.0)
    n = 100_000 if level == "quick" else 10_000_000
    red = estimators.estimate_clique_prob(k, p, 3, "red", n, seed, method="chain")
    blue = estimators.estimate_clique_prob(k, p, 3, "blue", n, seed, method="chain")
    margin = 0.0 if level == "quick" else 3.0
    red_ok = red.value < p ** 3 - margin * red.std_error
    blue_ok = blue.value > (1.0 - p) ** 3 + margin * blue.std_error
    return red_ok and blue_ok, {
        "red": red.value, "red_se": red.std_error, "red_independent": p ** 3,
        "blue": blue.value, "blue_se": blue.std_error, "blue_independent": (1.0 - p) ** 3,
        "n": n,
    }


def check_corner_coordinates(level: str, seed: int) -> tuple[bool, dict]:
    k = 500
    n_pairs = 200 if level == "quick" else 1000
    rng = substream(seed, "corner")
    c = geometry.solve_cap_threshold(k, P2).c
    worst = 0.0
    agreements = 0
    for _ in range(n_pairs):
        r = int(rng.integers(2, 21))
        pts = geometry.sample_unit_vectors(k, r, rng)
        dec = sequences.dual_basis(pts)
        y = geometry.sample_unit_vectors(k, 1, rng)[0]
        coeffs = sequences.corner_coordinates(dec, y)
        direct = pts @ y
        worst = max(worst, float(np.max(np.abs(coeffs - direct))))
        for color in ("red", "blue"):
            corner = sequences.corner_region_test(coeffs, c, k, color)
            h = -c / math.sqrt(k)
            ref = bool(np.all(direct <= h)) if color == "red" else bool(np.all(direct > h))
            agreements += int(corner == ref)
    ok = worst <= 1e-9 and agreements == 2 * n_pairs
    return ok, {"max_coeff_err": worst, "agreements": agreements, "pairs": n_pairs}


def check_spectral_identities(level: str, seed: int) -> tuple[bool, dict]:
    rng = substream(seed, "spectra")
    n_seqs = 20 if level == "quick" else 60
    ell, ratio_C = 2, 2.0
    r = int(ratio_C * ell)
    worst_vtx = worst_recip = worst_frob = 0.0
    frob_by_d = {}
    for d in (20, 40):
        k = d * d * ell * ell
        vals = []
        for _ in range(n_seqs):
            pts = geometry.sample_unit_vectors(k, r, rng)
            dec = sequences.dual_basis(pts)
            worst_vtx = max(worst_vtx, float(np.max(np.abs(dec.V.T @ dec.X - np.eye(r)))))
            recip = np.max(np.abs(np.sort(dec.mus) - 1.0 / np.sort(dec.lambdas)[::-1]))
            worst_recip = max(worst_recip, float(recip))
            diag = sequences.spectral_diagnostics(dec, d=d)
            worst_frob = max(worst_frob,
                             abs(diag.gram_frob_sq - diag.gram_frob_sq_eig),
                             abs(diag.dual_frob_sq - diag.dual_frob_sq_eig))
            vals.append(diag.gram_frob_sq)
        frob_by_d[d] = float(np.mean(vals))
    ratio = frob_by_d[20] / frob_by_d[40]
    ok = (worst_vtx <= 1e-9 and worst_recip <= 1e-9 and worst_frob <= 1e-9
          and 2.0 <= ratio <= 6.0)
    return ok, {"max_vtx_dev": worst_vtx, "max_eig_reciprocity_dev": worst_recip,
                "max_frobenius_path_dev": worst_frob,
                "frob_mean_by_D": {str(k): v for k, v in frob_by_d.items()},
                "doubling_ratio": ratio}


def check_coefficient_mean(level: str, seed: int) -> tuple[bool, dict]:
    k, p, r, s = 10_000, solve_p_C(2.0), 6, 3
    n = 20_000 if level == "quick" else 100_000
    out = {}
    ok = True
    for color in ("red", "blue"):
        pc = estimators.estimate_coefficient_mean(k, p, r, s, color, n, seed)
        z0 = pc.estimate.value / pc.estimate.std_error
        dev = abs(pc.estimate.value - pc.prediction)
        tol = max(4.0 * pc.estimate.std_error, 0.25 * abs(pc.prediction))
        sign_ok = z0 <= -3.0 if color == "red" else z0 >= 3.0
        ok = ok and sign_ok and dev <= tol
        out[color] = {"estimate": pc.estimate.value, "se": pc.estimate.std_error,
                      "prediction": pc.prediction, "z_vs_zero": z0,
                      "abs_dev": dev, "tolerance": tol}
    return ok, out


def _origin_fit(s_values, estimates, ses):
    """Weighted least squares of estimate = intercept + slope*s."""
    w = 1.0 / np.asarray(ses) ** 2
    x = np.asarray(s_values, dtype=float)
    y = np.asarray(estimates)
    sw, sx, sy = np.sum(w), np.sum(w * x), np.sum(w * y)
    sxx, sxy = np.sum(w * x * x), np.sum(w * x * y)
    det = sw * sxx - sx * sx
    intercept = (sxx * sy - sx * sxy) / det
    slope = (sw * sxy - sx * sy) / det
    se_intercept = math.sqrt(sxx / det)
    se_slope = math.sqrt(sw / det)
    return slope, intercept, se_slope, se_intercept


def check_projection_inner_slope(level: str, seed: int) -> tuple[bool, dict]:
    k, p, r = 10_000, solve_p_C(2.0), 8
    c = geometry.solve_cap_threshold(k, p).c
    s_values = (2, 4, 8)
    out = {}
    slopes = {}
    ok = True
    for color in ("red", "blue"):
        if level == "quick":
            n = 4000 if color == "red" else 10_000
        else:
            n = 20_000 if color == "red" else 50_000
        ests, ses = [], []
        for s in s_values:
            pc = estimators.estimate_projection_inner(k, p, r, s, color, n, seed)
            ests.append(pc.estimate.value)
            ses.append(pc.estimate.std_error)
        slope, intercept, se_sl, se_int = _origin_fit(s_values, ests, ses)
        pred_slope = (math.exp(-c * c) / (2.0 * math.pi * (p if color == "red" else 1 - p) ** 2)) / k
        slopes[color] = slope
        slope_ok = abs(slope / pred_slope - 1.0) <= 0.30
        int_ok = abs(intercept) <= 3.0 * se_int
        ok = ok and slope_ok and int_ok
        out[color] = {"slope": slope, "pred_slope": pred_slope,
                      "slope_rel_dev": slope / pred_slope - 1.0,
                      "intercept": intercept, "intercept_se": se_int, "n": n}
    ratio = slopes["red"] / slopes["blue"]
    pred_ratio = ((1.0 - p) / p) ** 2
    ratio_ok = abs(ratio / pred_ratio - 1.0) <= 0.30
    out["red_blue_slope_ratio"] = ratio
    out["pred_ratio"] = pred_ratio
    return ok and ratio_ok, out


def check_kappa_telescoping(level: str, seed: int) -> tuple[bool, dict]:
    k, p = 10_000, solve_p_C(2.0)
    if level == "quick":
        tuples, secondary, n_direct = 100, 500, 100_000
    else:
        tuples, secondary, n_direct = 500, 2000, 1_000_000
    k1 = estimators.estimate_kappa(k, p, 4.0, 2.0, 1, "red", tuples, seed,
                                   n_secondary=secondary)
    k2 = estimators.estimate_kappa(k, p, 4.0, 2.0, 2, "red", tuples, seed + 1,
                                   n_secondary=secondary)
    direct = estimators.estimate_perfect_clique_prob(k, p, 4.0, 2.0, 3, "red",
                                                     n_direct, seed + 2)
    prod = k1.estimate.value * k2.estimate.value
    se_prod = prod * math.hypot(k1.estimate.std_error / k1.estimate.value,
                                k2.estimate.std_error / k2.estimate.value)
    z = (prod - direct.value) / math.hypot(se_prod, direct.std_error)
    return abs(z) <= 3.0, {
        "kappa1": k1.estimate.value, "kappa2": k2.estimate.value,
        "product": prod, "product_se": se_prod,
        "direct": direct.value, "direct_se": direct.std_error, "z": z,
    }


def check_complement_uniformity(level: str, seed: int) -> tuple[bool, dict]:
    k, p = 160, solve_p_C(2.0)
    n = 20_000 if level == "quick" else 100_000
    pts = estimators.sample_perfect_sequence(k, 3, 2.0, 4.0, substream(seed, "hatz-seq"))
    rep = estimators.hatz_uniformity_test(pts, "red", n, seed, p=p, alpha=2.0, ell=4.0)
    return rep.passed, {"ks_max": rep.ks_max, "ks_critical": rep.ks_critical,
                        "corr": rep.corr, "corr_bound": rep.corr_bound, "n": n}


def check_certificate_search(level: str, seed: int) -> tuple[bool, dict]:
    attempts = 2000 if level == "quick" else 10_000
    found = graph.certify_lower_bound(1.0, 3, 50, 0.5, 5, attempts, seed)
    ok5 = found.found
    reverified = False
    if ok5:
        text = graph.certificate_to_json(found)
        _, reverified = graph.certificate_from_json(text)
    budget6 = 500 if level == "quick" else 10_000
    found6 = graph.certify_lower_bound(1.0, 3, 50, 0.5, 6, budget6, seed)
    ok = ok5 and reverified and not found6.found
    return ok, {"n5_found": ok5, "n5_attempts": found.attempts_used,
                "reverified": reverified,
                "n6_found": found6.found, "n6_attempts": found6.attempts_used}


def _brute_force_clique(adj: np.ndarray, size: int):
    n = adj.shape[0]
    for comb in itertools.combinations(range(n), size):
        if all(adj[a][b] for a, b in itertools.combinations(comb, 2)):
            return comb
    return None


def check_clique_oracle(level: str, seed: int) -> tuple[bool, dict]:
    rng = substream(seed, "clique-oracle")
    n_instances = 30 if level == "quick" else 100
    mismatches = 0
    for _ in range(n_instances):
        n = int(rng.integers(4, 13))
        density = rng.random()
        m = rng.random((n, n)) < density
        red = np.triu(m, 1)
        red = red | red.T
        blue = ~red
        np.fill_diagonal(blue, False)
        for adj in (red, blue):
            for size in (2, 3, 4, 5):
                got = graph.find_clique(adj, size)
                expect = _brute_force_clique(adj, size)
                if (got is None) != (expect is None):
                    mismatches += 1
                elif got is not None and not all(
                        adj[a][b] for a, b in itertools.combinations(got, 2)):
                    mismatches += 1
    return mismatches == 0, {"instances": n_instances, "mismatches": mismatches}


def check_erdos_baseline(level: str, seed: int) -> tuple[bool, dict]:
    from .baseline import _min_over_p
    res = baseline.erdos_bound(1.0, 20)
    f_at = math.exp(_min_over_p(float(res.n_opt), 20, res.blue_size)[1])
    f_next = math.exp(_min_over_p(float(res.n_opt + 1), 20, res.blue_size)[1])
    sandwich = f_at <= res.threshold < f_next
    factor_ok = True
    factors = {}
    for ell in (20, 30, 40):
        b = baseline.erdos_bound(1.0, ell)
        ref = (ell / math.e) * 2.0 ** ((ell - 1) / 2.0)
        factors[ell] = b.n_opt / ref
        factor_ok = factor_ok and 0.5 <= b.n_opt / ref <= 2.0
    drift = baseline.p_drift_check(2.0, [20, 40, 80])
    ratios = [drift[i + 1].drift / drift[i].drift for i in range(len(drift) - 1)]
    drift_ok = all(r <= 0.7 for r in ratios)
    ok = sandwich and factor_ok and drift_ok
    return ok, {"sandwich": sandwich, "f_at": f_at, "f_next": f_next,
                "n_over_reference": {str(k): v for k, v in factors.items()},
                "drift_ratios": ratios}


def check_union_bound(level: str, seed: int) -> tuple[bool, dict]:
    rows = {}
    ok = True
    for C in (1.5, 2.0, 5.0):
        for ell in (100, 1000, 10_000):
            rep = graph.union_bound_report(C, ell)
            ok = ok and rep.bound_lt_1 and rep.aux_inequality_holds and rep.kappa_base_sum_lt_1
            rows[f"C{C}_l{ell}"] = {
                "bound_minus_one": rep.final_bound_minus_one,
                "aux": rep.aux_inequality_holds,
                "kappa_sum_minus_one": rep.kappa_base_sum_minus_one,
            }
    return ok, rows


CHECKS: list[tuple[str, int]] = [
    ("constants-closed-forms", 1),
    ("cap-closed-forms", 2),
    ("cap-threshold-decay", 3),
    ("projection-beta-law", 4),
    ("geometric-dependency", 5),
    ("corner-coordinates", 6),
    ("spectral-identities", 7),
    ("coefficient-mean", 8),
    ("projection-inner-slope", 9),
    ("kappa-telescoping", 10),
    ("complement-uniformity", 11),
    ("certificate-search", 12),
    ("clique-oracle", 13),
    ("erdos-baseline", 14),
    ("union-bound", 15),
]

_CHECK_FNS = {
    "constants-closed-forms": check_constants_closed_forms,
    "cap-closed-forms": check_cap_closed_forms,
    "cap-threshold-decay": check_cap_threshold_decay,
    "projection-beta-law": check_projection_beta_law,
    "geometric-dependency": check_geometric_dependency,
    "corner-coordinates": check_corner_coordinates,
    "spectral-identities": check_spectral_identities,
    "coefficient-mean": check_coefficient_mean,
    "projection-inner-slope": check_projection_inner_slope,
    "kappa-telescoping": check_kappa_telescoping,
    "complement-uniformity": check_complement_uniformity,
    "certificate-search": check_certificate_search,
    "clique-oracle": check_clique_oracle,
    "erdos-baseline": check_erdos_baseline,
    "union-bound": check_union_bound,
}


def run_check(name: str, level: str, seed: int) -> CheckResult:
    fn = _CHECK_FNS[name]
    criterion = dict(CHECKS)[name]
    start = time.perf_counter()
    passed, details = fn(level, seed)
    return CheckResult(name=name, criterion=criterion, passed=passed,
                       runtime_s=time.perf_counter() - start, details=details)


def run_battery(level: str, seed: int, names: list[str] | None = None) -> list[CheckResult]:
    selected = names if names is not None else [n for n, _ in CHECKS]
    return [run_check(name, level, seed) for name in selected]


def _strip_runtimes(results: list[CheckResult]) -> list[dict]:
    out = []
    for r in results:
        d = r.as_dict()
        d.pop("runtime_s", None)
        out.append(d)
    return out


def check_determinism(seed: int, first: list[CheckResult] | None = None) -> tuple[bool, dict]:
    """Criterion 16: the quick battery reproduces itself bit-for-bit."""
    if first is None:
        first = run_battery("quick", seed)
    second = run_battery("quick", seed)
    same = _strip_runtimes(first) == _strip_runtimes(second)
    return same, {"identical": same,
                  "first_pass": all(r.passed for r in first),
                  "checks_compared": len(first)}


def verify_suite(level: str, seed: int) -> dict:
    """Run the full battery (plus the determinism re-run) and report."""
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    results = run_battery(level, seed)
    start = time.perf_counter()
    det_ok, det_details = check_determinism(seed, first=results if level == "quick" else None)
    results.append(CheckResult(name="determinism", criterion=16, passed=det_ok,
                               runtime_s=time.perf_counter() - start,
                               details=det_details))
    return {
        "level": level,
        "seed": seed,
        "passed": all(r.passed for r in results),
        "failed": [r.name for r in results if not r.passed],
        "checks": [r.as_dict() for r in results],
    }

"""First-moment baseline: the classical two-clique union-bound optimizer.

For clique sizes (ell, ceil(C*ell)) and edge probability p, the bound
f(n, p) = binom(n, ell) p^binom(ell,2) + binom(n, m) (1-p)^binom(m,2)
below a fixed threshold certifies a lower bound n on the Ramsey number.
Everything is evaluated in log space; n is treated as a real during the
search and floored at the end, with the integer sandwich re-verified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import solve_p_C, threshold_constants
from .errors import DomainError

#: Acceptance threshold for the union bound; below this a good coloring exists.
DEFAULT_THRESHOLD = 0.99

_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # golden-section ratio


def log_binomial(n: float, m: int) -> float:
    """log C(n, m) for real n >= m and integer m >= 0.

    The falling factorial is summed term by term: the log-gamma difference
    lgamma(n+1) - lgamma(n-m+1) loses all precision once n*1e-16 rivals
    m*log(n), which already happens around n ~ 1e17 at m ~ 100.
    """
    if m < 0 or n < m:
        raise DomainError(f"need 0 <= m <= n, got n={n!r}, m={m!r}")
    return math.fsum(math.log(n - i) for i in range(m)) - math.lgamma(m + 1.0)


def log_union_bound(n: float, p: float, ell: int, blue_size: int) -> tuple[float, float, float]:
    """(log A, log B, log(A+B)) of the two union-bound terms at (n, p)."""
    log_a = log_binomial(n, ell) + math.comb(ell, 2) * math.log(p)
    log_b = log_binomial(n, blue_size) + math.comb(blue_size, 2) * math.log1p(-p)
    hi, lo = max(log_a, log_b), min(log_a, log_b)
    return log_a, log_b, hi + math.log1p(math.exp(lo - hi))


def _min_over_p(n: float, ell: int, blue_size: int, tol: float = 1e-11) -> tuple[float, float]:
    """Golden-section minimum of log f(n, .) over p in (0, 1/2]."""
    lo, hi = 1e-9, 0.5

    def obj(p: float) -> float:
        return log_union_bound(n, p, ell, blue_size)[2]

    a, b = lo, hi
    x1 = b - _PHI * (b - a)
    x2 = a + _PHI * (b - a)
    f1, f2 = obj(x1), obj(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _PHI * (b - a)
            f1 = obj(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _PHI * (b - a)
            f2 = obj(x2)
    p = x1 if f1 <= f2 else x2
    return p, obj(p)


@dataclass(frozen=True)
class BaselineResult:
    C: float
    ell: int
    blue_size: int
    p_opt: float
    n_opt: int
    log_n: float
    A_term: float
    B_term: float
    f_value: float
    threshold: float

    def as_dict(self) -> dict:
        return {
            "C": self.C, "ell": self.ell, "blue_size": self.blue_size,
            "p_opt": self.p_opt, "n_opt": self.n_opt, "log_n": self.log_n,
            "A_term": self.A_term, "B_term": self.B_term,
            "f_value": self.f_value, "threshold": self.threshold,
        }


def erdos_bound(C: float, ell: int, threshold: float = DEFAULT_THRESHOLD) -> BaselineResult:
    """Largest n whose optimized union bound stays at or below the threshold.

    Inner minimization over p by golden section; outer maximization over n
    by exponential search and bisection on log n, then an integer walk to
    pin the sandwich min_p f(n_opt) <= threshold < min_p f(n_opt + 1).
    """
    if C < 1.0:
        raise DomainError(f"need C >= 1, got {C!r}")
    if ell < 3:
        raise DomainError(f"need ell >= 3, got {ell}")
    blue_size = math.ceil(C * ell)
    log_thr = math.log(threshold)

    def min_log_f(n: float) -> float:
        return _min_over_p(n, ell, blue_size)[1]

    n_lo = float(blue_size)
    if min_log_f(n_lo) > log_thr:
        raise DomainError(
            f"even n={blue_size} fails the union bound at threshold {threshold}")
    n_hi = 2.0 * n_lo
    while min_log_f(n_hi) <= log_thr:
        n_lo = n_hi
        n_hi *= 2.0
    for _ in range(200):
        mid = math.sqrt(n_lo * n_hi)  # bisect on log n
        if mid <= n_lo or mid >= n_hi:
            break
        if min_log_f(mid) <= log_thr:
            n_lo = mid
        else:
            n_hi = mid
    n_opt = int(math.floor(n_lo))
    # The +-1 walks pin the integer sandwich; above 2^53 successive integers
    # collapse to the same float, so the walk stops at float resolution.
    while n_opt > blue_size and min_log_f(float(n_opt)) > log_thr:
        n_opt -= 1
    while float(n_opt + 1) != float(n_opt) and min_log_f(float(n_opt + 1)) <= log_thr:
        n_opt += 1
    p_opt, _ = _min_over_p(float(n_opt), ell, blue_size)
    log_a, log_b, log_f = log_union_bound(float(n_opt), p_opt, ell, blue_size)
    return BaselineResult(
        C=C, ell=ell, blue_size=blue_size, p_opt=p_opt, n_opt=n_opt,
        log_n=math.log(n_opt), A_term=math.exp(log_a), B_term=math.exp(log_b),
        f_value=math.exp(log_f), threshold=threshold)


@dataclass(frozen=True)
class DriftRow:
    ell: int
    p_opt: float
    drift: float


def p_drift_check(C: float, ell_list: list[int]) -> list[DriftRow]:
    """|p_opt(ell) - p_C| along increasing ell; the drift decays like 1/ell."""
    if sorted(ell_list) != list(ell_list):
        raise DomainError("ell_list must be increasing")
    p_c = solve_p_C(C)
    rows = []
    for ell in ell_list:
        res = erdos_bound(C, ell)
        rows.append(DriftRow(ell=ell, p_opt=res.p_opt, drift=abs(res.p_opt - p_c)))
    return rows


def entropy(x: float) -> float:
    """Binary entropy in nats."""
    if not 0.0 < x < 1.0:
        raise DomainError(f"entropy argument must lie in (0, 1), got {x!r}")
    return -x * math.log(x) - (1.0 - x) * math.log1p(-x)


def beta_C(C: float) -> float:
    """Leading constant of the optimized first-moment bound.

    beta_C = exp(((C-1)/2 * log(1-p_C) - log C) * (1-p_C) * log(1-p_C) / H(p_C));
    the exponent vanishes as C -> 1+, where the value degenerates to 1.
    """
    if C < 1.0:
        raise DomainError(f"need C >= 1, got {C!r}")
    if C == 1.0:
        return 1.0
    p = solve_p_C(C)
    expo = (0.5 * (C - 1.0) * math.log1p(-p) - math.log(C)) * (1.0 - p) * math.log1p(-p) / entropy(p)
    return math.exp(expo)


@dataclass(frozen=True)
class ImprovementRatio:
    C: float
    ell: int
    eps: float
    log_bound: float      # ell * log(M_C + eps)
    log_baseline: float   # log n_opt of the first-moment optimizer
    log_ratio: float

    def as_dict(self) -> dict:
        return {
            "C": self.C, "ell": self.ell, "eps": self.eps,
            "log_bound": self.log_bound, "log_baseline": self.log_baseline,
            "log_ratio": self.log_ratio,
        }


def improvement_ratio(C: float, ell: int, eps: float | None = None) -> ImprovementRatio:
    """Log-space ratio of the improved exponential bound to the baseline.

    eps defaults to the closed-form eps(C); an override supports hypothetical
    values (eps = 0 reduces the bound to the bare exponential M_C^ell).
    """
    if C <= 1.0:
        raise DomainError(f"need C > 1, got {C!r}")
    tc = threshold_constants(C)
    e = tc.eps if eps is None else eps
    base = erdos_bound(C, ell)
    log_bound = ell * math.log(tc.M_C + e)
    return ImprovementRatio(C=C, ell=ell, eps=e, log_bound=log_bound,
                            log_baseline=base.log_n,
                            log_ratio=log_bound - base.log_n)

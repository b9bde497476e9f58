"""Closed-form threshold constants of the construction.

All quantities are functions of the color-ratio parameter C > 1: the edge
probability p_C solving C = log(p_C)/log(1-p_C), the growth base
M_C = p_C^(-1/2), the projection-norm coefficient alpha_C, the gap
coefficient f(p_C), the second-order gain eps0, the dimension-scale constant
D(C), and the final base improvement eps = M_C*eps0/(6*D).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InfeasibleParametersError
from .geometry import solve_cap_threshold
from .specials import (  # noqa: F401  (module surface: scalar ops live here too)
    HazardValue,
    hazard_mu,
    normal_cdf,
    normal_pdf,
    normal_quantile,
    normal_sf,
)


def solve_p_C(C: float) -> float:
    """Unique p in (0, 1/2] with C*log(1-p) = log(p).

    The residual g(p) = C*log(1-p) - log(p) is strictly decreasing, so
    bisection is total; a Newton polish brings |g| below 1e-13.
    """
    if C < 1.0:
        raise DomainError(f"color ratio must be >= 1, got {C!r}")
    if C == 1.0:
        return 0.5

    def g(p: float) -> float:
        return C * math.log1p(-p) - math.log(p)

    lo, hi = 1e-300, 0.5
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    p = 0.5 * (lo + hi)
    for _ in range(2):
        slope = -C / (1.0 - p) - 1.0 / p
        p = min(p - g(p) / slope, 0.5)
    return p


def alpha_coefficient(C: float, p_C: float) -> float:
    return max(1000.0, 20.0 * math.sqrt(C * math.log(10.0 / p_C)))


def gap_function(C: float, x: float) -> float:
    """f(x) = 1/x^2 - C/(1-x)^2; positive at p_C for every C > 1."""
    return 1.0 / (x * x) - C / ((1.0 - x) * (1.0 - x))


@dataclass(frozen=True)
class ThresholdConstants:
    C: float
    p_C: float
    M_C: float
    alpha_C: float
    f_pC: float
    eps0: float
    D: float
    eps: float

    def as_dict(self) -> dict:
        return {
            "C": self.C,
            "p_C": self.p_C,
            "M_C": self.M_C,
            "alpha_C": self.alpha_C,
            "f_pC": self.f_pC,
            "eps0": self.eps0,
            "D": self.D,
            "eps": self.eps,
        }


def threshold_constants(C: float) -> ThresholdConstants:
    """All closed-form constants attached to a color ratio C > 1."""
    if C <= 1.0:
        raise DomainError(f"threshold constants need C > 1 (the gap f vanishes at C=1), got {C!r}")
    p = solve_p_C(C)
    m = 1.0 / math.sqrt(p)
    alpha = alpha_coefficient(C, p)
    f = gap_function(C, p)
    eps0 = (normal_pdf(normal_quantile(p)) ** 3) * f / 18.0
    d = 1.0e5 * alpha ** 4 / (p ** 3 * f)
    eps = m * eps0 / (6.0 * d)
    return ThresholdConstants(C=C, p_C=p, M_C=m, alpha_C=alpha, f_pC=f, eps0=eps0, D=d, eps=eps)


def select_p_star(C: float, D: float, k: int) -> float:
    """Edge probability p in (p_C, p_C + 1/(p_C^2*D)) balancing both colors.

    Solves F(p) = p_C - (e^{-c0^2}/2pi)^{3/2} * f(p_C)/(9D) where
    F(x) = x - (e^{-c_{k,x}^2}/2pi)^{3/2} / (3*D*x^2) and c0 is the cap
    threshold at p_C.  The bracket endpoints are the two explicit shifts of
    p_C whose F-values straddle the target; an invalid bracket (D too small)
    raises InfeasibleParametersError.
    """
    if C <= 1.0:
        raise DomainError(f"need C > 1, got {C!r}")
    p_c = solve_p_C(C)
    f = gap_function(C, p_c)
    c0 = solve_cap_threshold(k, p_c).c
    g0 = (math.exp(-c0 * c0) / (2.0 * math.pi)) ** 1.5
    target = p_c - g0 * f / (9.0 * D)

    def F(x: float) -> float:
        cx = solve_cap_threshold(k, x).c
        return x - (math.exp(-cx * cx) / (2.0 * math.pi)) ** 1.5 / (3.0 * D * x * x)

    p1 = p_c + g0 / (3.0 * D) * (0.5 / (p_c * p_c) - f / 3.0)
    p2 = p_c + g0 / (3.0 * D) * (1.5 / (p_c * p_c) - f / 3.0)
    if not (p_c < p1 < p2 < 0.5):
        raise InfeasibleParametersError(
            f"bracket (p1, p2) = ({p1!r}, {p2!r}) invalid; D={D!r} too small for C={C!r}")
    f1, f2 = F(p1), F(p2)
    if not (f1 < target < f2):
        raise InfeasibleParametersError(
            f"bracket values F(p1)={f1!r}, F(p2)={f2!r} do not straddle target={target!r}")
    lo, hi = p1, p2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        val = F(mid)
        if abs(val - target) <= 1e-13:
            return mid
        if val < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RamseyConfig:
    """Parameter bundle (C, ell, D, k, p) with its derived constants."""

    C: float
    ell: int
    D: float
    k: int
    p: float
    constants: ThresholdConstants
    c: float
    a_kp: float

    @classmethod
    def from_parameters(cls, C: float, ell: int, D: float | None = None,
                        k: int | None = None, p: float | None = None) -> "RamseyConfig":
        """Fill in defaults: D = D(C), k = D^2*ell^2 (capped to stay integral), p = p_C."""
        tc = threshold_constants(C)
        d = tc.D if D is None else D
        kk = int(round(d * d * ell * ell)) if k is None else k
        pp = tc.p_C if p is None else p
        cap = solve_cap_threshold(kk, pp)
        a_kp = (math.exp(-cap.c * cap.c) / (2.0 * math.pi)) ** 1.5
        return cls(C=C, ell=ell, D=d, k=kk, p=pp, constants=tc, c=cap.c, a_kp=a_kp)

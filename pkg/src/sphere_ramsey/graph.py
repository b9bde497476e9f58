"""Random sphere graphs, exact monochromatic clique search, certificates.

Edge rule: vertices are uniform points on S^k and the edge {i, j} is red
iff <x_i, x_j> <= -c/sqrt(k) with c the cap threshold for (k, p).  The
comparison is an exact <= with no epsilon: ties occur with probability
zero and the color matrix stays a pure function of the points.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceLimitError
from .constants import threshold_constants
from .geometry import sample_unit_vectors, solve_cap_threshold
from .mc import substream

#: Dense color-matrix guard; beyond this the exact search is hopeless anyway.
MAX_VERTICES = 2 ** 14


def colors_from_points(points: np.ndarray, c: float) -> np.ndarray:
    """Symmetric red-edge indicator matrix derived from the points alone."""
    k = points.shape[1] - 1
    gram = points @ points.T
    red = gram <= -c / math.sqrt(k)
    np.fill_diagonal(red, False)
    return red


@dataclass(frozen=True)
class SphereGraph:
    k: int
    p: float
    c: float
    points: np.ndarray   # (n, k+1)
    red: np.ndarray      # (n, n) bool, symmetric, False diagonal

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def adjacency(self, color: str) -> np.ndarray:
        if color == "red":
            return self.red
        if color == "blue":
            blue = ~self.red
            np.fill_diagonal(blue, False)
            return blue
        raise DomainError(f"color must be 'red' or 'blue', got {color!r}")

    def red_fraction(self) -> float:
        n = self.n
        if n < 2:
            return math.nan
        return float(np.sum(self.red)) / (n * (n - 1))


def build_graph(k: int, p: float, n: int, rng: np.random.Generator,
                max_vertices: int = MAX_VERTICES) -> SphereGraph:
    """Sample a random sphere graph on n vertices."""
    if n < 2:
        raise DomainError(f"graph needs n >= 2 vertices, got {n}")
    if n > max_vertices:
        raise ResourceLimitError(f"n={n} exceeds the dense-storage guard {max_vertices}")
    c = solve_cap_threshold(k, p).c
    points = sample_unit_vectors(k, n, rng)
    return SphereGraph(k=k, p=p, c=c, points=points, red=colors_from_points(points, c))


@dataclass(frozen=True)
class CliqueWitness:
    color: str
    vertices: tuple[int, ...]

    def validate(self, graph: SphereGraph) -> bool:
        adj = graph.adjacency(self.color)
        idx = list(self.vertices)
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                if not adj[idx[a], idx[b]]:
                    return False
        return True


def find_clique(adjacency: np.ndarray, size: int) -> tuple[int, ...] | None:
    """Exact search for a clique of the given size in a boolean adjacency matrix.

    Branch and bound over bitset candidate sets: vertices are pre-ordered by
    degree descending, and a greedy coloring of each candidate set prunes
    branches that cannot reach the target size.  Returns vertex indices of
    one clique, or None when none exists (the search is exhaustive).
    """
    adj = np.asarray(adjacency, dtype=bool)
    n = adj.shape[0]
    if size <= 0:
        return ()
    if size == 1:
        return (0,) if n >= 1 else None
    if size > n:
        return None

    degrees = adj.sum(axis=1)
    order = sorted(range(n), key=lambda v: -int(degrees[v]))
    rank = {v: i for i, v in enumerate(order)}
    masks = [0] * n
    for new_u, u in enumerate(order):
        m = 0
        for v in np.flatnonzero(adj[u]):
            m |= 1 << rank[int(v)]
        masks[new_u] = m

    full = (1 << n) - 1
    found: list[int] | None = None

    def color_order(cand: int) -> list[tuple[int, int]]:
        # Greedy coloring: vertices grouped into independent classes; a clique
        # inside cand can use at most one vertex per class.
        out = []
        color = 0
        rest = cand
        while rest:
            color += 1
            avail = rest
            while avail:
                v = (avail & -avail).bit_length() - 1
                bit = 1 << v
                out.append((v, color))
                rest ^= bit
                avail = (avail ^ bit) & ~masks[v]
        return out

    def expand(clique: list[int], cand: int) -> bool:
        if len(clique) == size:
            nonlocal found
            found = clique.copy()
            return True
        ordered = color_order(cand)
        for v, col in reversed(ordered):
            if len(clique) + col < size:
                return False
            bit = 1 << v
            clique.append(v)
            if expand(clique, cand & masks[v]):
                return True
            clique.pop()
            cand ^= bit
        return False

    if expand([], full):
        assert found is not None
        return tuple(sorted(order[v] for v in found))
    return None


def find_mono_clique(graph: SphereGraph, color: str, size: int) -> CliqueWitness | None:
    """Witness of a monochromatic clique of the given size, or None."""
    if size < 2:
        raise DomainError(f"clique size must be >= 2, got {size}")
    if size > graph.n:
        return None
    verts = find_clique(graph.adjacency(color), size)
    if verts is None:
        return None
    witness = CliqueWitness(color=color, vertices=verts)
    assert witness.validate(graph)
    return witness


@dataclass(frozen=True)
class CertificateResult:
    found: bool
    graph: SphereGraph | None
    attempts_used: int
    red_size: int
    blue_size: int
    seed: int


def certify_lower_bound(C: float, ell: int, k: int, p: float, n: int,
                        max_attempts: int, seed: int) -> CertificateResult:
    """Search for an instance with no red K_ell and no blue K_ceil(C*ell).

    Attempts are independent resamples, each on its own substream keyed by
    the attempt index, so the first success is deterministic for a given
    seed regardless of scheduling.  Exhausting the budget is an outcome,
    not an error.
    """
    red_size = ell
    blue_size = math.ceil(C * ell)
    for attempt in range(max_attempts):
        rng = substream(seed, "certify", attempt)
        g = build_graph(k, p, n, rng)
        if _is_certificate(g, red_size, blue_size):
            return CertificateResult(True, g, attempt + 1, red_size, blue_size, seed)
    return CertificateResult(False, None, max_attempts, red_size, blue_size, seed)


def _is_certificate(graph: SphereGraph, red_size: int, blue_size: int) -> bool:
    if red_size <= graph.n and find_mono_clique(graph, "red", red_size) is not None:
        return False
    if blue_size <= graph.n and find_mono_clique(graph, "blue", blue_size) is not None:
        return False
    return True


def certificate_to_json(result: CertificateResult) -> str:
    """Serialize a certificate; colors are recomputed from points on load."""
    if not result.found or result.graph is None:
        raise DomainError("no certificate to serialize")
    g = result.graph
    doc = {
        "k": g.k,
        "p": g.p,
        "c": g.c,
        "seed": result.seed,
        "red_size": result.red_size,
        "blue_size": result.blue_size,
        "points": [[float(v) for v in row] for row in g.points],
        "witness_checks": "pass",
    }
    return json.dumps(doc, sort_keys=True)


def certificate_from_json(text: str) -> tuple[SphereGraph, bool]:
    """Load a certificate and re-verify it from the points alone."""
    doc = json.loads(text)
    points = np.asarray(doc["points"], dtype=float)
    g = SphereGraph(k=doc["k"], p=doc["p"], c=doc["c"], points=points,
                    red=colors_from_points(points, doc["c"]))
    ok = _is_certificate(g, doc["red_size"], doc["blue_size"])
    return g, ok


@dataclass(frozen=True)
class UnionBoundReport:
    """Numeric rendering of the two-clique union-bound chain.

    The final bound is (1/2)(1+eps/M_C)^(-ell^2/2) + (1/2)(1+eps/M_C)^(-C^2 ell^2/2);
    at realistic D it sits below 1 by far less than an ulp, so the strict
    comparisons are carried by the *_minus_one fields computed with
    expm1/log1p, which are exact where the plain value rounds to 1.0.
    """

    C: float
    ell: int
    D: float
    k: float
    log_n: float
    red_base: float
    blue_base: float
    final_bound: float
    final_bound_minus_one: float
    bound_lt_1: bool
    aux_inequality_holds: bool
    kappa_base_sum_minus_one: float
    kappa_base_sum_lt_1: bool

    def as_dict(self) -> dict:
        return {
            "C": self.C, "ell": self.ell, "D": self.D, "k": self.k,
            "log_n": self.log_n, "red_base": self.red_base, "blue_base": self.blue_base,
            "final_bound": self.final_bound,
            "final_bound_minus_one": self.final_bound_minus_one,
            "bound_lt_1": self.bound_lt_1,
            "aux_inequality_holds": self.aux_inequality_holds,
            "kappa_base_sum_minus_one": self.kappa_base_sum_minus_one,
            "kappa_base_sum_lt_1": self.kappa_base_sum_lt_1,
        }


def union_bound_report(C: float, ell: int, D: float | None = None,
                       eps_override: float | None = None) -> UnionBoundReport:
    """Evaluate the union-bound chain at k = D^2 ell^2 in log space.

    ``eps_override`` supports the hypothetical eps = 0 case, where both
    final terms equal 1/2 exactly.
    """
    if ell < 2:
        raise DomainError(f"need ell >= 2, got {ell}")
    tc = threshold_constants(C)
    d = tc.D if D is None else D
    k = d * d * ell * ell
    eps = tc.M_C * tc.eps0 / (6.0 * d) if eps_override is None else eps_override
    log_n = ell * math.log(tc.M_C + eps)
    ell_over_sqrtk = ell / math.sqrt(k)
    red_base = tc.p_C - tc.eps0 * ell_over_sqrtk
    blue_base = 1.0 - tc.p_C - tc.eps0 * ell_over_sqrtk

    log_ratio = math.log1p(eps / tc.M_C)
    x_red = 0.5 * ell * ell * log_ratio
    x_blue = 0.5 * C * C * ell * ell * log_ratio
    term_red_m1 = 0.5 * math.expm1(-x_red)      # (1/2) e^{-x} - 1/2, exact
    term_blue_m1 = 0.5 * math.expm1(-x_blue)
    final_minus_one = term_red_m1 + term_blue_m1
    final_bound = 1.0 + final_minus_one

    # 1 - eps0/(2 p_C D) <= (1+eps/M_C)^{-3}  <=>  eps0/(2 p_C D) >= 1-(1+eps/M_C)^{-3}
    lhs_deficit = tc.eps0 / (2.0 * tc.p_C * d)
    rhs_deficit = -math.expm1(-3.0 * log_ratio)
    aux_holds = lhs_deficit >= rhs_deficit

    # kappa-level base-term sum: 1 + (a_{k,p} ell / (3 sqrt(k))) (C/(1-p)^2 - 1/p^2),
    # evaluated at p = p_C; the parenthesis is -f(p_C) < 0.
    a_kp = _gap_coefficient_scalar(k, tc.p_C)
    kappa_sum_m1 = -(a_kp * ell / (3.0 * math.sqrt(k))) * tc.f_pC
    return UnionBoundReport(
        C=C, ell=ell, D=d, k=k, log_n=log_n,
        red_base=red_base, blue_base=blue_base,
        final_bound=final_bound,
        final_bound_minus_one=final_minus_one,
        bound_lt_1=final_minus_one < 0.0,
        aux_inequality_holds=aux_holds,
        kappa_base_sum_minus_one=kappa_sum_m1,
        kappa_base_sum_lt_1=kappa_sum_m1 < 0.0,
    )


def _gap_coefficient_scalar(k: float, p: float) -> float:
    # Cap threshold tolerates astronomically large k; only c enters.
    c = solve_cap_threshold(k, p).c
    return (math.exp(-c * c) / (2.0 * math.pi)) ** 1.5

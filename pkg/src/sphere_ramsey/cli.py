"""Command-line entry point.

Subcommands: constants, cap, graph, certify, estimate, verify, baseline.
Every run writes a JSON (or CSV) result file plus a manifest recording the
parameters, seed, worker count, and timestamps; rerunning with the same
manifest parameters reproduces the result bytes exactly.

Exit codes: 0 success, 1 infeasible or not-found outcome (including failed
verification), 2 usage errors, 3 internal errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import secrets
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import baseline as baseline_mod
from . import estimators, geometry, graph, verify
from .constants import (
    alpha_coefficient,
    select_p_star,
    solve_p_C,
    threshold_constants,
)
from .errors import DomainError, InfeasibleParametersError, SphereRamseyError
from .mc import substream

ARTIFACT_VERSION = "0.1.0"

EXIT_OK = 0
EXIT_NOT_FOUND = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


@dataclass
class RunManifest:
    subcommand: str
    params: dict
    seed: int
    workers: int
    version: str = ARTIFACT_VERSION
    started: str = ""
    finished: str = ""
    outputs: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "params": self.params,
            "seed": self.seed,
            "workers": self.workers,
            "version": self.version,
            "started": self.started,
            "finished": self.finished,
            "outputs": self.outputs,
        }


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _dump_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, default=_json_default) + "\n"


def _dump_csv(rows: list[dict]) -> str:
    if not rows:
        return "\n"
    keys = list(rows[0].keys())
    lines = [",".join(keys)]
    for row in rows:
        lines.append(",".join(str(row.get(k, "")) for k in keys))
    return "\n".join(lines) + "\n"


def _write_output(doc, rows, args, manifest: RunManifest) -> str:
    out_path = args.out or f"{manifest.subcommand}.{args.format}"
    text = _dump_json(doc) if args.format == "json" else _dump_csv(rows)
    with open(out_path, "w") as fh:
        fh.write(text)
    manifest.outputs.append(os.path.abspath(out_path))
    manifest.finished = _now()
    with open(out_path + ".manifest.json", "w") as fh:
        fh.write(_dump_json(manifest.as_dict()))
    return out_path


def _resolve_p(args) -> float:
    if args.p != "auto":
        return float(args.p)
    if args.C is None:
        raise DomainError("--p auto needs --C")
    if args.D is not None and args.k is not None:
        return select_p_star(args.C, args.D, args.k)
    return solve_p_C(args.C)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=None,
                     help="master seed (default: system entropy, recorded)")
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--out", default=None, help="output path (default: ./<subcommand>.<fmt>)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphere-ramsey",
        description="Numerical laboratory for random sphere graphs and "
                    "Ramsey lower-bound diagnostics.")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("constants", help="closed-form threshold constants")
    p.add_argument("--C", type=float, required=True)
    _add_common(p)

    p = subs.add_parser("cap", help="cap thresholds over a (k, p) grid")
    p.add_argument("--k", type=str, required=True, help="comma-separated dimensions")
    p.add_argument("--p", type=str, required=True, help="comma-separated probabilities")
    _add_common(p)

    p = subs.add_parser("graph", help="sample a sphere graph and summarize")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=str, default="auto")
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--D", type=float, default=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--scan-clique", type=str, default=None,
                   help="color:size to search, e.g. red:4")
    _add_common(p)

    p = subs.add_parser("certify", help="search for a two-clique-free instance")
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=str, default="auto")
    p.add_argument("--D", type=float, default=None)
    p.add_argument("--max-attempts", type=int, default=10_000)
    _add_common(p)

    p = subs.add_parser("estimate", help="Monte Carlo estimators")
    p.add_argument("--quantity", required=True, choices=(
        "red-clique", "blue-clique", "kappa", "q-ratio", "coefficient-mean",
        "projection-inner", "perfect-fraction", "shifted-cap"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=str, default="auto")
    p.add_argument("--C", type=float, default=2.0)
    p.add_argument("--D", type=float, default=None)
    p.add_argument("--ell", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--A", type=float, default=1.0, help="shifted-cap offset")
    p.add_argument("--samples", type=int, required=True)
    _add_common(p)

    p = subs.add_parser("verify", help="run the acceptance battery")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    _add_common(p)

    p = subs.add_parser("baseline", help="first-moment baseline optimizer")
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--ell", type=str, required=True, help="comma-separated sizes")
    _add_common(p)

    return parser


def _cmd_constants(args, manifest) -> tuple[int, dict, list[dict]]:
    tc = threshold_constants(args.C)
    doc = tc.as_dict()
    return EXIT_OK, doc, [doc]


def _cmd_cap(args, manifest) -> tuple[int, dict, list[dict]]:
    ks = [int(v) for v in args.k.split(",")]
    ps = [float(v) for v in args.p.split(",")]
    rows = []
    for k in ks:
        for p in ps:
            ct = geometry.solve_cap_threshold(k, p)
            rows.append(ct.as_dict())
    return EXIT_OK, {"rows": rows}, rows


def _cmd_graph(args, manifest) -> tuple[int, dict, list[dict]]:
    p = _resolve_p(args)
    g = graph.build_graph(args.k, p, args.n, substream(args.seed, "graph"))
    doc = {"k": g.k, "p": g.p, "c": g.c, "n": g.n,
           "red_fraction": g.red_fraction(), "seed": args.seed}
    code = EXIT_OK
    if args.scan_clique:
        color, size_s = args.scan_clique.split(":")
        witness = graph.find_mono_clique(g, color, int(size_s))
        doc["scan"] = {"color": color, "size": int(size_s),
                       "found": witness is not None,
                       "vertices": list(witness.vertices) if witness else None}
    return code, doc, [doc]


def _cmd_certify(args, manifest) -> tuple[int, dict, list[dict]]:
    p = _resolve_p(args)
    res = graph.certify_lower_bound(args.C, args.ell, args.k, p, args.n,
                                    args.max_attempts, args.seed)
    if res.found:
        doc = json.loads(graph.certificate_to_json(res))
        doc["attempts_used"] = res.attempts_used
        return EXIT_OK, doc, [{"found": True, "attempts_used": res.attempts_used,
                               "k": args.k, "p": p, "n": args.n}]
    doc = {"found": False, "attempts_used": res.attempts_used,
           "red_size": res.red_size, "blue_size": res.blue_size,
           "k": args.k, "p": p, "n": args.n, "seed": args.seed}
    return EXIT_NOT_FOUND, doc, [doc]


def _cmd_estimate(args, manifest) -> tuple[int, dict, list[dict]]:
    p = _resolve_p(args)
    k, r, n, seed, workers = args.k, args.r, args.samples, args.seed, args.workers
    ell = args.ell if args.ell is not None else float(max(r, 1))
    alpha = args.alpha
    q = args.quantity
    if q in ("red-clique", "blue-clique"):
        color = q.split("-")[0]
        est = estimators.estimate_clique_prob(k, p, r, color, n, seed, workers)
        pairs = math.comb(r, 2)
        pred = p ** pairs if color == "red" else (1.0 - p) ** pairs
        doc = est.as_dict()
        doc.update(prediction=pred,
                   prediction_source="independent-edge model p^C(r,2)",
                   z_score=(est.value - pred) / est.std_error if est.std_error else math.nan)
    elif q == "kappa":
        color = "red"
        res = estimators.estimate_kappa(k, p, ell, args.C, r, color,
                                        max(n // 512, 10), seed, workers, alpha=alpha)
        a_kp = geometry.gap_coefficient(k, p)
        pred = 1.0
        for i in range(r):
            pred *= p - a_kp / (p * p) * (i / math.sqrt(k))
        doc = res.estimate.as_dict()
        doc.update(prediction=pred,
                   prediction_source="product of first-order cap-shift factors",
                   z_score=(res.estimate.value - pred) / res.estimate.std_error
                   if res.estimate.std_error else math.nan)
    elif q == "q-ratio":
        alpha_eff = alpha if alpha is not None else alpha_coefficient(args.C, solve_p_C(args.C))
        rng = substream(seed, "cli-q-seq")
        pts = estimators.sample_perfect_sequence(k, r, alpha_eff, ell, rng)
        y = geometry.sample_unit_vectors(k, 1, rng)[0]
        res = estimators.estimate_Q(pts, y, "red", p, alpha_eff, ell, n, seed, workers)
        doc = res.comparison.as_dict()
        doc["inner_expectation"] = res.inner_expectation
    elif q == "coefficient-mean":
        s = args.s if args.s is not None else 1
        pc = estimators.estimate_coefficient_mean(k, p, r, s, "red", n, seed, workers,
                                                  alpha=alpha, ell=ell, C=args.C)
        doc = pc.as_dict()
    elif q == "projection-inner":
        s = args.s if args.s is not None else max(r - 1, 0)
        pc = estimators.estimate_projection_inner(k, p, r, s, "red", n, seed, workers,
                                                  alpha=alpha, ell=ell, C=args.C)
        doc = pc.as_dict()
    elif q == "perfect-fraction":
        rep = estimators.perfect_fraction(k, ell, args.C, r, n, seed, workers, alpha=alpha)
        doc = rep.estimate.as_dict()
        doc.update(union_lower_bound=rep.union_lower_bound,
                   prefix_tail_bound=rep.prefix_tail_bound,
                   half_threshold_bound=rep.half_threshold_bound)
    elif q == "shifted-cap":
        d = args.D if args.D is not None else 100.0
        res = geometry.shifted_cap_check(k, r, p, args.A, d, n, seed, workers)
        doc = res.estimate.as_dict()
        doc.update(prediction=res.prediction, exact=res.exact, h=res.h,
                   prediction_source=res.prediction_source, z_score=res.z_score)
    else:  # pragma: no cover
        raise DomainError(f"unknown quantity {q!r}")
    doc.update(quantity=q, k=k, p=p, r=r)
    return EXIT_OK, doc, [doc]


def _cmd_verify(args, manifest) -> tuple[int, dict, list[dict]]:
    report = verify.verify_suite(args.level, args.seed)
    for chk in report["checks"]:
        status = "PASS" if chk["passed"] else "FAIL"
        print(f"[{status}] criterion {chk['criterion']:>2} {chk['name']} "
              f"({chk['runtime_s']:.2f}s)")
    rows = [{"name": c["name"], "criterion": c["criterion"], "passed": c["passed"]}
            for c in report["checks"]]
    code = EXIT_OK if report["passed"] else EXIT_NOT_FOUND
    return code, report, rows


def _cmd_baseline(args, manifest) -> tuple[int, dict, list[dict]]:
    ells = [int(v) for v in args.ell.split(",")]
    rows = []
    for ell in ells:
        res = baseline_mod.erdos_bound(args.C, ell)
        row = {"C": args.C, "ell": ell, "p_opt": res.p_opt, "log_n": res.log_n,
               "n_opt": res.n_opt}
        if args.C > 1.0:
            row["beta_C"] = baseline_mod.beta_C(args.C)
            row["improvement_log_ratio"] = baseline_mod.improvement_ratio(args.C, ell).log_ratio
        rows.append(row)
    return EXIT_OK, {"rows": rows}, rows


_COMMANDS = {
    "constants": _cmd_constants,
    "cap": _cmd_cap,
    "graph": _cmd_graph,
    "certify": _cmd_certify,
    "estimate": _cmd_estimate,
    "verify": _cmd_verify,
    "baseline": _cmd_baseline,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.seed is None:
        args.seed = secrets.randbits(63)
    manifest = RunManifest(
        subcommand=args.subcommand,
        params={k: v for k, v in vars(args).items()
                if k not in ("subcommand", "seed", "workers")},
        seed=args.seed,
        workers=args.workers,
        started=_now(),
    )
    try:
        code, doc, rows = _COMMANDS[args.subcommand](args, manifest)
        out_path = _write_output(doc, rows, args, manifest)
        print(f"wrote {out_path}")
        return code
    except (DomainError, InfeasibleParametersError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, DomainError) else EXIT_NOT_FOUND
    except SphereRamseyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except Exception as exc:  # pragma: no cover - internal failures
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

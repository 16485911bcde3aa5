"""Command-line front end.

Problem files are JSON documents::

    {"phi": [[...], ...], "d": [[...], ...], "y": [...], "lambda": 0.5,
     "start_x": [...]}            # start_x optional

Exit codes: 0 success, 1 parse or dimension error, 2 restricted injectivity
violated, 3 solver did not converge, 4 instance too large for the oracle.
"""
import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import geometry, ipm, kkt, oracle
from .model import (
    Problem, ProblemError, RestrictedInjectivityError, check_problem, lift, objective,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INJECTIVITY = 2
EXIT_NO_CONVERGENCE = 3
EXIT_ORACLE_LIMIT = 4


class ProblemFileError(ValueError):
    pass


def _matrix(doc, key):
    try:
        rows = doc[key]
    except KeyError:
        raise ProblemFileError(f"missing key {key!r}") from None
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ProblemFileError(f"{key!r} must be a non-empty array of rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ProblemFileError(f"{key!r} has rows of unequal length")
    try:
        return np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise ProblemFileError(f"{key!r} contains non-numeric entries") from None


def _vector(doc, key):
    v = doc[key]
    if not isinstance(v, list):
        raise ProblemFileError(f"{key!r} must be an array")
    try:
        return np.array(v, dtype=float).reshape(-1)
    except (TypeError, ValueError):
        raise ProblemFileError(f"{key!r} contains non-numeric entries") from None


def load_problem(path):
    """Read a problem file; returns ``(problem, start_x or None)``."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ProblemFileError("problem file must hold a JSON object")
    for key in ("phi", "d", "y", "lambda"):
        if key not in doc:
            raise ProblemFileError(f"missing key {key!r}")
    phi = _matrix(doc, "phi")
    d = _matrix(doc, "d")
    y = _vector(doc, "y")
    lam = doc["lambda"]
    if isinstance(lam, bool) or not isinstance(lam, (int, float)):
        raise ProblemFileError("'lambda' must be a number")
    if phi.shape[1] != d.shape[0]:
        raise ProblemFileError(
            f"phi has {phi.shape[1]} columns but d has {d.shape[0]} rows"
        )
    if y.shape[0] != phi.shape[0]:
        raise ProblemFileError(f"y has length {y.shape[0]}, phi has {phi.shape[0]} rows")
    start = None
    if doc.get("start_x") is not None:
        start = _vector(doc, "start_x")
        if start.shape[0] != phi.shape[1]:
            raise ProblemFileError(f"start_x has length {start.shape[0]}, expected {phi.shape[1]}")
    return Problem(phi, d, y, float(lam)), start


def _floats(a):
    return [float(v) for v in np.asarray(a, dtype=float).ravel()]


def write_trace(path, trace):
    """Per-iteration CSV: ``iter,mu,r1,r2,r3,r4,step,sigma,x_1..x_n``."""
    n = trace.records[0].x.size if trace.records else 0
    fmt = "{:.17g}".format
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iter", "mu", "r1", "r2", "r3", "r4", "step", "sigma"]
                   + [f"x_{i + 1}" for i in range(n)])
        for rec in trace.records:
            w.writerow([rec.iter, fmt(rec.mu)] + [fmt(r) for r in rec.res_norms]
                       + [fmt(rec.step), fmt(rec.sigma)] + [fmt(v) for v in rec.x])


def _config(args):
    return ipm.SolverConfig(eps=args.eps, eta=args.eta, max_iters=args.max_iters)


def _support_tol(args, problem, x):
    if args.tol_support is not None:
        return args.tol_support
    return geometry.default_tol(problem.d.T @ x)


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")


def _checked(path):
    problem, start = load_problem(path)
    check_problem(problem)
    return problem, start


def cmd_solve(args):
    problem, start = _checked(args.problem)
    pt, trace = ipm.solve(problem, _config(args), start)
    if args.trace:
        write_trace(args.trace, trace)
    res = kkt.residuals(lift(problem), problem.d, pt)
    supp = geometry.d_support(pt.x, problem.d, _support_tol(args, problem, pt.x))
    r = res.norms()
    _emit({
        "x": _floats(pt.x),
        "u": _floats(pt.u),
        "s_summary": {
            "min": float(np.min(pt.s, initial=np.inf)),
            "max": float(np.max(pt.s, initial=-np.inf)),
            "length": int(pt.s.size),
        },
        "objective": objective(problem, pt.x),
        "support_indices": [i + 1 for i in supp.indices],
        "support_signs": [int(v) for v in supp.signs],
        "iterations": trace.iterations,
        "final_residuals": {"r1": r[0], "r2": r[1], "r3": r[2], "r4": r[3], "mu": res.mu},
        "status": trace.status,
    })
    return EXIT_OK if trace.status == ipm.CONVERGED else EXIT_NO_CONVERGENCE


def cmd_certify(args):
    problem, start = _checked(args.problem)
    orc = oracle.solve_oracle(problem)
    out = {
        "oracle": {
            "optimal_value": orc.optimal_value,
            "vertices": [_floats(v) for v in orc.vertices],
            "witness": _floats(orc.witness),
            "analytic_center": _floats(orc.analytic_center),
        }
    }
    code = EXIT_OK
    if args.oracle_only:
        candidate = orc.analytic_center
    else:
        pt, trace = ipm.solve(problem, _config(args), start)
        candidate = pt.x
        h = objective(problem, pt.x)
        out["solver"] = {
            "x": _floats(pt.x),
            "objective": h,
            "status": trace.status,
            "iterations": trace.iterations,
            "objective_gap": h - orc.optimal_value,
            "distance_to_analytic_center": float(np.max(np.abs(pt.x - orc.analytic_center))),
        }
        if trace.status != ipm.CONVERGED:
            code = EXIT_NO_CONVERGENCE
    rep = geometry.certify_maximal(candidate, orc.vertices, problem, tol=args.tol_support)
    cert = rep.to_dict()
    cert["candidate_support"] = [i + 1 for i in cert["details"].pop("candidate_support", [])]
    cert["details"]["missing_indices"] = [i + 1 for i in cert["details"].get("missing_indices", [])]
    out["certificate"] = cert
    _emit(out)
    return code


def build_parser():
    parser = argparse.ArgumentParser(
        prog="analasso",
        description="Analysis-Lasso solver returning the maximal D-support solution.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("problem", help="JSON problem file")
        p.add_argument("--eps", type=float, default=1e-8, help="stopping tolerance")
        p.add_argument("--eta", type=float, default=0.95, help="step relaxation in (0, 1)")
        p.add_argument("--max-iters", type=int, default=200)
        p.add_argument("--tol-support", type=float, default=None,
                       help="zero threshold for supports (default 1e-7 (1 + ||D^T x||_inf))")

    ps = sub.add_parser("solve", help="run the interior-point solver")
    common(ps)
    ps.add_argument("--trace", metavar="PATH", help="write per-iteration CSV")
    ps.set_defaults(func=cmd_solve)

    pc = sub.add_parser("certify", help="compare against the brute-force oracle")
    common(pc)
    pc.add_argument("--oracle-only", action="store_true", help="skip the solver")
    pc.set_defaults(func=cmd_certify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr)
    try:
        if not 0 < args.eta < 1 or not args.eps > 0 or args.max_iters < 1:
            raise ProblemFileError("invalid solver flags: need eps > 0, 0 < eta < 1, max-iters >= 1")
        return args.func(args)
    except RestrictedInjectivityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INJECTIVITY
    except oracle.OracleLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE_LIMIT
    except (ProblemFileError, ProblemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

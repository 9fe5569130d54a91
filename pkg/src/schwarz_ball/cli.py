"""``schwarz-ball`` command line.

Exit codes: 0 pass, 1 inequality violation, 2 usage or input error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .bounds import (
    DEFAULT_TOL,
    ORIGIN_TOL,
    arcsin_check,
    deriv_at_zero_check,
    distance_contraction_check,
    scaled_check,
    schwarz_pick_check,
)
from .errors import InputError, SchwarzBallError
from .extremal import Family, SearchConfig, sharpness_ft, sharpness_search
from .holomap import Evidence, MapSpecError, sup_norm_estimate, sup_upper_bound
from .linalg import norm, one_minus_norm_sq, opnorm
from .mapspec import loads_map, loads_points, parse_cvector
from .mobius import m_norm_closed, m_operator, n_norm_closed, n_operator
from .pluriharmonic import PluriharmonicFn, pluriharmonic_check
from .report import certificate_record, dumps
from .verify import SUITES, VerifyConfig, default_workers, run_suite

EXIT_PASS, EXIT_VIOLATION, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3
NORM_AGREEMENT = 1e-10
CERTIFY_SAMPLES = 10_000


class _IOFailure(Exception):
    pass


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _tol(text):
    v = float(text)
    if not v >= 0 or not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be a finite value >= 0, got {text}")
    return v


def build_parser():
    p = argparse.ArgumentParser(
        prog="schwarz-ball", description="Numerical checks of Schwarz-Pick type bounds on the unit ball."
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a randomized verification suite")
    v.add_argument("--suite", choices=SUITES, default="all")
    v.add_argument("--n", type=_positive, default=2)
    v.add_argument("--m", type=_positive, default=2)
    v.add_argument("--samples", type=_positive, default=100)
    v.add_argument("--seed", type=_nonneg, default=0)
    v.add_argument("--tol", type=_tol, default=DEFAULT_TOL)
    v.add_argument("--workers", type=_positive, default=None, help="default: $SCHWARZ_BALL_WORKERS or 1")
    v.add_argument("--timing", action="store_true", help="add wall time (breaks byte-identical reports)")
    v.add_argument("--out")

    nm = sub.add_parser("norms", help="norms of the derivatives of phi_a at 0 and at a")
    nm.add_argument("a", nargs="?", help='complex vector, e.g. "0.3+0.1i,0.2"')
    nm.add_argument("--a", dest="a_flag", metavar="A")
    nm.add_argument("--out")

    c = sub.add_parser("certify", help="check every applicable inequality for a map at given points")
    c.add_argument("--map", required=True)
    c.add_argument("--points", required=True)
    c.add_argument("--tol", type=_tol, default=DEFAULT_TOL)
    c.add_argument("--out")

    s = sub.add_parser("sharpness", help="search an extremal family for the best constant")
    s.add_argument("--family", choices=["ft"] + [f.value for f in Family], required=True)
    s.add_argument("--grid", type=_positive, default=1000)
    s.add_argument("--budget", type=_positive, default=SearchConfig.budget)
    s.add_argument("--seed", type=_nonneg, default=0)
    s.add_argument("--out")
    return p


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc.strerror or exc}") from exc


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {out}: {exc.strerror or exc}") from exc


def cmd_verify(args):
    workers = args.workers or default_workers()
    cfg = VerifyConfig(n=args.n, m=args.m, samples=args.samples, seed=args.seed, tol=args.tol)
    report = run_suite(args.suite, cfg, workers=workers, timing=args.timing)
    _emit(dumps(report), args.out)
    for rec in report["checks"]:
        if not rec["pass"]:
            print(f"FAIL {rec['id']}: min slack {rec['min_slack']:.3e}", file=sys.stderr)
    return EXIT_PASS if report["summary"]["pass"] else EXIT_VIOLATION


def cmd_norms(args):
    text = args.a_flag if args.a_flag is not None else args.a
    if text is None:
        raise InputError("norms needs a center, e.g. norms 0.6,0")
    a = parse_cvector(text)
    if not one_minus_norm_sq(a) > 0:
        raise InputError(f"center must lie in the open unit ball, |a| = {float(norm(a))!r}")
    rows = {
        "M_closed": m_norm_closed(a),
        "M_opnorm": opnorm(m_operator(a)),
        "N_closed": n_norm_closed(a),
        "N_opnorm": opnorm(n_operator(a)),
    }
    for key, val in rows.items():
        op, how = key.split("_")
        print(f"{op}_a {how}: {val:.15g}")
    agree = (
        abs(rows["M_closed"] - rows["M_opnorm"]) <= NORM_AGREEMENT
        and abs(rows["N_closed"] - rows["N_opnorm"]) <= NORM_AGREEMENT * max(1.0, rows["N_closed"])
    )
    if args.out:
        _emit(dumps({"tool": "schwarz-ball", "version": __version__, "a": a, **rows, "agree": agree}), args.out)
    return EXIT_PASS if agree else EXIT_VIOLATION


def _ball_evidence(f, certify):
    """``(evidence, rigorous_sup_or_None)`` or raise if ``f`` is not a ball map."""
    bound = sup_upper_bound(f)
    if bound is not None and bound <= 1.0:
        return Evidence.STRUCTURAL, bound
    rng = np.random.default_rng(certify.get("seed", 0))
    est = sup_norm_estimate(f, certify.get("samples", CERTIFY_SAMPLES), rng)
    if est > 1.0:
        raise InputError(f"map leaves the unit ball: |f| reaches {est!r} on the sphere")
    return Evidence.SAMPLED, None


def cmd_certify(args):
    f, certify = loads_map(_read(args.map))
    points = loads_points(_read(args.points))
    n = f.n
    for i, z in enumerate(points):
        if z.shape[0] != n:
            raise MapSpecError(f"points[{i}]", f"dimension {z.shape[0]} does not match map dimension {n}")
        if not one_minus_norm_sq(z) > 0:
            raise MapSpecError(f"points[{i}]", f"point not inside the unit ball, |z| = {float(norm(z))!r}")

    certs = []
    if isinstance(f, PluriharmonicFn):
        rng = np.random.default_rng(certify.get("seed", 0))
        f = PluriharmonicFn.certified(f.b, certify.get("samples", CERTIFY_SAMPLES), rng)
        evidence, sup = Evidence.SAMPLED, None
        certs = [pluriharmonic_check(f, z) for z in points]
    else:
        evidence, sup = _ball_evidence(f, certify)
        certs.append(deriv_at_zero_check(f))
        origin_fixed = norm(f.eval(np.zeros(n))) <= ORIGIN_TOL
        for z in points:
            certs.append(schwarz_pick_check(f, z))
            if sup is not None and 0.0 < sup < 1.0:
                certs.append(scaled_check(f, z, sup))
            if origin_fixed:
                certs.append(arcsin_check(f, z))
        if f.m == 1:
            for z, w in zip(points, points[1:]):
                certs.append(distance_contraction_check(f, z, w))

    records = [certificate_record(c, args.tol) for c in certs]
    failed = sum(not r["pass"] for r in records)
    report = {
        "tool": "schwarz-ball",
        "version": __version__,
        "command": "certify",
        "fingerprint": f.fingerprint(),
        "evidence": evidence.value,
        "sup_bound": sup,
        "tol": args.tol,
        "certificates": records,
        "summary": {"certificates": len(records), "failed": failed, "pass": failed == 0},
    }
    _emit(dumps(report), args.out)
    return EXIT_PASS if failed == 0 else EXIT_VIOLATION


def cmd_sharpness(args):
    if args.family == "ft":
        res = sharpness_ft(args.grid)
        config = {"grid": args.grid}
    else:
        cfg = SearchConfig(budget=args.budget, seed=args.seed)
        res = sharpness_search(args.family, cfg)
        config = {"budget": args.budget, "restarts": cfg.restarts, "initial_step": cfg.initial_step}
    ok = res.within_bracket()
    report = {
        "tool": "schwarz-ball",
        "version": __version__,
        "command": "sharpness",
        "family": res.family,
        "seed": args.seed,
        "config": config,
        "best_ratio": res.best_ratio,
        "min_ratio": res.min_ratio,
        "best_params": list(res.best_params),
        "witness": list(res.witness),
        "evaluations": res.evaluations,
        "restart": res.restart,
        "stagnated": res.stagnated,
        "pass": ok,
    }
    _emit(dumps(report), args.out)
    return EXIT_PASS if ok else EXIT_VIOLATION


_COMMANDS = {"verify": cmd_verify, "norms": cmd_norms, "certify": cmd_certify, "sharpness": cmd_sharpness}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _IOFailure as exc:
        print(f"schwarz-ball: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SchwarzBallError, ValueError) as exc:
        print(f"schwarz-ball: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``liebialg verify|fourier|integrate|catalog``.

Exit codes: 0 when every check passes, 1 on a verification failure, 2 on
usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from typing import List, Optional

import numpy as np

from . import catalog, io
from .bialgebra import check_bialgebra, check_cocycle, to_manin
from .group_flow import (
    AlgebraPath, check_group_cocycle, default_paths, integrate_cocycle, jacobiator_check,
    multiplicativity_residual, path_independence, product_path,
)
from .lie_core import DEFAULT_TOL, check_jacobi
from .loop_fourier import decay_fit, fourier_project
from .report import CheckReport, SuiteReport, digest
from .torus_weight import (
    ManinError, TorusWeighting, TraceState, build_double_manin, check_weighting, verify_manin,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- output --------------------------------------------------------------------------

def _paint(text: str, ok: bool, plain: bool) -> str:
    if plain:
        return text
    return f"\033[{32 if ok else 31}m{text}\033[0m"


def emit(report: SuiteReport, args, out=None) -> int:
    out = out or sys.stdout
    if args.out:
        io.write_json(report.to_dict(), args.out)
    if args.json:
        out.write(report.to_json() + "\n")
    else:
        for c in sorted(report.checks, key=lambda c: c.check):
            tag = _paint("PASS" if c.passed else "FAIL", c.passed, args.plain)
            res = " ".join(f"{k}={v:.3e}" for k, v in sorted(c.residuals.items()))
            out.write(f"{tag} {c.check} {res} (tol {c.tol:g})\n")
        verdict = _paint("PASS" if report.passed else "FAIL", report.passed, args.plain)
        out.write(f"{report.suite}: {verdict} [{report.wall_clock:.2f}s]\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def _suite(name: str, inputs, checks: List[CheckReport], t0: float, seed=None) -> SuiteReport:
    return SuiteReport(name, digest(inputs), checks, seed, time.perf_counter() - t0)


# --- input helpers ----------------------------------------------------------------------

def _parse_ints(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma separated integers, got {text!r}") from None


def _load_algebra(args):
    if args.algebra:
        return io.algebra_from_json(io.read_json(args.algebra)), {"algebra": io.read_json(args.algebra)}
    if args.catalog:
        return catalog.algebra(args.catalog), {"catalog": args.catalog}
    raise UsageError("give --catalog NAME or --algebra FILE")


def _load_bialgebra(args):
    if args.bialgebra:
        d = io.read_json(args.bialgebra)
        return io.bialgebra_from_json(d), {"bialgebra": d}
    if args.catalog:
        return catalog.bialgebra(args.catalog), {"catalog": args.catalog}
    raise UsageError("give --catalog NAME or --bialgebra FILE")


def _load_weighting(args):
    if args.weighting:
        d = io.read_json(args.weighting)
        return io.weighting_from_json(d), {"weighting": d}
    if not args.catalog:
        raise UsageError("give --catalog NAME [--weights ...] or --weighting FILE")
    g = catalog.algebra(args.catalog)
    if args.weights is None:
        if args.catalog not in catalog.DEFAULT_WEIGHTS:
            raise UsageError(f"no default weights for {args.catalog}; pass --weights")
        w = catalog.DEFAULT_WEIGHTS[args.catalog]
    else:
        k = _parse_ints(args.weights)
        n = g.realization.shape[1] if g.realization is not None else 0
        if args.catalog.startswith("m") and len(k) == n and len(k) != g.dim:
            w = catalog.diagonal_weights(k)
        else:
            w = k
    return TorusWeighting(g, w), {"catalog": args.catalog, "weights": list(w)}


# --- commands ------------------------------------------------------------------------------

def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    if args.target == "manin":
        w, inputs = _load_weighting(args)
        checks = [check_weighting(w, tol)]
        if w.algebra.realization is not None:
            checks.append(TraceState(w.algebra).check(w, tol))
        try:
            checks.append(verify_manin(build_double_manin(w, TraceState(w.algebra)
                                                          if w.algebra.realization is not None
                                                          else None), tol))
        except ManinError as e:
            checks.append(CheckReport("manin", {}, tol, False, {"error": str(e)}))
    elif args.target == "jacobi":
        g, inputs = _load_algebra(args)
        checks = [check_jacobi(g, tol)]
    elif args.target == "cocycle":
        bi, inputs = _load_bialgebra(args)
        checks = [check_cocycle(bi, tol)]
    else:
        bi, inputs = _load_bialgebra(args)
        t = to_manin(bi, tol)
        dj = t.meta["jacobi"]
        checks = [check_bialgebra(bi, tol), verify_manin(t, tol),
                  CheckReport("double_jacobi", dj["residuals"], tol)]
    inputs = {"target": args.target, "tol": tol, **inputs}
    return emit(_suite(f"verify-{args.target}", inputs, checks, t0), args)


def _write_csv(path: str, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["m", "norm", "fitted_model_value"])
        for m, norm, fit in rows:
            wr.writerow([m, "%.17g" % norm, "%.17g" % fit])


def cmd_fourier(args) -> int:
    t0 = time.perf_counter()
    if args.loop:
        d = io.read_json(args.loop)
        s = io.loop_from_json(d)
        inputs = {"loop": d}
    elif args.catalog:
        s = catalog.fourier_sample(args.catalog, args.samples, args.param)
        inputs = {"catalog": args.catalog, "param": args.param, "S": args.samples}
    else:
        raise UsageError("give --catalog NAME or --loop FILE")
    if args.modes < 0:
        raise UsageError("--modes must be non-negative")
    modes = list(range(-args.modes, args.modes + 1))
    for m in (modes[0], modes[-1]):
        fourier_project(s, m)  # raises NyquistError when S < 2N + 1
    inputs.update({"modes": args.modes, "regime": args.regime})
    try:
        rep = decay_fit(s, modes, args.regime)
    except ValueError as e:
        norms = {m: float(np.linalg.norm(fourier_project(s, m))) for m in modes}
        info = {"note": str(e), "norms": {str(m): v for m, v in norms.items()},
                "max_nonzero_mode_norm": max((v for m, v in norms.items() if m), default=0.0)}
        check = CheckReport("decay_fit", {}, 0.0, True, info)
        rows = [(m, norms[m], float("nan")) for m in modes]
    else:
        info = rep.to_dict()
        fitted = rep.fitted_k if args.regime == "smooth" else rep.fitted_log_rho
        residuals, tol = {}, 0.0
        if args.expect is not None:
            if args.regime == "smooth":
                tol = 0.3 if args.tol is None else args.tol
                residuals["fit_error"] = abs(fitted - args.expect)
            else:
                tol = 0.05 if args.tol is None else args.tol
                residuals["relative_fit_error"] = abs(fitted - args.expect) / abs(args.expect)
            info["expected"] = args.expect
        check = CheckReport("decay_fit", residuals, tol, None, info)
        rows = rep.rows()
    if args.csv:
        _write_csv(args.csv, rows)
    return emit(_suite("fourier", inputs, [check], t0), args)


def cmd_integrate(args) -> int:
    t0 = time.perf_counter()
    bi, inputs = _load_bialgebra(args)
    g = bi.g
    if g.realization is None:
        raise UsageError("group integration needs a matrix realization of g")
    K = args.steps
    if K < 2 or K % 2:
        raise UsageError("--steps must be an even integer >= 2 (composite Simpson)")
    cc = check_cocycle(bi)
    if not cc.passed and not args.force:
        raise UsageError(f"delta is not a 1-cocycle (residuals {cc.residuals}); use --force to integrate anyway")
    seed = 7
    pg, ph, a, c = default_paths(g, seed=seed)
    user = None
    if args.path:
        d = io.read_json(args.path)
        user = io.path_from_json(g, d)
        inputs["path"] = d
    main = user if user is not None else pg
    inputs.update({"steps": K, "check": args.check, "force": args.force})
    if args.check == "pathindep":
        tol = 1e-6 if args.tol is None else args.tol
        if user is None:
            p1 = product_path(g, a, c)
            p2 = [AlgebraPath.constant(g, c), AlgebraPath.constant(g, a)]
        else:
            p1, p2 = user, [user, AlgebraPath.constant(g, c), AlgebraPath.constant(g, -c)]
        rep = path_independence(bi, p1, p2, 2 * K, tol, refine=2)
    elif args.check == "cocycle":
        tol = 1e-6 if args.tol is None else args.tol
        rep = check_group_cocycle(bi, main, ph, 2 * K, tol, refine=2)
    elif args.check == "multiplicative":
        tol = 1e-6 if args.tol is None else args.tol
        rep = multiplicativity_residual(bi, main, ph, K, tol)
    else:
        tol = 1e-4 if args.tol is None else args.tol
        rep = jacobiator_check(bi, main, K, tol, require_zero=True)
    theta = integrate_cocycle(bi, main, K)
    rep.info["theta_max"] = float(np.abs(theta.value).max(initial=0.0))
    if theta.flags:
        rep.info["flags"] = theta.flags
    return emit(_suite(f"integrate-{args.check}", inputs, [rep], t0, seed), args)


def cmd_catalog(args) -> int:
    out = {
        "algebras": sorted(catalog.ALGEBRAS),
        "bialgebras": sorted(catalog.BIALGEBRAS),
        "loop_truncations": sorted(catalog.LOOPS),
        "fourier_samples": sorted(catalog.FOURIER_SAMPLES),
    }
    if args.json:
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
    else:
        for k, v in out.items():
            sys.stdout.write(f"{k}: {', '.join(v)}\n")
    return EXIT_OK


# --- parser ----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--plain", action="store_true", help="no ANSI colors")
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--out", help="write the JSON report to this file")
    common.add_argument("--tol", type=float, default=None)

    p = argparse.ArgumentParser(prog="liebialg",
                                description="Lie bialgebra and Manin triple checks")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("target", choices=["manin", "bialgebra", "jacobi", "cocycle"])
    v.add_argument("--catalog")
    v.add_argument("--weights", help="comma separated; diagonal k for m_n, else per basis element")
    v.add_argument("--weighting", help="weighting JSON file")
    v.add_argument("--algebra", help="algebra JSON file")
    v.add_argument("--bialgebra", help="bialgebra JSON file")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("fourier", parents=[common], help="Fourier decay analysis")
    f.add_argument("--catalog", help="built-in sample: geometric, smooth, constant")
    f.add_argument("--param", type=float, default=None, help="log rho, k or the constant")
    f.add_argument("--loop", help="sampled loop JSON file")
    f.add_argument("--samples", type=int, default=512, help="grid size for catalog samples")
    f.add_argument("--modes", type=int, required=True)
    f.add_argument("--regime", choices=["smooth", "analytic"], default="smooth")
    f.add_argument("--expect", type=float, default=None, help="expected k or log rho")
    f.add_argument("--csv", help="write the decay table here")
    f.set_defaults(func=cmd_fourier)

    i = sub.add_parser("integrate", parents=[common], help="integrate the group cocycle")
    i.add_argument("--catalog")
    i.add_argument("--bialgebra", help="bialgebra JSON file")
    i.add_argument("--path", help="path JSON file")
    i.add_argument("--steps", type=int, default=200)
    i.add_argument("--check", choices=["cocycle", "pathindep", "multiplicative", "jacobiator"],
                   default="pathindep")
    i.add_argument("--force", action="store_true", help="integrate a non-cocycle delta")
    i.set_defaults(func=cmd_integrate)

    c = sub.add_parser("catalog", parents=[common], help="list built-in examples")
    c.add_argument("action", choices=["list"])
    c.set_defaults(func=cmd_catalog)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, OSError, KeyError, ValueError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        sys.stderr.write(f"liebialg: error: {msg}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

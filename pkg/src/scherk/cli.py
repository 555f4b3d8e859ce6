"""``scherk`` command line.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error, 3 I/O error.
Every command prints a JSON :class:`Report` to stdout; ``--json PATH`` also writes it.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds, family, quad, verify, weierstrass
from .errors import ScherkError

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _jsonable(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    status: str = "ok"
    message: str = ""

    def to_json(self) -> str:
        # json writes floats with repr, the shortest string that reads back to the same double
        return json.dumps(_jsonable(asdict(self)), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls(**json.loads(text))


def _complex_flag(text: str) -> complex:
    try:
        re_part, im_part = text.split(",")
        return complex(float(re_part), float(im_part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected re,im but got {text!r}") from None


def _tol_flag(text: str):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE but got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value in {text!r}") from None


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_family(args) -> Report:
    t = args.t
    geo = family.trapezoid_geometry(t)
    zc = family.z_center(t)
    k = family.kappa(t)
    out = {
        "t": t,
        "s": geo.s,
        "tau": geo.tau,
        "vertices": [complex(v) for v in geo.vertices],
        "f0": complex(family.map_point(t, 0)),
        "z_center": zc,
        "kappa": k,
        "kappa_sq": k * k,
        "a": family.a_of_t(t),
        "theta": float(family.normal_angle(t)),
    }
    return Report("family", {"t": t}, out)


def cmd_mesh(args) -> Report:
    mesh = weierstrass.sample_mesh(args.t, args.n_r, args.n_theta, args.r_max, args.t_cap)
    text = mesh.to_obj() if args.format == "obj" else mesh.to_csv()
    _write(args.out, text)
    inputs = {k: getattr(args, k) for k in ("t", "n_r", "n_theta", "r_max", "t_cap", "format", "out")}
    outputs = {"vertices": int(mesh.vertices.shape[0]), "faces": int(mesh.faces.shape[0])}
    return Report("mesh", inputs, outputs, {"clamp_count": mesh.clamp_count})


def cmd_psi(args) -> Report:
    if args.theta is not None:
        return Report("psi", {"theta": args.theta}, {"psi": family.psi_of_theta(args.theta)})
    n = args.table
    if n < 2:
        raise UsageError("--table needs N >= 2")
    thetas = np.linspace(0.0, 0.5 * math.pi, n)
    return Report("psi", {"table": n}, {"theta": thetas, "psi": np.asarray(family.psi_of_theta(thetas))})


def cmd_bounds(args) -> Report:
    return Report("bounds", {}, bounds.corollary_constants().to_dict())


def cmd_solve_quad(args) -> Report:
    seed = quad.trapezoid_seed(args.seed_t) if args.seed_t is not None else None
    config = quad.solve_quad(args.w, seed=seed, cap=args.cap)
    cc = quad.center_curvature(config)
    out = {
        "w": config.w,
        "alpha": list(config.alpha),
        "theta": list(config.theta),
        "fz0": config.fz0,
        "curvature": cc.curvature,
        "hopf_form": cc.hopf_form,
    }
    diag = {"residual_norm": float(np.max(np.abs(quad.residual(config))))}
    return Report("solve-quad", {"w": args.w, "seed_t": args.seed_t, "cap": args.cap}, out, diag)


def cmd_scan(args) -> Report:
    result = quad.heinz_hopf_scan(args.grid, args.rmax, workers=args.workers)
    rows = ["re_w,im_w,c0,c1,status"]
    rows += [f"{r.w.real!r},{r.w.imag!r},{r.c0!r},{r.c1!r},{r.status}" for r in result.records]
    _write(args.out, "\n".join(rows) + "\n")
    out = {
        "c0_max": result.c0_max,
        "c0_argmax": result.c0_argmax,
        "c1_max": result.c1_max,
        "c1_argmax": result.c1_argmax,
    }
    diag = {"cells": len(result.records), "converged_fraction": result.converged_fraction}
    return Report("scan", {"grid": args.grid, "rmax": args.rmax, "out": args.out}, out, diag)


def cmd_verify(args) -> Report:
    overrides = dict(args.tol or [])
    try:
        results = verify.run_suite(args.suite, overrides)
    except KeyError as err:
        raise UsageError(str(err)) from None
    for r in results:
        print(r.line(), file=sys.stderr)
    failed = [f"{r.suite}.{r.name}" for r in results if not r.passed]
    report = Report(
        "verify",
        {"suite": args.suite, "tol": overrides},
        {f"{r.suite}.{r.name}": {"passed": r.passed, "error": r.error, "tol": r.tol} for r in results},
        {"worst_margin": min(r.margin for r in results), "failed": failed},
    )
    if failed:
        report.status = "fail"
        report.message = f"{len(failed)} check(s) failed"
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scherk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="also write the report to PATH")

    p = sub.add_parser("family", parents=[common], help="closed-form data of S^t")
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(handler=cmd_family)

    p = sub.add_parser("mesh", parents=[common], help="export a surface mesh")
    p.add_argument("--t", type=float, default=0.5 * math.pi - 0.1)
    p.add_argument("--n-r", type=int, default=64)
    p.add_argument("--n-theta", type=int, default=64)
    p.add_argument("--r-max", type=float, default=0.999)
    p.add_argument("--t-cap", type=float, default=math.inf)
    p.add_argument("--format", choices=("obj", "csv"), default="obj")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_mesh)

    p = sub.add_parser("psi", parents=[common], help="sharp curvature bound versus normal angle")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float)
    g.add_argument("--table", type=int)
    p.set_defaults(handler=cmd_psi)

    p = sub.add_parser("bounds", parents=[common], help="reproduce the bound constants")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("solve-quad", parents=[common], help="solve the quadrilateral problem for w")
    p.add_argument("--w", type=_complex_flag, required=True, help="target as re,im")
    p.add_argument("--seed-t", type=float)
    p.add_argument("--cap", type=float, default=quad.DEFAULT_CAP)
    p.set_defaults(handler=cmd_solve_quad)

    p = sub.add_parser("scan", parents=[common], help="Heinz/Hopf candidate scan")
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--rmax", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, help="defaults to SCHERK_THREADS or 1")
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--suite", choices=("all", *verify.SUITES), default="all")
    p.add_argument("--tol", type=_tol_flag, action="append", metavar="NAME=VALUE")
    p.set_defaults(handler=cmd_verify)
    return parser


def _error_report(args, err) -> Report:
    inputs = {k: v for k, v in vars(args).items() if k not in ("handler", "json", "command")}
    return Report(args.command, inputs, status="error", message=str(err))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    code = EXIT_OK
    try:
        report = args.handler(args)
        if report.status == "fail":
            code = EXIT_VERIFY
    except OSError as err:
        report, code = _error_report(args, err), EXIT_IO
    except (ScherkError, ValueError, UsageError) as err:
        report, code = _error_report(args, err), EXIT_USAGE
    text = report.to_json()
    print(text)
    if args.json:
        try:
            _write(args.json, text + "\n")
        except OSError as err:
            print(f"cannot write {args.json}: {err}", file=sys.stderr)
            return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())

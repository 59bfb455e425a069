"""Command-line front end.

Exit codes: 0 success, 2 usage or validation error, 3 numerical failure,
4 catalog verification failure. Output is JSON with sorted keys.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from contextlib import nullcontext

from . import bounds as bd
from . import catalog as cat
from .coefficients import (
    BeltramiValue,
    EllipticityMatrix,
    distortion_summary,
    matrix_to_mu,
    mu_to_matrix,
)
from .errors import (
    AssemblyError,
    ConvergenceError,
    InvalidDilatationError,
    InvalidMatrixError,
    MeshingError,
    ParameterError,
    DomainError,
    QuadratureError,
    VerificationError,
)
from .fem import lambda1_estimate, weighted_reduction_check

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4
THREADS_ENV = "MEMBRANE_BOUNDS_THREADS"
PASS_SLACK = 0.005


class CLIError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _floats(text: str, n: int, flag: str):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise CLIError(f"{flag} expects {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise CLIError(f"{flag} expects {n} comma-separated numbers, got {text!r}")
    return vals


def _params(pairs) -> dict:
    out = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise CLIError(f"--param expects key=value, got {item!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise CLIError(f"--param {key}: {value!r} is not a number") from None
    return out


def _entry(args):
    try:
        return cat.entry(args.entry, **_params(args.param))
    except ParameterError as exc:
        raise CLIError(str(exc)) from exc


def _matrix_json(A: EllipticityMatrix) -> dict:
    return {"a11": A.a11, "a12": A.a12, "a22": A.a22}


def cmd_convert(args) -> dict:
    try:
        if args.matrix is not None:
            A = EllipticityMatrix(*_floats(args.matrix, 3, "--matrix"))
            mu = matrix_to_mu(A)
        else:
            re, im = _floats(args.mu, 2, "--mu")
            mu = BeltramiValue(re, im)
            A = mu_to_matrix(mu)
    except (InvalidMatrixError, InvalidDilatationError) as exc:
        raise CLIError(str(exc)) from exc
    s = distortion_summary(A)
    return {
        "matrix": _matrix_json(A),
        "mu": {"im": mu.im, "re": mu.re},
        "summary": {"K": s.K, "Q": s.Q, "mu_abs": s.mu_sup},
    }


def cmd_bound(args) -> dict:
    e = _entry(args)
    try:
        reports = bd.applicable_bounds(e, beta=args.beta)
    except DomainError as exc:
        raise CLIError(str(exc)) from exc
    except QuadratureError as exc:
        raise CLIError(str(exc), EXIT_NUMERIC) from exc
    return {
        "entry": e.name,
        "parameters": e.parameters,
        "bounds": [r.to_json() for r in reports],
    }


def cmd_validate(args):
    e = _entry(args)
    if args.levels < 2:
        raise CLIError("--levels must be >= 2")
    if not args.target_h > 0:
        raise CLIError("--target-h must be positive")
    try:
        reports = bd.applicable_bounds(e, beta=args.beta)
        direct = lambda1_estimate(e.domain, e.map.matrix_field(), args.levels, args.target_h)
        reduction = weighted_reduction_check(e, args.levels, args.target_h)
    except (ParameterError, DomainError) as exc:
        raise CLIError(str(exc)) from exc
    except (MeshingError, AssemblyError, ConvergenceError, QuadratureError) as exc:
        raise CLIError(f"FEM failure: {exc}", EXIT_NUMERIC) from exc
    if args.dump_mesh:
        direct.meshes[-1].write(args.dump_mesh)
    if args.format == "csv":
        return direct.to_csv()
    fem = direct.extrapolated
    margins = [(fem - r.value) / fem for r in reports]
    return {
        "entry": e.name,
        "parameters": e.parameters,
        "bounds": [r.to_json() for r in reports],
        "fem_lambda1": fem,
        "margins": margins,
        "pass": all(r.value <= fem * (1 + PASS_SLACK) for r in reports),
        "convergence": direct.to_json(),
        "weighted_reduction": reduction.to_json(),
    }


def _faulty(e: cat.CatalogEntry) -> cat.CatalogEntry:
    import dataclasses

    bad_map = dataclasses.replace(e.map, mu=lambda z, f=e.map.mu: -f(z))
    return dataclasses.replace(e, map=bad_map)


def cmd_catalog(args) -> dict:
    entries = cat.all_entries()
    if args.inject_fault:
        entries[0] = _faulty(entries[0])
    listing = [e.to_json() for e in entries]
    if args.verify:
        for item, e in zip(listing, entries):
            try:
                item["verification"] = cat.verify_entry(e, args.samples, args.tol).to_json()
            except VerificationError as exc:
                raise CLIError(f"verification failed: {exc}", EXIT_VERIFY) from exc
    return {"count": len(listing), "entries": listing}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="membrane-bounds",
        description="Lower bounds for the first Dirichlet eigenvalue of -div(A grad f).",
    )
    parser.add_argument("--output", "-o", help="write output to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert between a matrix and its complex dilatation")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", help="a11,a12,a22 with unit determinant")
    g.add_argument("--mu", help="re,im with modulus < 1")
    p.set_defaults(func=cmd_convert)

    def entry_args(p):
        p.add_argument("--entry", required=True, help=f"one of: {', '.join(cat.ENTRY_NAMES)}")
        p.add_argument("--param", action="append", metavar="KEY=VALUE",
                       help="entry parameter (repeatable)")
        p.add_argument("--beta", type=float, help="also emit the beta-regular bound")

    p = sub.add_parser("bound", help="all lower bounds applicable to a catalog entry")
    entry_args(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("validate", help="compare bounds against the FEM eigenvalue")
    entry_args(p)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--target-h", type=float, default=0.1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--dump-mesh", metavar="PATH", help="write the finest mesh as plain text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("catalog", help="list the worked examples")
    p.add_argument("--verify", action="store_true", help="run the closed-form self-checks")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_catalog)
    return parser


def _thread_limit():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return nullcontext()
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise CLIError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with _thread_limit():
            result = args.func(args)
    except CLIError as exc:
        print(f"membrane-bounds: error: {exc}", file=sys.stderr)
        return exc.code
    text = result if isinstance(result, str) else dumps(result)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``orthoforge <subcommand> ...``.

Reports go to stdout as JSON with numbers at 12 significant digits; surface
files keep full precision so they read back exactly.  Errors are one JSON
object on stderr with exit code 1 (usage), 2 (domain), 3 (resource cap) or
4 (no convergence).
"""

import argparse
import json
import sys

import numpy as np

from . import constructions
from .errors import ConvergenceError, DomainError, OrthoforgeError, ResourceCapError
from .enumeration import DEFAULT_CAP, compare_with_formula, enumerate_gluings, iso_classes
from .hexagon_trig import bavard_bound, collar_width, validate_signature
from .maximize import certify_local_max, maximize_fixed_boundaries, multistart_total_constraint, OptimizationInfo, \
    random_start, theorem_b_lower_bound
from .metric import boundary_component_lengths, surface_from_json, surface_to_json, total_boundary_length
from .combinatorics import decomposition_to_json
from .spectrum import default_threads, enumerate_orthogeodesics, orthosystole_report, spectrum_to_csv

EXIT_USAGE, EXIT_DOMAIN, EXIT_CAP, EXIT_CONVERGENCE = 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _num(x):
    return float(f"{x:.12g}")


def _rounded(obj):
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if isinstance(obj, np.floating):
        return _num(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _emit(obj, out=None, exact=()):
    """Print ``obj`` as JSON; keys in ``exact`` are surface data and keep full precision."""
    obj = {k: (v if k in exact else _rounded(v)) for k, v in obj.items()}
    text = json.dumps(obj, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _floats(text, count=None, what="values"):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated numbers, got {text!r}")
    if count is not None and len(vals) != count:
        raise UsageError(f"{what} needs {count} numbers, got {len(vals)}")
    return vals


def _ints(text, count, what):
    vals = _floats(text, count, what)
    if any(v != int(v) for v in vals):
        raise UsageError(f"{what} must be integers, got {text!r}")
    return [int(v) for v in vals]


def _read_surface(path):
    with open(path) as fh:
        return surface_from_json(fh.read())


def _write_surface(X, path):
    text = json.dumps(surface_to_json(X), sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_construct(args):
    fam = args.family
    params = args.params or args.signature
    if fam == "equal":
        if params is None or args.total_length is None:
            raise UsageError("equal needs --signature g,n (or --params) and --total-length")
        g, n = _ints(params, 2, "signature")
        X = constructions.equal_length_surface(constructions.standard_decomposition(g, n), args.total_length)
    elif fam in ("bicolored", "symmetric"):
        if params is None or args.boundary_length is None:
            raise UsageError(f"{fam} needs --params and --boundary-length")
        if fam == "bicolored":
            (g,) = _ints(params, 1, "bicolored params (genus)")
            d = constructions.bicolored_decomposition(g)
        else:
            n, m = _ints(params, 2, "symmetric params (n,m)")
            d = constructions.symmetric_family(n, m)
        X = constructions.equal_length_surface(d, args.boundary_length * len(d.cycles))
    else:
        if params is None:
            raise UsageError("pants needs --params l1,l2,l3")
        X = constructions.pants_from_cuffs(*_floats(params, 3, "cuff lengths"))
    _write_surface(X, args.out)
    return 0


def cmd_spectrum(args):
    X = _read_surface(args.input)
    threads = args.threads
    if args.cutoff in (None, "auto"):
        rep = orthosystole_report(X, threads=threads)
    else:
        try:
            cutoff = float(args.cutoff)
        except ValueError:
            raise UsageError(f"--cutoff takes a number or 'auto', got {args.cutoff!r}")
        rep = enumerate_orthogeodesics(X, cutoff, threads=threads)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(spectrum_to_csv(rep))
    _emit({
        "osys": rep.osys,
        "okiss": rep.okiss,
        "classes": len(rep.classes),
        "cutoff": rep.cutoff_used,
        "lengths": [c.length for c in rep.classes],
    })
    return 0


def cmd_maximize(args):
    X0 = _read_surface(args.input)
    d = X0.decomposition
    g, n = X0.signature
    if (args.total_length is None) == (args.boundary_lengths is None):
        raise UsageError("give exactly one of --total-length and --boundary-lengths")
    if args.starts < 1:
        raise UsageError("--starts must be at least 1")
    iterations = 0
    if args.total_length is not None:
        L = args.total_length
        best, results = multistart_total_constraint(d, L, starts=args.starts, seed=args.seed, threads=args.threads)
        iterations = sum(info.iterations for _, info in results)
    else:
        ell = np.array(_floats(args.boundary_lengths, n, "boundary lengths"))
        L = float(ell.sum())
        rng = np.random.default_rng(args.seed)
        best, best_osys = None, -1.0
        last = None
        for _ in range(args.starts):
            info = OptimizationInfo()
            try:
                X = maximize_fixed_boundaries(d, ell, random_start(d, rng), info=info)
            except ConvergenceError as exc:
                last = exc
                continue
            finally:
                iterations += info.iterations
            osys = orthosystole_report(X, threads=args.threads).osys
            if osys > best_osys:
                best, best_osys = X, osys
        if best is None:
            raise last or ConvergenceError("no start converged")
    cert = certify_local_max(best, threads=args.threads)
    if args.out:
        _write_surface(best, args.out)
    _emit({
        "surface": surface_to_json(best),
        "certificate": {
            "osys": cert["osys"],
            "okiss": cert["okiss"],
            "bound": bavard_bound(g, n, L),
            "equal_lengths": cert["is_equal_lengths"],
            "iterations": iterations,
        },
    }, exact=("surface",))
    return 0


def cmd_bounds(args):
    g, n = _ints(args.signature, 2, "signature")
    g, n = validate_signature(g, n)
    L = args.total_length
    out = {"signature": [g, n], "total_length": L, "bavard_bound": bavard_bound(g, n, L)}
    # collar width when the total length is shared equally by the boundary components
    out["collar_width"] = collar_width(L / n)
    if n >= 2 and g >= n:
        out["theorem_b_lower_bound"] = theorem_b_lower_bound(g, n, L / n)
    _emit(out)
    return 0


def cmd_enumerate(args):
    g, n = _ints(args.signature, 2, "signature")
    reps = enumerate_gluings(g, n, cap=args.cap, threads=args.threads)
    report = iso_classes(reps)
    out = {
        "signature": [g, n],
        "classes": len(report.oriented),
        "classes_with_reflection": len(report.unoriented),
        "automorphisms": [c.automorphisms for c in report.oriented],
        "decompositions": [decomposition_to_json(c.representative) for c in report.oriented],
    }
    if args.compare_formula:
        if n != 1:
            raise DomainError("the counting formula is stated for one boundary component")
        out["comparison"] = compare_with_formula(g, cap=args.cap, threads=args.threads)
    _emit(out)
    return 0


def cmd_verify(args):
    X = _read_surface(args.input)
    g, n = X.signature
    cert = certify_local_max(X, threads=args.threads)
    cert["signature"] = [g, n]
    cert["total_length"] = total_boundary_length(X)
    cert["boundary_lengths"] = boundary_component_lengths(X).tolist()
    cert["okiss_lower_bound"] = 2 * g - 2 + n
    _emit(cert)
    return 0


def build_parser():
    p = _Parser(prog="orthoforge", description="Orthogeodesics on hyperbolic surfaces with geodesic boundary.")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: ORTHOFORGE_THREADS or 1)")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("construct", help="build a surface and write it as JSON")
    c.add_argument("--family", required=True, choices=["equal", "bicolored", "symmetric", "pants"])
    c.add_argument("--params", help="equal: g,n  bicolored: g  symmetric: n,m  pants: l1,l2,l3")
    c.add_argument("--signature", help="g,n for the equal family")
    c.add_argument("--total-length", type=float)
    c.add_argument("--boundary-length", type=float, help="common boundary length for bicolored/symmetric")
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("spectrum", help="orthogeodesic spectrum of a surface file")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--cutoff", default="auto")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_spectrum)

    m = sub.add_parser("maximize", help="maximize the orthosystole from seeded random starts")
    m.add_argument("--in", dest="input", required=True)
    m.add_argument("--total-length", type=float)
    m.add_argument("--boundary-lengths")
    m.add_argument("--starts", type=int, default=5)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", help="also write the optimal surface here")
    m.set_defaults(func=cmd_maximize)

    b = sub.add_parser("bounds", help="closed-form bounds for a signature")
    b.add_argument("--signature", required=True)
    b.add_argument("--total-length", type=float, required=True)
    b.set_defaults(func=cmd_bounds)

    e = sub.add_parser("enumerate", help="decompositions of a signature up to isomorphism")
    e.add_argument("--signature", required=True)
    e.add_argument("--compare-formula", action="store_true")
    e.add_argument("--cap", type=int, default=DEFAULT_CAP)
    e.set_defaults(func=cmd_enumerate)

    v = sub.add_parser("verify", help="certificate for a surface file")
    v.add_argument("--in", dest="input", required=True)
    v.set_defaults(func=cmd_verify)
    return p


def _fail(code, kind, message, **extra):
    body = {"error": kind, "message": message, "exit_code": code}
    body.update(extra)
    print(json.dumps(body, sort_keys=True), file=sys.stderr)
    return code


def run(argv=None):
    """Run the CLI on ``argv`` and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads is None:
            args.threads = default_threads()
        elif args.threads < 1:
            raise UsageError("--threads must be at least 1")
        return args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except OSError as exc:
        return _fail(EXIT_USAGE, "io", str(exc))
    except ResourceCapError as exc:
        return _fail(EXIT_CAP, type(exc).__name__, str(exc), required=exc.required)
    except ConvergenceError as exc:
        return _fail(EXIT_CONVERGENCE, type(exc).__name__, str(exc))
    except DomainError as exc:
        return _fail(EXIT_DOMAIN, type(exc).__name__, str(exc))
    except OrthoforgeError as exc:
        return _fail(EXIT_DOMAIN, type(exc).__name__, str(exc))


def main():
    sys.exit(run())

"""``arraydir`` command line.

Angles are degrees at this surface. Exit status: 0 success, 1 usage or
input error, 2 computation or validation failure.
"""

import argparse
import math
import sys

import numpy as np

from . import array_model
from .array_model import read_array
from .directivity import (NormalizationBreakdown, NormalizationError, directivity, intensity_scan,
                          normalization, scan, scan_grid, to_dbi)
from .pattern import Direction, ElementPattern, radiation_intensity
from .quadrature import DEFAULT_REL_TOL, QuadratureError, normalization_numeric
from .sinc_derivative import derive_terms

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2
LOW_ORDER_CASES = ((0, 0), (0, 1), (1, 0), (1, 1))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_array(p, required=True):
    p.add_argument("--array", required=required, help="array file (JSON)")


def _add_pattern(p, default=0):
    p.add_argument("--u", type=int, default=default, help="sin exponent (default %(default)s)")
    p.add_argument("--v", type=int, default=default, help="cos exponent (default %(default)s)")


def _add_grid(p):
    p.add_argument("--theta-steps", type=int, default=181)
    p.add_argument("--phi-steps", type=int, default=360)
    p.add_argument("--output", required=True, help="CSV path, or - for stdout")


def build_parser():
    parser = _Parser(prog="arraydir", description="Closed-form directivity of volumetric antenna arrays.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("directivity", help="directivity at one direction")
    _add_array(p)
    _add_pattern(p)
    p.add_argument("--theta", type=float, required=True, help="degrees")
    p.add_argument("--phi", type=float, required=True, help="degrees")
    p.add_argument("--method", choices=("closed", "quadrature", "both"), default="closed")
    p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL, help="quadrature tolerance")
    p.add_argument("--precision", type=int, default=2, help="decimals for dBi")

    p = sub.add_parser("scan", help="directivity over a theta/phi grid, CSV output")
    _add_array(p)
    _add_pattern(p)
    _add_grid(p)
    p.add_argument("--precision", type=int, default=2)

    p = sub.add_parser("pattern", help="radiation intensity over a theta/phi grid, CSV output")
    _add_array(p)
    _add_pattern(p)
    _add_grid(p)

    p = sub.add_parser("validate", help="closed form against numerical integration")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--array", help="array file (JSON)")
    src.add_argument("--generate-random", metavar="N=COUNT", help="random volumetric array, e.g. N=8")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--u", type=int, help="omit u and v to run (0,0), (0,1), (1,0), (1,1)")
    p.add_argument("--v", type=int)
    p.add_argument("--theta", type=float, default=90.0, help="degrees")
    p.add_argument("--phi", type=float, default=0.0, help="degrees")
    p.add_argument("--tolerance", type=float, default=1e-8, help="max relative error")
    p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL, help="quadrature tolerance")
    p.add_argument("--corrupt-normalization", type=float, default=1.0, help=argparse.SUPPRESS)

    p = sub.add_parser("generate", help="write a canonical array file")
    p.add_argument("--kind", choices=array_model.KINDS, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--nz", type=int)
    p.add_argument("--spacing", type=float, default=0.5, help="wavelengths")
    p.add_argument("--radius", type=float, help="wavelengths (ring-xy)")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--phase", type=float, default=0.0, help="degrees")
    p.add_argument("--output", default="-", help="path, or - for stdout")

    p = sub.add_parser("dump-derivative", help="print the symbolic z-derivative of sin(r)/r")
    p.add_argument("--order", type=int, required=True)
    return parser


def _pattern(args):
    try:
        return ElementPattern(args.u, args.v)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _direction(theta, phi):
    try:
        return Direction.from_degrees(theta, phi)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _fmt_breakdown(b):
    return f"self {b.self_term:.12g}  cross {b.cross_term:.12g}  total {b.total:.12g}"


def _dbi(value, precision):
    return "-inf dBi" if value == -math.inf else f"{value:.{precision}f} dBi"


def cmd_directivity(args, out):
    array = read_array(args.array)
    pattern = _pattern(args)
    direction = _direction(args.theta, args.phi)
    print(f"array        {args.array} ({len(array)} elements)", file=out)
    print(f"pattern      u={pattern.u} v={pattern.v}", file=out)
    print(f"direction    theta={args.theta:g} deg  phi={args.phi:g} deg", file=out)
    if args.method in ("closed", "both"):
        result = directivity(array, pattern, direction)
        print(f"T closed     {_fmt_breakdown(result.breakdown)}", file=out)
    if args.method in ("quadrature", "both"):
        numeric = normalization_numeric(array, pattern, args.rel_tol)
        print(f"T quadrature {numeric.value:.12g}  (error estimate {numeric.error_estimate:.2e})", file=out)
        if args.method == "quadrature":
            b = NormalizationBreakdown(math.nan, math.nan, numeric.value)
            result = directivity(array, pattern, direction, b)
        else:
            rel = abs(result.breakdown.total - numeric.value) / numeric.value
            print(f"rel. error   {rel:.3e}", file=out)
    print(f"directivity  {result.linear:.10g} (linear)  {_dbi(result.dBi, args.precision)}", file=out)
    return EXIT_OK


def _write_csv(path, header, columns, fmt, out):
    table = np.column_stack(columns)
    if path == "-":
        np.savetxt(out, table, fmt=fmt, delimiter=",", header=header, comments="")
        return
    try:
        np.savetxt(path, table, fmt=fmt, delimiter=",", header=header, comments="")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def _summary_stream(args, out):
    # keep stdout pure CSV when the grid itself goes there
    return sys.stderr if args.output == "-" else out


def _grid_columns(theta, phi):
    tt, pp = np.meshgrid(np.degrees(theta), np.degrees(phi), indexing="ij")
    return tt.ravel(), pp.ravel()


def cmd_scan(args, out):
    array = read_array(args.array)
    pattern = _pattern(args)
    try:
        result = scan(array, pattern, args.theta_steps, args.phi_steps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    t, p = _grid_columns(result.theta, result.phi)
    with np.errstate(divide="ignore"):
        dbi = 10.0 * np.log10(result.linear.ravel())
    _write_csv(args.output, "theta_deg,phi_deg,directivity_linear,directivity_dbi",
               [t, p, result.linear.ravel(), dbi], ["%.6f", "%.6f", "%.12e", "%.6f"], out)
    best = result.best
    theta_deg, phi_deg = best.direction.degrees
    print(f"max directivity {best.linear:.10g} ({_dbi(best.dBi, args.precision)}) "
          f"at theta={theta_deg:.4f} deg phi={phi_deg:.4f} deg", file=_summary_stream(args, out))
    return EXIT_OK


def cmd_pattern(args, out):
    array = read_array(args.array)
    pattern = _pattern(args)
    try:
        theta, phi = scan_grid(args.theta_steps, args.phi_steps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    grid = intensity_scan(array, pattern, theta, phi)
    t, p = _grid_columns(theta, phi)
    _write_csv(args.output, "theta_deg,phi_deg,radiation_intensity",
               [t, p, grid.ravel()], ["%.6f", "%.6f", "%.12e"], out)
    i, j = np.unravel_index(int(np.argmax(grid)), grid.shape)
    print(f"max intensity {grid[i, j]:.10g} at theta={math.degrees(theta[i]):.4f} deg "
          f"phi={math.degrees(phi[j]):.4f} deg", file=_summary_stream(args, out))
    return EXIT_OK


def _parse_count(text):
    raw = text.split("=", 1)[1] if "=" in text else text
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"--generate-random expects N=<count>, got {text!r}") from None
    if n < 1:
        raise UsageError("--generate-random needs N >= 1")
    return n


def cmd_validate(args, out):
    if args.array:
        array = read_array(args.array)
        source = args.array
    else:
        n = _parse_count(args.generate_random)
        array = array_model.random_array(np.random.default_rng(args.seed), n)
        source = f"random N={n} seed={args.seed}"
    if (args.u is None) != (args.v is None):
        raise UsageError("give both --u and --v, or neither")
    cases = LOW_ORDER_CASES if args.u is None else ((args.u, args.v),)
    direction = _direction(args.theta, args.phi)
    where = f"theta={args.theta:g} deg phi={args.phi:g} deg"
    print(f"validate {source} at {where}, tolerance {args.tolerance:g}", file=out)
    failures = 0
    for u, v in cases:
        try:
            pattern = ElementPattern(u, v)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        closed = normalization(array, pattern).total * args.corrupt_normalization
        numeric = normalization_numeric(array, pattern, args.rel_tol).value
        rel = abs(closed - numeric) / numeric
        intensity = radiation_intensity(array, pattern, direction)
        ok = rel <= args.tolerance
        failures += not ok
        print(f"u={u} v={v}  closed {to_dbi(intensity / closed):9.4f} dBi  "
              f"quadrature {to_dbi(intensity / numeric):9.4f} dBi  "
              f"T {closed:.12g} vs {numeric:.12g}  rel.err {rel:.2e}  {'PASS' if ok else 'FAIL'}",
              file=out)
    print(f"{len(cases) - failures}/{len(cases)} passed", file=out)
    return EXIT_OK if failures == 0 else EXIT_FAILURE


def cmd_generate(args, out):
    try:
        array = array_model.generate_array(
            args.kind, n=args.n, nx=args.nx, ny=args.ny, nz=args.nz, spacing=args.spacing,
            radius=args.radius, amplitude=args.amplitude, phase=math.radians(args.phase))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = array_model.dump_array(array)
    if args.output == "-":
        out.write(text)
    else:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc.strerror or exc}") from None
        print(f"wrote {len(array)} elements to {args.output}", file=out)
    return EXIT_OK


def cmd_dump_derivative(args, out):
    if args.order < 0:
        raise UsageError("--order must be >= 0")
    terms = derive_terms(args.order)
    print(f"d^{args.order}/dz^{args.order} [sin(r)/r], r = sqrt(beta^2 + z^2): {len(terms)} terms", file=out)
    print(terms, file=out)
    return EXIT_OK


COMMANDS = {
    "directivity": cmd_directivity,
    "scan": cmd_scan,
    "pattern": cmd_pattern,
    "validate": cmd_validate,
    "generate": cmd_generate,
    "dump-derivative": cmd_dump_derivative,
}


def run(argv=None, out=None):
    """Parse and dispatch; returns the exit status instead of exiting."""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except (QuadratureError, NormalizationError) as exc:
        print(f"arraydir: computation failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (UsageError, ValueError) as exc:
        # ValueError here is a library precondition (bad tolerance, bad env var)
        print(f"arraydir: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None):
    sys.exit(run(argv))

"""``monopole-wkb``: command-line front end.

Subcommands::

    spectrum   exact and almost eigenvalues (optionally the finite-difference oracle)
    verify     run the verification suite, JSON report
    flow       integrate the magnetic geodesic flow
    torus      summary of an invariant torus
    quasimode  residuals of WKB quasimodes (optionally dump the sampled section)
    holonomy   holonomy of a latitude loop

Every option can also be given in a ``key = value`` file passed with
``--config``; command-line flags win.  Exit codes: 0 ok, 1 failed check,
2 invalid input, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from typing import Any, Callable, Sequence

from . import __version__
from . import canonical, checks, dynamics, geometry, io, oracles, quantization, spectrum, symbols, tori
from .errors import ConvergenceError, MonopoleError, ValidationError

EXIT_OK, EXIT_CHECK, EXIT_VALIDATION, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3, 4


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


# (flags, dest, type, default, help) per subcommand; defaults are applied after the config file
_OPTIONS: dict[str, list[tuple[str, str, Callable, Any, str]]] = {
    "spectrum": [
        ("--N", "N", int, None, "tensor power N >= 1 (required)"),
        ("--jmax", "j_max", int, 3, "largest j"),
        ("--numeric", "numeric", None, False, "add the finite-difference oracle columns"),
        ("--grid", "grid", int, 4000, "radial grid points for --numeric"),
    ],
    "verify": [
        ("--scale", "scale", str, "full", "full or quick"),
        ("--only", "only", _int_list, None, "comma-separated criterion numbers"),
        ("--inject-fault", "fault", str, None, "mutation control: no-quarter"),
    ],
    "flow": [
        ("--theta", "theta", float, None, "initial colatitude (required)"),
        ("--phi", "phi", float, 0.0, "initial longitude"),
        ("--ptheta", "p_theta", float, 0.0, "initial p_theta"),
        ("--pphi", "p_phi", float, 0.0, "initial kinetic p_phi"),
        ("--B", "B", float, 0.5, "classical charge"),
        ("--tmax", "t_max", float, 10.0, "time horizon"),
        ("--samples", "samples", int, 101, "number of output times"),
        ("--abs-tol", "abs_tol", float, 1e-13, "absolute tolerance"),
        ("--rel-tol", "rel_tol", float, 1e-13, "relative tolerance"),
        ("--closure", "closure", None, False, "also report the first-return period"),
    ],
    "torus": [
        ("--E", "E", float, None, "energy (required)"),
        ("--P", "P", float, None, "value of I2 (required)"),
        ("--B", "B", float, 0.5, "classical charge"),
    ],
    "quasimode": [
        ("--N", "N", _int_list, None, "tensor power(s), comma-separated (required)"),
        ("--j", "j", int, None, "level index j (required)"),
        ("--k1", "k1", int, None, "Fourier index (default ceil(N/2))"),
        ("--ntheta", "n_theta", int, 4096, "theta grid points across the annulus"),
        ("--delta-frac", "delta_frac", float, 0.1, "cutoff width as a fraction of the annulus"),
        ("--shift", "shift", float, 0.0, "detuning added to lambda_hat"),
        ("--section", "section", str, None, "also write the sampled section (JSON) here"),
        ("--nphi", "n_phi", int, None, "phi samples in the section dump"),
    ],
    "holonomy": [
        ("--theta", "theta", float, None, "colatitude of the loop (required)"),
        ("--N", "N", int, 1, "tensor power"),
        ("--B", "B", float, 0.5, "classical charge"),
        ("--samples", "samples", int, 256, "loop samples"),
    ],
}


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None, help="output format")
    common.add_argument("--output", "-o", default=None, help="output file (default stdout)")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized checks")

    parser = _ArgumentParser(prog="monopole-wkb", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    for name, options in _OPTIONS.items():
        p = sub.add_parser(name, parents=[common])
        for flag, dest, typ, _default, help_ in options:
            if typ is None:
                p.add_argument(flag, dest=dest, action="store_const", const=True, default=None, help=help_)
            else:
                p.add_argument(flag, dest=dest, type=typ, default=None, help=help_)
    return parser


def _truthy(text: str) -> bool:
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"not a boolean: {text!r}")


def read_config(path: str) -> dict[str, str]:
    """Parse a ``key = value`` file (an optional ``[section]`` header is ignored)."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        cp.read_string("[__top__]\n" + text)
    except configparser.Error as exc:
        raise ValidationError(f"malformed config {path}: {exc}") from None
    out: dict[str, str] = {}
    for section in cp.sections():
        out.update(cp[section])
    return {k.replace("-", "_"): v for k, v in out.items()}


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Merge flags, config file and defaults (in that order of precedence)."""
    conf = read_config(args.config) if args.config else {}
    aliases = {flag.lstrip("-").replace("-", "_").lower(): dest for flag, dest, *_ in _OPTIONS[args.command]}
    known = {dest: (typ, default) for _flag, dest, typ, default, _h in _OPTIONS[args.command]}
    known.update({"fmt": (str, None), "output": (str, None), "seed": (int, 0)})
    aliases.update({"format": "fmt"})
    for key, raw in conf.items():
        dest = aliases.get(key.lower(), key)
        if dest not in known:
            raise ValidationError(f"unknown config key {key!r} for '{args.command}'")
        if getattr(args, dest) is None:
            typ = known[dest][0]
            try:
                setattr(args, dest, _truthy(raw) if typ is None else typ(raw))
            except (ValueError, argparse.ArgumentTypeError):
                raise ValidationError(f"bad value for {key}: {raw!r}") from None
    for dest, (_typ, default) in known.items():
        if getattr(args, dest) is None:
            setattr(args, dest, default)
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ValidationError(f"missing required option(s): {', '.join(missing)}")


def _positive(name, value, strict=True):
    if not math.isfinite(value) or value < 0 or (strict and value == 0):
        raise ValidationError(f"{name} must be {'positive' if strict else 'non-negative'}, got {value!r}")


def _emit(args, fmt_default: str, columns: Sequence[str] | None, rows, payload) -> None:
    fmt = args.fmt or fmt_default
    if fmt == "csv":
        if columns is None:
            raise ValidationError("this command has no CSV form; use --format json")
        text = io.render_csv(columns, rows)
    else:
        text = io.render_json(payload)
    io.write_text(text, args.output)


def cmd_spectrum(args) -> int:
    _require(args, "N")
    if args.N < 1:
        raise ValidationError(f"N must be >= 1, got {args.N}")
    if args.j_max < 0:
        raise ValidationError(f"jmax must be >= 0, got {args.j_max}")
    if args.numeric:
        if args.grid < 16:
            raise ValidationError("grid must have at least 16 points")
        lines = spectrum.numeric_table(args.N, args.j_max, spectrum.RadialGrid(args.grid))
        cols = io.SPECTRUM_NUMERIC_COLUMNS
        rows = [(ln.N, ln.j, ln.lambda_exact, ln.lambda_numeric, ln.numeric_error, ln.mult, ln.mult_numeric)
                for ln in lines]
    else:
        lines = spectrum.exact_table(args.N, args.j_max)
        cols = io.SPECTRUM_COLUMNS
        rows = [(ln.N, ln.j, ln.lambda_exact, ln.lambda_hat, ln.lambda_hat - ln.lambda_exact, ln.mult,
                 quantization.multiplicity_hat(ln.N, ln.j)) for ln in lines]
    _emit(args, "csv", cols, rows, {"columns": list(cols), "rows": [list(r) for r in rows]})
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.scale not in checks.SCALES:
        raise ValidationError(f"scale must be one of {checks.SCALES}")
    faults = () if args.fault is None else (args.fault,)
    if any(f not in checks.FAULTS for f in faults):
        raise ValidationError(f"unknown fault; available: {', '.join(checks.FAULTS)}")
    if args.only and any(k not in checks.CHECKS for k in args.only):
        raise ValidationError(f"criteria are numbered {min(checks.CHECKS)}..{max(checks.CHECKS)}")
    results = checks.run_checks(seed=args.seed, scale=args.scale, only=args.only, faults=faults)
    rep = checks.report(results, args.seed, args.scale)
    rows = [(r.criterion, r.name, r.passed) for r in results]
    _emit(args, "json", ("criterion", "name", "passed"), rows, rep)
    for r in results:
        if not r.passed:
            print(f"check failed: {r.criterion} {r.name}", file=sys.stderr)
    return EXIT_OK if rep["passed"] else EXIT_CHECK


def cmd_flow(args) -> int:
    _require(args, "theta")
    if args.samples < 2:
        raise ValidationError("samples must be at least 2")
    pt = symbols.PhasePoint(args.theta, args.phi, args.p_theta, args.p_phi)
    cfg = dynamics.FlowConfig(B=args.B, abs_tol=args.abs_tol, rel_tol=args.rel_tol, t_max=args.t_max)
    times = [args.t_max * k / (args.samples - 1) for k in range(args.samples)]
    traj = dynamics.integrate(pt, cfg, t_eval=times, include_internal=False)
    rows = [(s.t, s.point.theta, s.point.phi, s.point.p_theta, s.point.p_phi, s.energy, s.i2) for s in traj]
    drift_h, drift_i = dynamics.max_drift(traj)
    payload = {"columns": list(io.TRAJECTORY_COLUMNS), "rows": [list(r) for r in rows],
               "max_H_drift": drift_h, "max_I2_drift": drift_i}
    if args.closure:
        res = dynamics.closure_check(pt, cfg)
        payload["closure"] = res._asdict()
        print(f"period={res.period!r} return_error={res.return_error!r}", file=sys.stderr)
    _emit(args, "csv", io.TRAJECTORY_COLUMNS, rows, payload)
    return EXIT_OK


def cmd_torus(args) -> int:
    _require(args, "E", "P")
    t = tori.build_torus(args.E, args.P, args.B)
    summary = t.summary()
    summary["caustics"] = [c.__dict__ for c in tori.caustic_cycles(t)]
    cols = ("E", "P", "B", "Delta1", "z1", "z2", "theta1", "theta2", "J")
    _emit(args, "json", cols, [tuple(summary[c] for c in cols)], summary)
    return EXIT_OK


def cmd_quasimode(args) -> int:
    _require(args, "N", "j")
    if not args.N or any(n < 1 for n in args.N):
        raise ValidationError("N must be >= 1")
    if args.section and len(args.N) != 1:
        raise ValidationError("--section needs a single N")
    rows = []
    for N in args.N:
        level = quantization.make_level(N, args.j)
        k1 = (N + 1) // 2 if args.k1 is None else args.k1
        sec = canonical.almost_eigenfunction(level, k1, n_theta=args.n_theta, n_phi=args.n_phi or 1,
                                             delta_frac=args.delta_frac)
        g, p = canonical.residual_norms(level, sec, shift=args.shift)
        rows.append((N, args.j, k1, g, p))
        if args.section:
            if args.n_phi is None:
                sec = canonical.almost_eigenfunction(level, k1, n_theta=args.n_theta, delta_frac=args.delta_frac)
            io.write_text(io.render_json(sec.to_json()), args.section)
    payload = {"columns": list(io.RESIDUAL_COLUMNS), "rows": [list(r) for r in rows]}
    if len(rows) > 1:
        payload["plateau_slope"] = canonical.loglog_slope([r[0] for r in rows], [r[4] for r in rows])
        payload["global_slope"] = canonical.loglog_slope([r[0] for r in rows], [r[3] for r in rows])
    _emit(args, "csv", io.RESIDUAL_COLUMNS, rows, payload)
    return EXIT_OK


def cmd_holonomy(args) -> int:
    _require(args, "theta")
    bundle = geometry.BundleData(args.B, args.N)
    hol = geometry.holonomy(geometry.LoopPath.latitude(args.theta, n=args.samples), bundle)
    flux = geometry.cap_flux(args.theta, bundle)
    ode = oracles.parallel_transport_holonomy(lambda t: args.theta, lambda t: 2 * math.pi * t,
                                              lambda t: 2 * math.pi, bundle)
    cols = ("theta", "N", "B", "re", "im", "flux", "ode_re", "ode_im")
    row = (args.theta, args.N, args.B, hol.real, hol.imag, flux, ode.real, ode.imag)
    _emit(args, "json", cols, [row], dict(zip(cols, row)))
    return EXIT_OK


COMMANDS = {"spectrum": cmd_spectrum, "verify": cmd_verify, "flow": cmd_flow, "torus": cmd_torus,
            "quasimode": cmd_quasimode, "holonomy": cmd_holonomy}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = resolve(build_parser().parse_args(argv))
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except MonopoleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: build states, audit files, evaluate and sample
densities, and run scenario sweeps.

Exit codes: 0 success, 1 usage error, 2 data error (malformed or
non-normalized files, inadmissible parameter values, below-bound audits in
strict mode), 3 numerical failure (decay guard, truncation, resolution).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

import numpy as np

from . import io
from .audit import audit_report
from .density import (
    FluctuationParams,
    PhasePoint,
    density_eval,
    density_grid,
    extremal_variances,
    normalization_check,
    reduced_box_integral,
    reduced_density,
    reduced_grid,
    sample,
    verify_extremum,
)
from .errors import (
    DecayGuardViolation,
    FileFormatError,
    GridMismatch,
    InvalidRecipe,
    NonPositiveInput,
    NormalizationError,
    NumericalFailure,
    ResolutionError,
    StepTooLarge,
    TruncationError,
    ZeroSeparation,
)
from .scenarios import eigenstate_sweep, relaxation_walk, thermal_sweep
from .states import (
    CoherentState,
    GaussianPacket,
    GridSpec,
    OscillatorEigenstate,
    UnitSystem,
    build_state,
    phase_space_moments,
)

_DATA_ERRORS = (
    FileFormatError,
    NormalizationError,
    InvalidRecipe,
    ZeroSeparation,
    NonPositiveInput,
    StepTooLarge,
    GridMismatch,
    OSError,
)
_NUMERICAL_ERRORS = (DecayGuardViolation, TruncationError, ResolutionError, NumericalFailure)


class _Parser(argparse.ArgumentParser):
    """argparse flavor that exits 1 (not 2) on usage errors and accepts
    dash-leading values like --grid -12:12:1024."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r"^-\d")

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt6(value: float) -> str:
    """Human summary format: 6 significant digits, minimal repr."""
    return str(float(f"{float(value):.6g}"))


def _resolve_units(args) -> UnitSystem:
    if getattr(args, "h", None) is not None:
        return UnitSystem(h=args.h)
    env = os.environ.get("FLUCTLAB_H")
    if env:
        try:
            return UnitSystem(h=float(env))
        except ValueError as exc:
            raise InvalidRecipe(f"FLUCTLAB_H={env!r} is not a number") from exc
    return UnitSystem()


def _parse_grid_flag(text: str) -> GridSpec:
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidRecipe(f"grid must be MIN:MAX:N, got {text!r}")
    try:
        return GridSpec(x_min=float(parts[0]), x_max=float(parts[1]), n=int(parts[2]))
    except ValueError as exc:
        raise InvalidRecipe(f"grid {text!r}: {exc}") from exc


def _parse_axis_flag(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidRecipe(f"axis must be MIN:MAX:N, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InvalidRecipe(f"axis {text!r}: {exc}") from exc
    if n < 2 or hi <= lo:
        raise InvalidRecipe(f"axis {text!r} needs MAX > MIN and N >= 2")
    return np.linspace(lo, hi, n)


def _parse_complex_flag(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise InvalidRecipe(f"complex flag must be RE or RE,IM, got {text!r}")


def _params_from_flags(args, units: UnitSystem) -> FluctuationParams:
    if args.var_x is None or args.var_p is None:
        raise InvalidRecipe("this mode needs --var-x and --var-p")
    return FluctuationParams(
        mean_x=args.mean_x, mean_p=args.mean_p, var_x=args.var_x, var_p=args.var_p, units=units
    )


# --- handlers ----------------------------------------------------------------

def _cmd_state(args) -> int:
    units = _resolve_units(args)
    grid = _parse_grid_flag(args.grid)
    if args.gaussian:
        recipe = GaussianPacket(center=args.center, momentum=args.momentum, sigma=args.sigma)
    elif args.eigenstate is not None:
        recipe = OscillatorEigenstate(n=args.eigenstate, mass=args.mass, omega=args.omega)
    else:
        recipe = CoherentState(alpha=_parse_complex_flag(args.coherent), mass=args.mass, omega=args.omega)
    state = build_state(recipe, grid, units)
    io.save_state(args.out, state, units)
    report = phase_space_moments(state, units)
    print(f"wrote {args.out} (var_x={_fmt6(report.var_x)}, var_p={_fmt6(report.var_p)})")
    return 0


def _cmd_audit(args) -> int:
    target, file_units = io.load_target(args.in_path)
    units = UnitSystem(h=args.h) if args.h is not None else file_units
    report = audit_report(target, units, epsilon=args.epsilon, delta_e=args.delta_e)
    text = json.dumps(report)
    if args.out:
        io.atomic_write_text(args.out, text)
        print(f"wrote {args.out} (classification={report['classification']})")
    else:
        print(text)
    if args.strict and report["classification"] == "below_bound":
        print("error: product below bound in strict mode", file=sys.stderr)
        return 2
    return 0


def _cmd_density_eval(args) -> int:
    units = _resolve_units(args)
    if args.scan_x or args.scan_p:
        if not (args.scan_x and args.scan_p and args.out):
            raise InvalidRecipe("scan mode needs --scan-x, --scan-p, and --out")
        xs = _parse_axis_flag(args.scan_x)
        ps = _parse_axis_flag(args.scan_p)
        if args.reduced:
            values = reduced_grid(args.mean_x, args.mean_p, units, xs, ps)
        else:
            values = density_grid(_params_from_flags(args, units), xs, ps)
        io.write_scan_csv(args.out, xs, ps, values)
        print(f"wrote {args.out} ({xs.size * ps.size} rows)")
        return 0
    if args.x is None or args.p is None:
        raise InvalidRecipe("point mode needs --x and --p")
    pt = PhasePoint(args.x, args.p)
    if args.reduced:
        value = reduced_density(args.mean_x, args.mean_p, pt, units)
    else:
        value = density_eval(_params_from_flags(args, units), pt)
    print(f"f={_fmt6(value)}")
    return 0


def _cmd_density_sample(args) -> int:
    units = _resolve_units(args)
    draws = sample(_params_from_flags(args, units), args.count, args.seed)
    io.write_samples_csv(args.out, draws)
    print(f"wrote {args.out} ({draws.shape[0]} draws)")
    return 0


def _cmd_density_extremize(args) -> int:
    units = _resolve_units(args)
    var_x, var_p = extremal_variances(args.mean_x, args.mean_p, PhasePoint(args.x, args.p), units)
    print(f"var_x={_fmt6(var_x)} var_p={_fmt6(var_p)}")
    return 0


def _cmd_density_verify(args) -> int:
    units = _resolve_units(args)
    check = verify_extremum(
        args.mean_x, args.mean_p, PhasePoint(args.x, args.p), units, fd_step=args.fd_step
    )
    print(
        f"s_star={_fmt6(check.s_star)} first_derivative={check.first_derivative!r} "
        f"second_derivative={check.second_derivative!r} is_max={'true' if check.is_max else 'false'}"
    )
    return 0


def _cmd_density_normcheck(args) -> int:
    units = _resolve_units(args)
    if args.reduced:
        if args.box_half_width is None:
            raise InvalidRecipe("reduced mode needs --box-half-width")
        value = reduced_box_integral(args.mean_x, args.mean_p, units, args.box_half_width)
    else:
        value = normalization_check(_params_from_flags(args, units), args.half_width)
    print(f"integral={value!r}")
    return 0


def _emit_rows(args, rows, to_csv, to_json) -> int:
    text = to_json(rows) if args.format == "json" else to_csv(rows)
    if args.out:
        io.atomic_write_text(args.out, text)
        print(f"wrote {args.out} ({len(rows)} rows)")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return 0


def _cmd_scenario_eigensweep(args) -> int:
    units = _resolve_units(args)
    rows = eigenstate_sweep(
        args.n_max, args.mass, args.omega, _parse_grid_flag(args.grid), units, args.epsilon
    )
    return _emit_rows(args, rows, io.sweep_rows_csv, io.sweep_rows_json)


def _cmd_scenario_thermalsweep(args) -> int:
    units = _resolve_units(args)
    try:
        temperatures = [float(t) for t in args.temperatures.split(",") if t.strip()]
    except ValueError as exc:
        raise InvalidRecipe(f"temperatures {args.temperatures!r}: {exc}") from exc
    if not temperatures:
        raise InvalidRecipe("need at least one temperature")
    rows = thermal_sweep(
        temperatures, args.mass, args.omega, args.n_max, _parse_grid_flag(args.grid), units, args.epsilon
    )
    return _emit_rows(args, rows, io.sweep_rows_csv, io.sweep_rows_json)


def _cmd_scenario_walk(args) -> int:
    units = _resolve_units(args)
    start = FluctuationParams(
        mean_x=args.mean_x, mean_p=args.mean_p, var_x=args.var_x, var_p=args.var_p, units=units
    )
    rows = relaxation_walk(start, args.steps, args.step_size, args.seed, units)
    return _emit_rows(args, rows, io.walk_rows_csv, io.walk_rows_json)


# --- parser ------------------------------------------------------------------

def _units_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument(
        "--h", type=float, default=None,
        help="Planck constant in working units (default: FLUCTLAB_H or 2*pi)",
    )
    return parent


def _add_mean_flags(parser):
    parser.add_argument("--mean-x", type=float, default=0.0)
    parser.add_argument("--mean-p", type=float, default=0.0)


def _add_var_flags(parser, required=False):
    parser.add_argument("--var-x", type=float, required=required, default=None)
    parser.add_argument("--var-p", type=float, required=required, default=None)


def build_parser() -> argparse.ArgumentParser:
    units = _units_parent()
    parser = _Parser(prog="fluctlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    state = sub.add_parser("state", parents=[units], help="build a pure state and write it as JSON")
    recipe = state.add_mutually_exclusive_group(required=True)
    recipe.add_argument("--gaussian", action="store_true", help="Gaussian packet recipe")
    recipe.add_argument("--eigenstate", type=int, metavar="N", help="oscillator level N")
    recipe.add_argument("--coherent", metavar="RE[,IM]", help="coherent state amplitude")
    state.add_argument("--center", type=float, default=0.0)
    state.add_argument("--momentum", type=float, default=0.0)
    state.add_argument("--sigma", type=float, default=1.0)
    state.add_argument("--mass", type=float, default=1.0)
    state.add_argument("--omega", type=float, default=1.0)
    state.add_argument("--grid", required=True, metavar="MIN:MAX:N")
    state.add_argument("--out", required=True)
    state.set_defaults(handler=_cmd_state)

    audit = sub.add_parser("audit", parents=[units], help="audit a state or ensemble file")
    audit.add_argument("--in", dest="in_path", required=True, metavar="FILE")
    audit.add_argument("--epsilon", type=float, default=1e-6)
    audit.add_argument("--delta-e", type=float, default=None,
                       help="energy spread used to fill delta_t in the report")
    audit.add_argument("--strict", action="store_true", help="exit 2 on a below-bound product")
    audit.add_argument("--out", default=None)
    audit.set_defaults(handler=_cmd_audit)

    density = sub.add_parser("density", help="fluctuation-density operations")
    dsub = density.add_subparsers(dest="density_command", required=True, parser_class=_Parser)

    d_eval = dsub.add_parser("eval", parents=[units], help="evaluate the density at a point or on a mesh")
    _add_mean_flags(d_eval)
    _add_var_flags(d_eval)
    d_eval.add_argument("--x", type=float, default=None)
    d_eval.add_argument("--p", type=float, default=None)
    d_eval.add_argument("--reduced", action="store_true", help="use the reduced closed form")
    d_eval.add_argument("--scan-x", metavar="MIN:MAX:N", default=None)
    d_eval.add_argument("--scan-p", metavar="MIN:MAX:N", default=None)
    d_eval.add_argument("--out", default=None, help="CSV destination for scan mode")
    d_eval.set_defaults(handler=_cmd_density_eval)

    d_sample = dsub.add_parser("sample", parents=[units], help="draw seeded samples to CSV")
    _add_mean_flags(d_sample)
    _add_var_flags(d_sample, required=True)
    d_sample.add_argument("--count", type=int, required=True)
    d_sample.add_argument("--seed", type=int, required=True)
    d_sample.add_argument("--out", required=True)
    d_sample.set_defaults(handler=_cmd_density_sample)

    d_ext = dsub.add_parser("extremize", parents=[units], help="extremal variance pair at a phase point")
    _add_mean_flags(d_ext)
    d_ext.add_argument("--x", type=float, required=True)
    d_ext.add_argument("--p", type=float, required=True)
    d_ext.set_defaults(handler=_cmd_density_extremize)

    d_verify = dsub.add_parser("verify", parents=[units], help="finite-difference extremum check")
    _add_mean_flags(d_verify)
    d_verify.add_argument("--x", type=float, required=True)
    d_verify.add_argument("--p", type=float, required=True)
    d_verify.add_argument("--fd-step", type=float, default=1e-4)
    d_verify.set_defaults(handler=_cmd_density_verify)

    d_norm = dsub.add_parser("normcheck", parents=[units], help="quadrature of the density")
    _add_mean_flags(d_norm)
    _add_var_flags(d_norm)
    d_norm.add_argument("--half-width", type=float, default=10.0,
                        help="integration half-width in spreads per axis")
    d_norm.add_argument("--reduced", action="store_true", help="box-integrate the reduced density")
    d_norm.add_argument("--box-half-width", type=float, default=None)
    d_norm.set_defaults(handler=_cmd_density_normcheck)

    scenario = sub.add_parser("scenario", help="sweeps and the relaxation walk")
    ssub = scenario.add_subparsers(dest="scenario_command", required=True, parser_class=_Parser)

    eig = ssub.add_parser("eigensweep", parents=[units], help="oscillator level sweep")
    eig.add_argument("--n-max", type=int, required=True)
    eig.add_argument("--mass", type=float, default=1.0)
    eig.add_argument("--omega", type=float, default=1.0)
    eig.add_argument("--grid", required=True, metavar="MIN:MAX:N")
    eig.add_argument("--epsilon", type=float, default=1e-6)
    eig.add_argument("--out", default=None)
    eig.add_argument("--format", choices=("csv", "json"), default="csv")
    eig.set_defaults(handler=_cmd_scenario_eigensweep)

    thermal = ssub.add_parser("thermalsweep", parents=[units], help="Boltzmann mixture sweep")
    thermal.add_argument("--temperatures", required=True, metavar="T1,T2,...")
    thermal.add_argument("--mass", type=float, default=1.0)
    thermal.add_argument("--omega", type=float, default=1.0)
    thermal.add_argument("--n-max", type=int, required=True)
    thermal.add_argument("--grid", required=True, metavar="MIN:MAX:N")
    thermal.add_argument("--epsilon", type=float, default=1e-6)
    thermal.add_argument("--out", default=None)
    thermal.add_argument("--format", choices=("csv", "json"), default="csv")
    thermal.set_defaults(handler=_cmd_scenario_thermalsweep)

    walk = ssub.add_parser("walk", parents=[units], help="seeded contraction toward the bound")
    _add_mean_flags(walk)
    _add_var_flags(walk, required=True)
    walk.add_argument("--steps", type=int, required=True)
    walk.add_argument("--step-size", type=float, required=True)
    walk.add_argument("--seed", type=int, required=True)
    walk.add_argument("--out", default=None)
    walk.add_argument("--format", choices=("csv", "json"), default="csv")
    walk.set_defaults(handler=_cmd_scenario_walk)

    return parser


def run(argv=None) -> int:
    """Parse argv and execute; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.handler(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

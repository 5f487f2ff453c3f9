"""Command-line front end.

Verbs: sweep, fit-spectrum, fit-mode, fit-two-modes, fit-dispersive,
fit-lorentzian, oracle-compare, reproduce, thermal.  All diagnostics go
to standard error; numeric results go to files under ``--out-dir``.
Frequencies on the command line and in output files are cyclic (Hz);
``--degrees`` converts printed phases only.  Exit status: 0 success,
1 validation error, 2 fit non-convergence.
"""

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import lindblad
from .config import ConfigMap, parse_config_file, parse_quantity
from .constants import TWO_PI
from .core import QubitParams, ResonatorMode, bare_coupling, thermal_photon_number
from .errors import FitError, FluxcavError, TraceFormatError, ValidationError
from .fitting import (
    FitResult,
    ModeFitSetup,
    detect_crossings,
    fit_dispersive,
    fit_lorentzian,
    fit_resonant_mode,
    fit_spectrum,
    fit_two_modes,
)
from .scenarios import SCENARIO_NAMES, run_scenario
from .semiclassical import phase_shift_resonant
from .sweep import (
    DEFAULT_GEOMETRY,
    DEFAULT_KAPPA_HZ,
    DEFAULT_OMEGA_HZ,
    GroupSpec,
    run_sweep,
    sweep_config_from_map,
)
from .trace import export_trace, format_float, import_trace

log = logging.getLogger("fluxcav")

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    """Argument errors exit with status 1 (2 is reserved for fit failures)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _quantity(text: str) -> float:
    try:
        return parse_quantity(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    shared = _Parser(add_help=False)
    shared.add_argument("--config", type=Path, help="configuration file")
    shared.add_argument("--seed", type=int, help="noise seed override")
    shared.add_argument(
        "--out-dir", type=Path, default=Path("fluxcav_out"), help="output directory"
    )
    shared.add_argument(
        "--degrees", action="store_true", help="print phases in degrees"
    )

    parser = _Parser(
        prog="fluxcav",
        description="Flux-qubit-loaded cavity: sweeps, fits, and checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[shared], help="generate flux-sweep traces")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "fit-spectrum",
        parents=[shared],
        help="fit the qubit spectrum through crossings of several traces",
    )
    p.add_argument("traces", nargs="+", type=Path)
    p.set_defaults(func=cmd_fit_spectrum)

    p = sub.add_parser(
        "fit-mode", parents=[shared], help="fit count/dephasing at a resonant crossing"
    )
    p.add_argument("trace", type=Path)
    _add_fixed_qubit_args(p)
    p.add_argument(
        "--free",
        choices=("count", "coupling", "gamma"),
        default="count",
        help="which parameters to fit",
    )
    p.add_argument("--count", type=int, default=1, help="fixed qubit count")
    p.add_argument(
        "--gamma-phi", type=_quantity, help="pin the dephasing rate (cyclic Hz)"
    )
    p.add_argument("--n-max", type=int, default=40, help="count grid upper bound")
    p.set_defaults(func=cmd_fit_mode)

    p = sub.add_parser(
        "fit-two-modes",
        parents=[shared],
        help="joint fit of two qubit groups crossing one mode",
    )
    p.add_argument("trace", type=Path)
    p.add_argument("--group-a", help="config group for the first ensemble")
    p.add_argument("--group-b", help="config group for the second ensemble")
    p.add_argument("--n-max", type=int, default=10)
    p.set_defaults(func=cmd_fit_two_modes)

    p = sub.add_parser(
        "fit-dispersive",
        parents=[shared],
        help="fit count or coupling to a dispersive phase dip",
    )
    p.add_argument("trace", type=Path)
    _add_fixed_qubit_args(p)
    p.add_argument("--free", choices=("count", "coupling"), default="count")
    p.add_argument("--count", type=int, help="fixed count when fitting the coupling")
    p.add_argument("--n-max", type=int, default=40)
    p.set_defaults(func=cmd_fit_dispersive)

    p = sub.add_parser(
        "fit-lorentzian", parents=[shared], help="fit a transmission lineshape"
    )
    p.add_argument("lineshape", type=Path, help="CSV with freq_hz,amplitude")
    p.set_defaults(func=cmd_fit_lorentzian)

    p = sub.add_parser(
        "oracle-compare",
        parents=[shared],
        help="compare the full quantum steady state against the closed form",
    )
    p.add_argument("--count", type=int, default=1, help="number of qubits")
    p.add_argument("--points", type=int, default=41, help="detuning grid size")
    p.add_argument("--cutoff", type=int, default=6, help="photon cutoff")
    p.add_argument("--drive-ratio", type=float, default=0.05)
    p.add_argument(
        "--g-eps",
        type=_quantity,
        default=4.9e6 * 3.0 / 7.77,
        help="transversal coupling, cyclic Hz",
    )
    p.add_argument(
        "--gamma-phi", type=_quantity, default=141e6, help="dephasing, cyclic Hz"
    )
    p.add_argument(
        "--kappa", type=_quantity, default=0.46e6, help="mode linewidth, cyclic Hz"
    )
    p.add_argument(
        "--span", type=_quantity, default=600e6, help="half detuning span, cyclic Hz"
    )
    p.set_defaults(func=cmd_oracle_compare)

    p = sub.add_parser(
        "reproduce", parents=[shared], help="run a built-in round-trip scenario"
    )
    p.add_argument("scenario", choices=SCENARIO_NAMES)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser(
        "thermal", parents=[shared], help="thermal photon occupancy per mode"
    )
    p.add_argument(
        "--temperature", type=_quantity, default=0.020, help="bath temperature (K)"
    )
    p.set_defaults(func=cmd_thermal)

    return parser


def _add_fixed_qubit_args(p) -> None:
    p.add_argument("--group", help="config group supplying the fixed qubit parameters")
    p.add_argument("--delta", type=_quantity, help="qubit gap, cyclic Hz")
    p.add_argument("--current", type=_quantity, help="persistent current, A")
    p.add_argument("--g-bare", type=_quantity, help="bare coupling, cyclic Hz")


def _out_dir(args) -> Path:
    args.out_dir.mkdir(parents=True, exist_ok=True)
    return args.out_dir


def _load_config(args) -> ConfigMap | None:
    if args.config is None:
        return None
    return parse_config_file(args.config)


def _write_lines(path: Path, lines) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    log.info("wrote %s", path)


_CYCLIC_NAMES = {
    "delta",
    "gamma_phi",
    "gamma_phi_a",
    "gamma_phi_b",
    "g_bare",
    "center",
    "width",
}


def _result_lines(fit: FitResult) -> list[str]:
    lines = []
    for name, value, unc in zip(fit.names, fit.params, fit.uncertainties):
        if name.startswith("count"):
            lines.append(f"{name} = {int(round(value))}")
            continue
        if name in _CYCLIC_NAMES:
            lines.append(f"{name}_hz = {format_float(value / TWO_PI)}")
            lines.append(f"{name}_unc_hz = {format_float(unc / TWO_PI)}")
        else:
            lines.append(f"{name} = {format_float(value)}")
            lines.append(f"{name}_unc = {format_float(unc)}")
    lines.append(f"residual_norm = {format_float(fit.residual_norm)}")
    lines.append(f"iterations = {fit.iterations}")
    lines.append(f"converged = {str(fit.converged).lower()}")
    lines.append(f"flags = {','.join(fit.flags)}")
    return lines


def _log_result(fit: FitResult) -> None:
    for line in _result_lines(fit):
        log.info("%s", line)


def _phase_text(rad: float, degrees: bool) -> str:
    if degrees:
        return f"{math.degrees(rad):.6g} deg"
    return f"{rad:.6g} rad"


def _setup_from_args(args, trace) -> ModeFitSetup:
    """Fixed qubit parameters from a config group, overridden by flags."""
    mode = ResonatorMode(
        index=max(trace.mode_index, 1), omega=trace.omega, kappa=trace.kappa
    )
    delta = current = g_bare = None
    geometry = DEFAULT_GEOMETRY
    cfg = _load_config(args)
    if cfg is not None and args.group is not None:
        config = sweep_config_from_map(cfg)
        spec = _pick_group(config.groups, args.group)
        delta, current = spec.delta, spec.current
        geometry = config.geometry
        g_bare = spec.overrides.get(trace.mode_index)
    if args.delta is not None:
        delta = TWO_PI * args.delta
    if args.current is not None:
        current = args.current
    if args.g_bare is not None:
        g_bare = TWO_PI * args.g_bare
    if delta is None or current is None:
        raise ValidationError(
            "qubit gap and current are required (--delta/--current or "
            "--config with --group)"
        )
    if g_bare is None:
        # bare_coupling only reads the persistent current; the dephasing
        # entry of this probe object is never used
        probe = QubitParams(
            delta=delta, persistent_current=current, gamma_phi=1.0, label="fixed"
        )
        g_bare = bare_coupling(geometry, probe, mode)
    return ModeFitSetup(mode=mode, delta=delta, current=current, g_bare=g_bare)


def _pick_group(groups: tuple[GroupSpec, ...], name: str) -> GroupSpec:
    for spec in groups:
        if spec.name == name:
            return spec
    raise ValidationError(f"config defines no group named {name!r}")


# ---------------------------------------------------------------------------
# verbs


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    if cfg is None:
        raise ValidationError("sweep requires --config")
    config = sweep_config_from_map(cfg, seed=args.seed)
    out = _out_dir(args)
    traces = run_sweep(config)
    for j, trace in sorted(traces.items()):
        path = out / f"trace_mode{j}.csv"
        export_trace(trace, path)
        log.info("wrote %s (%d points)", path, trace.size)
    return 0


def cmd_fit_spectrum(args) -> int:
    points = []
    for path in args.traces:
        trace = import_trace(path)
        found = detect_crossings(trace)
        log.info(
            "%s: %d crossing(s) at %s",
            path,
            len(found),
            ", ".join(f"{c.flux.value:+.6g}" for c in found),
        )
        points.extend(found)
    fit = fit_spectrum(points)
    out = _out_dir(args)
    lines = [
        f"delta_hz = {format_float(fit.value('delta') / TWO_PI)}",
        f"delta_unc_hz = {format_float(fit.uncertainty('delta') / TWO_PI)}",
        f"current_a = {format_float(fit.value('current'))}",
        f"current_unc_a = {format_float(fit.uncertainty('current'))}",
        f"residual_norm = {format_float(fit.residual_norm)}",
        f"iterations = {fit.iterations}",
        f"converged = {str(fit.converged).lower()}",
    ]
    _write_lines(out / "fit_spectrum_result.txt", lines)
    for line in lines:
        log.info("%s", line)
    return 0


def cmd_fit_mode(args) -> int:
    trace = import_trace(args.trace)
    setup = _setup_from_args(args, trace)
    gamma_phi = None if args.gamma_phi is None else TWO_PI * args.gamma_phi
    fit = fit_resonant_mode(
        trace,
        setup,
        free=args.free,
        count=args.count,
        gamma_phi=gamma_phi,
        n_max=args.n_max,
    )
    out = _out_dir(args)
    _write_lines(out / "fit_mode_result.txt", _result_lines(fit))
    _log_result(fit)
    return 0


def cmd_fit_two_modes(args) -> int:
    cfg = _load_config(args)
    if cfg is None:
        raise ValidationError("fit-two-modes requires --config with two groups")
    trace = import_trace(args.trace)
    config = sweep_config_from_map(cfg)
    if len(config.groups) < 2 and (args.group_a is None or args.group_b is None):
        raise ValidationError("config must define two qubit groups")
    name_a = args.group_a or config.groups[0].name
    name_b = args.group_b or config.groups[1].name
    mode = ResonatorMode(
        index=max(trace.mode_index, 1), omega=trace.omega, kappa=trace.kappa
    )

    def setup(name):
        spec = _pick_group(config.groups, name)
        g = spec.overrides.get(trace.mode_index)
        if g is None:
            g = bare_coupling(config.geometry, spec.qubit(), mode)
        return ModeFitSetup(
            mode=mode, delta=spec.delta, current=spec.current, g_bare=g
        )

    fit = fit_two_modes(trace, setup(name_a), setup(name_b), n_max=args.n_max)
    out = _out_dir(args)
    _write_lines(out / "fit_two_modes_result.txt", _result_lines(fit))
    _log_result(fit)
    return 0


def cmd_fit_dispersive(args) -> int:
    trace = import_trace(args.trace)
    setup = _setup_from_args(args, trace)
    fit = fit_dispersive(
        trace, setup, free=args.free, count=args.count, n_max=args.n_max
    )
    out = _out_dir(args)
    _write_lines(out / "fit_dispersive_result.txt", _result_lines(fit))
    _log_result(fit)
    return 0


def _read_lineshape(path: Path):
    freqs = []
    amps = []
    header_seen = False
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                if line != "freq_hz,amplitude":
                    raise TraceFormatError(
                        f"{path}:{lineno}: expected header 'freq_hz,amplitude'"
                    )
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise TraceFormatError(
                    f"{path}:{lineno}: expected 2 fields, got {len(parts)}"
                )
            try:
                freqs.append(float(parts[0]))
                amps.append(float(parts[1]))
            except ValueError:
                raise TraceFormatError(
                    f"{path}:{lineno}: non-numeric field in {line!r}"
                ) from None
    if not freqs:
        raise TraceFormatError(f"{path}: no data rows")
    return np.asarray(freqs), np.asarray(amps)


def cmd_fit_lorentzian(args) -> int:
    freqs_hz, amps = _read_lineshape(args.lineshape)
    fit = fit_lorentzian(TWO_PI * freqs_hz, amps)
    out = _out_dir(args)
    lines = [
        f"center_hz = {format_float(fit.value('center') / TWO_PI)}",
        f"fwhm_hz = {format_float(fit.value('width') / TWO_PI)}",
        f"fwhm_unc_hz = {format_float(fit.uncertainty('width') / TWO_PI)}",
        f"height = {format_float(fit.value('height'))}",
        f"baseline = {format_float(fit.value('baseline'))}",
        f"residual_norm = {format_float(fit.residual_norm)}",
        f"converged = {str(fit.converged).lower()}",
    ]
    _write_lines(out / "fit_lorentzian_result.txt", lines)
    for line in lines:
        log.info("%s", line)
    return 0


def cmd_oracle_compare(args) -> int:
    g_eps = TWO_PI * args.g_eps
    gamma_phi = TWO_PI * args.gamma_phi
    kappa = TWO_PI * args.kappa
    span = TWO_PI * args.span
    drive = args.drive_ratio * kappa
    n = args.count
    detunings = np.linspace(-span, span, args.points)
    rows = ["detuning_hz,phase_quantum_rad,phase_semiclassical_rad"]
    worst = 0.0
    for delta in detunings:
        model = lindblad.QuantumModel(
            photon_cutoff=args.cutoff,
            detunings=(delta,) * n,
            couplings=(g_eps,) * n,
            gamma_phi=(gamma_phi,) * n,
            gamma_1=(gamma_phi,) * n,
            kappa=kappa,
            drive=drive,
        )
        quantum = lindblad.phase_shift(model)
        closed = phase_shift_resonant(n, g_eps, gamma_phi, kappa, delta)
        worst = max(worst, abs(quantum - closed))
        rows.append(
            f"{format_float(delta / TWO_PI)},{format_float(quantum)},"
            f"{format_float(closed)}"
        )
    out = _out_dir(args)
    _write_lines(out / "oracle_compare.csv", rows)
    log.info(
        "max |quantum - closed form| = %s over %d detunings",
        _phase_text(worst, args.degrees),
        args.points,
    )
    return 0


def cmd_reproduce(args) -> int:
    report = run_scenario(args.scenario, seed=args.seed)
    out = _out_dir(args)
    for j, trace in sorted(report.traces.items()):
        path = out / f"trace_{args.scenario}_mode{j}.csv"
        export_trace(trace, path)
        log.info("wrote %s", path)
    lines = report.render()
    _write_lines(out / f"report_{args.scenario}.txt", lines)
    for line in lines:
        log.info("%s", line)
    return 0


def cmd_thermal(args) -> int:
    temperature = args.temperature
    cfg = _load_config(args)
    if cfg is not None:
        config = sweep_config_from_map(cfg, seed=args.seed)
        modes = [config.mode(j) for j in sorted(config.resonator)]
    else:
        modes = [
            ResonatorMode(
                index=j,
                omega=TWO_PI * DEFAULT_OMEGA_HZ[j],
                kappa=TWO_PI * DEFAULT_KAPPA_HZ[j],
            )
            for j in sorted(DEFAULT_OMEGA_HZ)
        ]
    lines = [f"temperature_k = {format_float(temperature)}"]
    for mode in modes:
        occ = thermal_photon_number(mode, temperature)
        lines.append(
            f"mode{mode.index}_omega_hz = {format_float(mode.omega / TWO_PI)}"
        )
        lines.append(f"mode{mode.index}_n_th = {format_float(occ)}")
    out = _out_dir(args)
    _write_lines(out / "thermal.txt", lines)
    for line in lines:
        log.info("%s", line)
    return 0


def main(argv=None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s"
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except FitError as exc:
        log.error("fit failed: %s", exc)
        return 2
    except FluxcavError as exc:
        log.error("%s", exc)
        return 1
    except OSError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: spectra, sweep maps, mode tables, derived
parameters, spectrum fits, and scaling-law fits, all driven by a single
configuration file and emitting CSV.

Exit codes: 0 success, 2 configuration error, 3 numeric domain error,
4 fit non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__, derived, fitting, magnetostatics, scattering
from .config import RunConfig, load_config
from .errors import ConfigError, DomainError
from .model import HybridSystem

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_NO_CONVERGENCE = 4


def _fmt(value) -> str:
    return format(float(value), ".17g")


@contextmanager
def _open_output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            yield handle


def _apply_beta_db(system: HybridSystem, beta_db: float | None) -> HybridSystem:
    if beta_db is None:
        return system
    beta = 10.0 ** (beta_db / 10.0)
    return fitting.apply_params(system, {f"beta.{m.label}": beta for m in system.modes})


def _single_field(config: RunConfig) -> float:
    if config.field_grid is None:
        if any(m.field_map.kind != "fixed" for m in config.system.modes):
            raise ConfigError("field-mapped modes need sweep.field (a single point for `spectrum`)")
        return 0.0
    values = config.field_grid.values()
    if values.size != 1:
        raise ConfigError("this command needs a single bias field (sweep.field.count == 1); use `map` for sweeps")
    return float(values[0])


def _frequency_grid(config: RunConfig) -> np.ndarray:
    if config.frequency_grid is None:
        raise ConfigError("config must provide sweep.frequency")
    return config.frequency_grid.values()


def cmd_spectrum(args) -> int:
    config = load_config(args.config)
    system = _apply_beta_db(config.system, args.beta_db)
    B = _single_field(config)
    f = _frequency_grid(config)

    columns: dict[str, np.ndarray] = {"f_hz": f}
    for name, values in (("s21", scattering.s21(f, system, B)), ("s11", scattering.s11(f, system, B))):
        values = np.atleast_1d(values)
        columns[f"re_{name}"] = values.real
        columns[f"im_{name}"] = values.imag
        columns[f"abs2_{name}"] = np.abs(values) ** 2
        columns[f"arg_{name}"] = scattering.principal_phase(values)
    eta = np.zeros_like(f)
    for mode in system.modes:
        values = np.atleast_1d(scattering.s31_mode(f, system, B, mode.label))
        columns[f"re_s31_{mode.label}"] = values.real
        columns[f"im_s31_{mode.label}"] = values.imag
        columns[f"abs2_s31_{mode.label}"] = np.abs(values) ** 2
        columns[f"arg_s31_{mode.label}"] = scattering.principal_phase(values)
        eta = eta + np.abs(values) ** 2
    columns["eta"] = eta

    if args.unwrap:
        for name in columns:
            if name.startswith("arg_"):
                columns[name] = np.unwrap(columns[name])

    with _open_output(args.out) as handle:
        writer = csv.writer(handle)
        writer.writerow(columns.keys())
        for k in range(f.size):
            writer.writerow(_fmt(columns[name][k]) for name in columns)
    return EXIT_OK


def cmd_map(args) -> int:
    config = load_config(args.config)
    system = _apply_beta_db(config.system, args.beta_db)
    if config.field_grid is None:
        raise ConfigError("config must provide sweep.field")
    sweep = scattering.sweep_map(
        system, config.field_grid.values(), _frequency_grid(config), config.observable
    )
    values = sweep.values
    if args.unwrap and config.observable.endswith("_phase"):
        values = np.unwrap(values, axis=1)

    with _open_output(args.out) as handle:
        writer = csv.writer(handle)
        writer.writerow(["B_T", "f_hz", "value"])
        for k, B in enumerate(sweep.fields):
            for l, f in enumerate(sweep.frequencies):
                writer.writerow([_fmt(B), _fmt(f), _fmt(values[k, l])])
    return EXIT_OK


def _closed_form(i: int, j: int, B: float, material) -> float | None:
    if (i, j) == (2, 0):
        return magnetostatics.msm20_frequency(B, material)
    if j >= 1 and i in (j, j + 1):
        q = magnetostatics.WalkerModeQuery(i=i, j=j, B_ext=B)
        return magnetostatics.msm_frequency_linear(q, material)
    return None


def cmd_modes(args) -> int:
    config = load_config(args.config)
    if config.modes_table is None:
        raise ConfigError("config must provide a modes_table section")
    spec = config.modes_table
    material = config.system.material

    with _open_output(args.out) as handle:
        writer = csv.writer(handle)
        writer.writerow(["B_T", "i", "j", "sign_branch", "f_closed_hz", "f_solver_hz", "rel_diff"])
        for B in spec.field_grid.values():
            for (i, j) in spec.indices:
                closed = _closed_form(i, j, B, material)
                q = magnetostatics.WalkerModeQuery(i=i, j=j, B_ext=float(B), sign_branch=spec.sign_branch)
                if closed is None:
                    window = None
                else:
                    half = 0.03 * material.gamma_e * material.mu0_Ms
                    window = (closed - half, closed + half)
                root = magnetostatics.solve_walker_mode(q, material, window)
                rel = "" if closed is None else _fmt(abs(root - closed) / closed)
                writer.writerow(
                    [_fmt(B), i, j, spec.sign_branch, "" if closed is None else _fmt(closed), _fmt(root), rel]
                )
    return EXIT_OK


_DERIVED_FIELDS = ("g_B", "N", "C", "V_m", "n", "G", "delta")


def cmd_derive(args) -> int:
    config = load_config(args.config)
    if config.derive is None:
        raise ConfigError("config must provide a derive section")
    spec = config.derive
    system = config.system
    if not system.modes:
        raise ConfigError("derive needs at least one mode with measured g and gamma")

    with _open_output(args.out) as handle:
        writer = csv.writer(handle)
        writer.writerow(["mode", "quantity", "derived", "reference", "rel_dev"])
        for mode in system.modes:
            params = derived.derive_mode_params(
                g=mode.g,
                gamma=mode.gamma,
                cavity=system.cavity,
                material=system.material,
                optical=system.optical,
                V_c=spec.cavity_volume,
                g_B=spec.g_B,
            )
            reference = spec.reference.get(mode.label, {})
            for name in _DERIVED_FIELDS:
                value = getattr(params, name)
                if name in reference:
                    ref = float(reference[name])
                    dev = abs(value - ref) / abs(ref) if ref != 0 else math.inf
                    writer.writerow([mode.label, name, _fmt(value), _fmt(ref), _fmt(dev)])
                else:
                    writer.writerow([mode.label, name, _fmt(value), "", ""])
    return EXIT_OK


def _read_spectrum_csv(path: str, observable: str) -> scattering.ComplexSpectrum:
    field, _, label = observable.partition(".")
    column = field if field in ("s21", "s11") else f"s31_{label}"
    frequencies, values = [], []
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            required = {"f_hz", f"re_{column}", f"im_{column}"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise ConfigError(f"data file {path} lacks columns {sorted(required)}")
            for row in reader:
                frequencies.append(float(row["f_hz"]))
                values.append(complex(float(row[f"re_{column}"]), float(row[f"im_{column}"])))
    except OSError as exc:
        raise ConfigError(f"cannot read data file {path}: {exc}") from None
    if not frequencies:
        raise ConfigError(f"data file {path} contains no rows")
    return scattering.ComplexSpectrum(np.array(frequencies), np.array(values))


def cmd_fit(args) -> int:
    config = load_config(args.config)
    if config.fit is None:
        raise ConfigError("config must provide a fit section")
    spec = config.fit
    observed = _read_spectrum_csv(args.data, spec.observable)
    problem = fitting.FitProblem(
        observed=observed,
        system=config.system,
        free=spec.free,
        B=spec.B,
        observable=spec.observable,
        loss=spec.loss,
    )
    init = {name: _template_value(config.system, name, spec.B) for name in spec.free}
    result = fitting.fit_spectrum(problem, init)

    with _open_output(args.out) as handle:
        writer = csv.writer(handle)
        writer.writerow(["kind", "name", "value"])
        for name in sorted(result.estimates):
            writer.writerow(["estimate", name, _fmt(result.estimates[name])])
        writer.writerow(["stat", "rms_residual", _fmt(result.rms_residual)])
        writer.writerow(["stat", "iterations", str(result.iterations)])
        writer.writerow(["stat", "converged", str(result.converged).lower()])
        writer.writerow(["stat", "jacobian_condition_estimate", _fmt(result.jacobian_condition_estimate)])
        writer.writerow(["stat", "loss", result.loss])
        for k, rms in enumerate(result.residual_trace):
            writer.writerow(["trace", str(k), _fmt(rms)])
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def _template_value(system: HybridSystem, name: str, B: float) -> float:
    field, _, label = name.partition(".")
    if not label:
        return getattr(system.cavity, field)
    mode = system.mode(label)
    if field == "f_m":
        return magnetostatics.mode_frequency(mode.field_map, B, system.material)
    return getattr(mode, field)


def _read_points_csv(path: str):
    points, include = [], []
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None or not {"diameter_m", "value"}.issubset(reader.fieldnames):
                raise ConfigError(f"points file {path} must have columns diameter_m,value[,include]")
            has_include = "include" in reader.fieldnames
            for row in reader:
                points.append((float(row["diameter_m"]), float(row["value"])))
                include.append(bool(int(row["include"])) if has_include else True)
    except OSError as exc:
        raise ConfigError(f"cannot read points file {path}: {exc}") from None
    if not points:
        raise ConfigError(f"points file {path} contains no rows")
    return points, include


def cmd_scaling(args) -> int:
    config = load_config(args.config)
    if config.scaling is None:
        raise ConfigError("config must provide a scaling section")
    points, include = _read_points_csv(args.data)
    if config.scaling.include is not None:
        if len(config.scaling.include) != len(points):
            raise ConfigError("scaling.include length must match the number of points")
        include = list(config.scaling.include)
    try:
        result = derived.fit_scaling_laws(points, config.scaling.model, include)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    with _open_output(args.out) as handle:
        writer = csv.writer(handle)
        writer.writerow(["kind", "name", "value"])
        writer.writerow(["fit", "model", result.model])
        for k, coefficient in enumerate(result.coefficients):
            writer.writerow(["fit", f"c{k}", _fmt(coefficient)])
        writer.writerow(["fit", "rms_residual", _fmt(result.rms_residual)])
        for k, ((diameter, value), used) in enumerate(zip(points, result.included_points)):
            writer.writerow(["point", f"included_{k}", str(int(used))])
            writer.writerow(["point", f"predicted_{k}", _fmt(result.predict(diameter))])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magnoncavity",
        description="Magnon-cavity hybrid system spectra, mode tables, and parameter extraction.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str, data: bool = False, sweep_flags: bool = False):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="path to the YAML configuration file")
        p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
        if data:
            p.add_argument("--data", required=True, help="input data CSV path")
        if sweep_flags:
            p.add_argument("--unwrap", action="store_true", help="unwrap phase columns along frequency")
            p.add_argument(
                "--beta-db",
                type=float,
                default=None,
                dest="beta_db",
                help="set every mode's amplification factor to 10^(x/10)",
            )
        p.set_defaults(func=func)
        return p

    add("spectrum", cmd_spectrum, "frequency cross-section of all S-parameters at one bias field", sweep_flags=True)
    add("map", cmd_map, "2D (field x frequency) map of one observable, long CSV format", sweep_flags=True)
    add("modes", cmd_modes, "Walker mode frequency table: closed forms vs. characteristic-equation solver")
    add("derive", cmd_derive, "derived parameter report (spin counts, densities, optical coupling, ...)")
    add("fit", cmd_fit, "extract system parameters from a measured spectrum CSV", data=True)
    add("scaling", cmd_scaling, "fit a size-scaling law to (diameter, value) points", data=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"numeric domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConfigError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

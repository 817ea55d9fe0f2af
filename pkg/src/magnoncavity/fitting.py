"""Spectrum synthesis and resonance-parameter extraction.

Replaces by-hand lineshape fitting with a damped (Levenberg-Marquardt
style) least-squares loop over named system parameters. Strictly positive
parameters are fitted in log space so positivity never needs active bound
handling; bounds act as a validity box checked on the way in and out.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import scattering
from .model import FieldMap, HybridSystem
from .scattering import ComplexSpectrum

MAX_ITERATIONS = 200
GRADIENT_RTOL = 1e-10
JACOBIAN_REL_STEP = 1e-6

_CAVITY_PARAMS = ("f_c", "kappa_e", "kappa_i")
_MODE_PARAMS = ("g", "gamma", "f_m", "delta", "beta")
# rate-like parameters are strictly positive and fitted as log values
_LOG_FIELDS = {"kappa_e", "kappa_i", "g", "gamma", "delta", "beta"}

LOSSES = ("complex_residual", "power_and_phase_residual")


def _split_name(name: str) -> tuple[str, str | None]:
    field, _, label = name.partition(".")
    return field, (label or None)


def _validate_name(name: str, system: HybridSystem) -> None:
    field, label = _split_name(name)
    if label is None:
        if field not in _CAVITY_PARAMS:
            raise ValueError(f"unknown cavity parameter {name!r}")
    else:
        if field not in _MODE_PARAMS:
            raise ValueError(f"unknown mode parameter {name!r}")
        system.mode(label)  # raises KeyError for unknown labels


def apply_params(system: HybridSystem, values: dict[str, float]) -> HybridSystem:
    """Return a copy of ``system`` with the named parameters replaced.

    Cavity parameters are addressed as ``f_c``, ``kappa_e``, ``kappa_i``;
    mode parameters as ``<field>.<label>``, e.g. ``g.kittel``. Setting
    ``f_m.<label>`` pins that mode to a fixed frequency.
    """
    cavity_updates: dict[str, float] = {}
    mode_updates: dict[str, dict[str, float]] = {}
    for name, value in values.items():
        _validate_name(name, system)
        field, label = _split_name(name)
        if label is None:
            cavity_updates[field] = float(value)
        else:
            mode_updates.setdefault(label, {})[field] = float(value)

    cavity = dataclasses.replace(system.cavity, **cavity_updates) if cavity_updates else system.cavity
    modes = []
    for mode in system.modes:
        updates = mode_updates.get(mode.label, {})
        if "f_m" in updates:
            f_m = updates.pop("f_m")
            mode = dataclasses.replace(mode, field_map=FieldMap(kind="fixed", frequency=f_m))
        if updates:
            mode = dataclasses.replace(mode, **updates)
        modes.append(mode)
    return dataclasses.replace(system, cavity=cavity, modes=tuple(modes))


@dataclass(frozen=True)
class FitProblem:
    """Observed complex spectrum plus the parameter subset to extract.

    ``free`` maps parameter names to finite (lower, upper) bounds; every
    parameter not named stays at its template value. ``observable``
    states which scattering amplitude the data represent ("s21", "s11",
    or "s31.<label>").
    """

    observed: ComplexSpectrum
    system: HybridSystem
    free: dict[str, tuple[float, float]]
    B: float = 0.0
    observable: str = "s21"
    loss: str = "complex_residual"

    def __post_init__(self):
        if not self.free:
            raise ValueError("at least one free parameter is required")
        for name, (lo, hi) in self.free.items():
            _validate_name(name, self.system)
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"bounds for {name!r} must be finite")
            if not lo < hi:
                raise ValueError(f"bounds for {name!r} must satisfy lower < upper")
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}; choose from {LOSSES}")
        _model_fn(self.observable, self.system)  # validates the observable


@dataclass(frozen=True)
class FitResult:
    """Outcome of one fit: estimates, convergence report, and diagnostics.

    ``residual_trace`` holds the rms residual after each accepted step
    (monotone non-increasing); ``loss`` records the objective that was
    minimized.
    """

    estimates: dict[str, float]
    rms_residual: float
    iterations: int
    converged: bool
    jacobian_condition_estimate: float
    loss: str
    residual_trace: tuple[float, ...]


def _model_fn(observable: str, system: HybridSystem):
    if observable == "s21":
        return lambda f, sys_, B: scattering.s21(f, sys_, B)
    if observable == "s11":
        return lambda f, sys_, B: scattering.s11(f, sys_, B)
    field, label = _split_name(observable)
    if field == "s31" and label is not None:
        system.mode(label)
        return lambda f, sys_, B: scattering.s31_mode(f, sys_, B, label)
    raise ValueError(f"unknown observable {observable!r}")


def synthesize_noisy_spectrum(
    system: HybridSystem,
    B: float,
    f_grid,
    observable: str = "s21",
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> ComplexSpectrum:
    """Model spectrum plus additive complex Gaussian noise.

    The per-quadrature standard deviation is ``noise_sigma * max|S|``;
    the same seed always reproduces the same spectrum.
    """
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    f_grid = np.asarray(f_grid, dtype=float)
    if f_grid.size == 0:
        raise ValueError("frequency grid must be non-empty")
    values = np.asarray(_model_fn(observable, system)(f_grid, system, B), dtype=complex)
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        sigma = noise_sigma * np.max(np.abs(values))
        values = values + sigma * (rng.standard_normal(f_grid.size) + 1j * rng.standard_normal(f_grid.size))
    return ComplexSpectrum(f_grid, values)


def _to_internal(name: str, value: float) -> float:
    field, _ = _split_name(name)
    if field in _LOG_FIELDS:
        if value <= 0:
            raise ValueError(f"{name!r} is fitted in log space and needs a positive value")
        return math.log(value)
    return value


def _from_internal(name: str, value: float) -> float:
    field, _ = _split_name(name)
    return math.exp(value) if field in _LOG_FIELDS else value


def _residual_vector(problem: FitProblem, model_values: np.ndarray) -> np.ndarray:
    data = problem.observed.values
    if problem.loss == "complex_residual":
        diff = model_values - data
        return np.concatenate([diff.real, diff.imag])
    power = np.abs(model_values) ** 2 - np.abs(data) ** 2
    phase = np.unwrap(np.angle(model_values)) - np.unwrap(np.angle(data))
    return np.concatenate([power, phase])


def parameter_scales(names, f_grid: np.ndarray) -> np.ndarray:
    """Step scale per internal parameter: log-space rates move by a pure
    relative amount (scale 1), frequencies by a fraction of the measured
    band, so the finite-difference step stays meaningful for both."""
    span = float(f_grid[-1] - f_grid[0]) if f_grid.size > 1 else max(abs(float(f_grid[0])), 1.0)
    scales = []
    for name in names:
        field, _ = _split_name(name)
        scales.append(1.0 if field in _LOG_FIELDS else span)
    return np.asarray(scales)


def finite_difference_jacobian(fun, u: np.ndarray, scales=None, rel_step: float = JACOBIAN_REL_STEP) -> np.ndarray:
    """Central-difference Jacobian of ``fun`` at ``u``, step ``rel_step * scale``."""
    if scales is None:
        scales = np.maximum(np.abs(u), 1.0)
    r0 = fun(u)
    jac = np.empty((r0.size, u.size))
    for k in range(u.size):
        h = rel_step * scales[k]
        up, um = u.copy(), u.copy()
        up[k] += h
        um[k] -= h
        jac[:, k] = (fun(up) - fun(um)) / (2.0 * h)
    return jac


def fit_spectrum(problem: FitProblem, init: dict[str, float]) -> FitResult:
    """Damped least-squares extraction of the free parameters.

    Starts from ``init`` (which must lie inside the bounds), iterates
    Levenberg-Marquardt steps with a central-difference Jacobian, accepts
    only cost-non-increasing steps, and stops when the gradient norm
    drops below 1e-10 of its initial value or after 200 iterations.
    Singular normal equations end the fit with ``converged=False`` and a
    large condition estimate instead of raising.
    """
    names = sorted(problem.free)
    for name in names:
        if name not in init:
            raise ValueError(f"init is missing a value for {name!r}")
        lo, hi = problem.free[name]
        if not lo <= init[name] <= hi:
            raise ValueError(f"init for {name!r} is outside its bounds")

    model = _model_fn(problem.observable, problem.system)
    f_grid = problem.observed.frequencies

    def residuals(u: np.ndarray) -> np.ndarray:
        values = {n: _from_internal(n, ui) for n, ui in zip(names, u)}
        sys_ = apply_params(problem.system, values)
        return _residual_vector(problem, np.asarray(model(f_grid, sys_, problem.B), dtype=complex))

    u = np.array([_to_internal(n, init[n]) for n in names])
    scales = parameter_scales(names, f_grid)
    r = residuals(u)
    cost = float(r @ r)
    n_points = r.size
    trace = [math.sqrt(cost / n_points)]

    jac = finite_difference_jacobian(residuals, u, scales)
    grad = jac.T @ r
    grad0 = np.linalg.norm(grad)
    lam = 1e-3
    converged = grad0 == 0.0
    singular = False
    iterations = 0

    while not converged and iterations < MAX_ITERATIONS:
        iterations += 1
        jtj = jac.T @ jac
        diag = np.diag(jtj).copy()
        if np.any(diag == 0.0) or not np.all(np.isfinite(jtj)):
            singular = True  # a parameter the data cannot see, or a blown-up column
            break
        accepted = False
        while lam < 1e15:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                singular = True
                break
            if not np.all(np.isfinite(step)):
                singular = True
                break
            u_try = u + step
            try:
                r_try = residuals(u_try)
            except (ValueError, OverflowError):
                r_try = None
            if r_try is not None and np.all(np.isfinite(r_try)):
                cost_try = float(r_try @ r_try)
                if cost_try <= cost:
                    u, r, cost = u_try, r_try, cost_try
                    lam = max(lam / 3.0, 1e-12)
                    accepted = True
                    break
            lam *= 10.0
        if singular:
            break
        if not accepted:
            break  # damping exhausted without progress; gradient check decides below
        trace.append(math.sqrt(cost / n_points))
        jac = finite_difference_jacobian(residuals, u, scales)
        grad = jac.T @ r
        if np.linalg.norm(grad) < GRADIENT_RTOL * grad0:
            converged = True

    if singular:
        converged = False

    with np.errstate(all="ignore"):
        try:
            cond = float(np.linalg.cond(jac))
        except np.linalg.LinAlgError:
            cond = float("inf")
    if singular and math.isfinite(cond):
        cond = float("inf")

    estimates = {}
    for name, ui in zip(names, u):
        value = _from_internal(name, ui)
        lo, hi = problem.free[name]
        if not lo <= value <= hi:
            value = min(max(value, lo), hi)
            converged = False
        estimates[name] = value

    return FitResult(
        estimates=estimates,
        rms_residual=math.sqrt(cost / n_points),
        iterations=iterations,
        converged=converged,
        jacobian_condition_estimate=cond,
        loss=problem.loss,
        residual_trace=tuple(trace),
    )

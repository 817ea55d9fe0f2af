"""S-parameters and microwave-to-optical conversion spectra.

Every operation takes probe frequencies in Hz (scalar or ndarray) and a
:class:`~magnoncavity.model.HybridSystem` whose magnon-mode frequencies
are resolved from the bias field through each mode's field map. The
shared denominator

    D(f) = (f - f_c) + i*kappa_t - sum_m g_m^2 * chi_m(f)

has strictly positive imaginary part for real f, so all spectra are
finite and the phase of i*S21 stays inside (-pi, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import magnetostatics
from .model import CavityParams, HybridSystem, MagnonMode, susceptibility_magnon

OBSERVABLES = ("s21_power", "s11_power", "eta", "s21_phase", "s31_phase")


@dataclass(frozen=True)
class ComplexSpectrum:
    """Complex scattering amplitude on an ascending frequency grid."""

    frequencies: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if f.ndim != 1 or f.size == 0:
            raise ValueError("frequency grid must be a non-empty 1D array")
        if v.shape != f.shape:
            raise ValueError("values must match the frequency grid length")
        if not np.all(np.diff(f) > 0):
            raise ValueError("frequency grid must be strictly ascending")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(v))):
            raise ValueError("spectrum contains non-finite entries")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SweepMap:
    """Real observable on a (bias field x frequency) grid.

    ``values[k, l]`` corresponds to ``fields[k]`` and ``frequencies[l]``.
    Power-like observables (|S|^2, eta) must be non-negative; phase maps
    hold principal values in (-pi, pi].
    """

    fields: np.ndarray
    frequencies: np.ndarray
    values: np.ndarray
    observable: str = "s21_power"

    def __post_init__(self):
        B = np.asarray(self.fields, dtype=float)
        f = np.asarray(self.frequencies, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if B.ndim != 1 or f.ndim != 1 or B.size == 0 or f.size == 0:
            raise ValueError("grids must be non-empty 1D arrays")
        if np.any(np.diff(B) <= 0) or np.any(np.diff(f) <= 0):
            raise ValueError("grids must be strictly ascending")
        if v.shape != (B.size, f.size):
            raise ValueError(f"values shape {v.shape} does not match grids ({B.size}, {f.size})")
        if not np.all(np.isfinite(v)):
            raise ValueError("map contains non-finite values")
        if self.observable not in OBSERVABLES:
            raise ValueError(f"unknown observable {self.observable!r}")
        if not self.observable.endswith("_phase") and np.any(v < 0):
            raise ValueError("power-like map values must be non-negative")
        object.__setattr__(self, "fields", B)
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "values", v)


def _resolved_frequencies(system: HybridSystem, B: float) -> list[float]:
    return [magnetostatics.mode_frequency(m.field_map, B, system.material) for m in system.modes]


def shared_denominator(f, system: HybridSystem, B: float):
    """D(f) = (f - f_c) + i*kappa_t - sum_m g_m^2 chi_m(f)."""
    if not np.all(np.isfinite(f)):
        raise ValueError("f must be finite")
    cav = system.cavity
    d = (np.asarray(f, dtype=float) - cav.f_c) + 1j * cav.kappa_t
    for mode, f_m in zip(system.modes, _resolved_frequencies(system, B)):
        d = d - mode.g**2 * susceptibility_magnon(f, mode, f_m)
    return d


def s21(f, system: HybridSystem, B: float = 0.0):
    """Transmission amplitude -i * 2*kappa_e / D(f).

    Supports any number of magnon modes, including zero (bare cavity).
    ``B`` resolves the mode frequencies and is irrelevant for a bare
    cavity or fixed-frequency modes.
    """
    return -1j * 2.0 * system.cavity.kappa_e / shared_denominator(f, system, B)


def s11(f, system: HybridSystem, B: float = 0.0):
    """Reflection amplitude 1 - i * 2*kappa_e / D(f) (same denominator as s21)."""
    return 1.0 - 1j * 2.0 * system.cavity.kappa_e / shared_denominator(f, system, B)


def _s31_prefactor(mode: MagnonMode, cavity: CavityParams) -> float:
    if cavity.kappa_e == 0:
        raise ValueError("s31 requires kappa_e > 0")
    return math.sqrt(mode.beta * mode.delta / cavity.kappa_e)


def s31_mode(f, system: HybridSystem, B: float, mode_label: str):
    """Microwave-to-optical conversion amplitude for one magnon mode.

    Evaluated as S31_m(f) = -i * g_m * chi_m(f) * sqrt(beta_m*delta_m/kappa_e) * S21(f),
    which is algebraically identical to the closed two-mode coefficients
    (their numerator dressing factor collapses into the shared
    denominator) and extends them to any number of modes.
    """
    mode = system.mode(mode_label)
    f_m = magnetostatics.mode_frequency(mode.field_map, B, system.material)
    chi_m = susceptibility_magnon(f, mode, f_m)
    return -1j * mode.g * chi_m * _s31_prefactor(mode, system.cavity) * s21(f, system, B)


def eta_spectrum(f, system: HybridSystem, B: float = 0.0):
    """Total conversion efficiency: sum over modes of |S31_m(f)|^2."""
    if not system.modes:
        raise ValueError("conversion requires at least one magnon mode")
    total = 0.0
    for mode in system.modes:
        total = total + np.abs(s31_mode(f, system, B, mode.label)) ** 2
    return total


def eta_resonant(system: HybridSystem) -> float:
    """Conversion efficiency at triple resonance, in terms of cooperativities.

    eta = 4*kappa_e / (1 + sum_m C_m)^2 * sum_m beta_m*delta_m*C_m^2/g_m^2
    with C_m = g_m^2/(kappa_t*gamma_m). Each term is computed as
    beta*delta*g^2/(kappa_t*gamma)^2, so a mode with g = 0 contributes 0
    (the continuity limit) instead of dividing by zero.
    """
    if not system.modes:
        raise ValueError("conversion requires at least one magnon mode")
    kappa_t = system.cavity.kappa_t
    total_c = sum(m.g**2 / (kappa_t * m.gamma) for m in system.modes)
    acc = sum(m.beta * m.delta * m.g**2 / (kappa_t * m.gamma) ** 2 for m in system.modes)
    return 4.0 * system.cavity.kappa_e / (1.0 + total_c) ** 2 * acc


def eta_single_resonant(g: float, gamma: float, delta: float, cavity: CavityParams) -> float:
    """Single-mode resonant conversion efficiency.

    eta = (2*sqrt(delta*kappa_e) * C / (g*(1 + C)))^2 with
    C = g^2/(kappa_t*gamma). Saturates at 4*delta*kappa_e/g^2 for large C.
    """
    if g <= 0:
        raise ValueError("single-mode resonant efficiency requires g > 0")
    c = g * g / (cavity.kappa_t * gamma)
    return (2.0 * math.sqrt(delta * cavity.kappa_e) * c / (g * (1.0 + c))) ** 2


def _kittel_mode(system: HybridSystem) -> MagnonMode:
    for mode in system.modes:
        if mode.field_map.kind == "kittel":
            return mode
    raise ValueError("system has no Kittel-mapped mode")


def dispersion_branches(system: HybridSystem, B: float, f_K: float | None = None):
    """Hybridized branch frequencies (f_plus, f_minus) of cavity + Kittel mode.

    f_pm = (f_c + f_K)/2 +/- sqrt(4 g_K^2 + (f_c - f_K)^2)/2. The gap at
    degeneracy (f_K = f_c) equals 2*g_K. If ``f_K`` is omitted it is
    resolved from the Kittel mode's field map at ``B``.
    """
    mode = _kittel_mode(system)
    if f_K is None:
        f_K = magnetostatics.mode_frequency(mode.field_map, B, system.material)
    f_c = system.cavity.f_c
    center = 0.5 * (f_c + f_K)
    half_gap = 0.5 * math.hypot(2.0 * mode.g, f_c - f_K)
    return center + half_gap, center - half_gap


def principal_phase(values) -> np.ndarray:
    """Phase as a principal value in (-pi, pi] (no unwrapping)."""
    phase = np.angle(values)
    return np.where(phase == -np.pi, np.pi, phase)


def sweep_map(
    system: HybridSystem,
    B_grid,
    f_grid,
    observable: str = "s21_power",
    mode_label: str | None = None,
) -> SweepMap:
    """Evaluate one observable over a (bias field x frequency) grid.

    ``mode_label`` selects the mode for ``s31_phase`` (defaults to the
    first mode). Rows follow ``B_grid`` order, columns ``f_grid`` order.
    """
    if observable not in OBSERVABLES:
        raise ValueError(f"unknown observable {observable!r}; choose from {OBSERVABLES}")
    B_grid = np.atleast_1d(np.asarray(B_grid, dtype=float))
    f_grid = np.atleast_1d(np.asarray(f_grid, dtype=float))
    if B_grid.size == 0 or f_grid.size == 0:
        raise ValueError("grids must be non-empty")

    if observable == "s31_phase":
        if not system.modes:
            raise ValueError("s31_phase requires at least one magnon mode")
        label = mode_label if mode_label is not None else system.modes[0].label

    rows = []
    for B in B_grid:
        if observable == "s21_power":
            row = np.abs(s21(f_grid, system, B)) ** 2
        elif observable == "s11_power":
            row = np.abs(s11(f_grid, system, B)) ** 2
        elif observable == "eta":
            row = eta_spectrum(f_grid, system, B)
        elif observable == "s21_phase":
            row = principal_phase(s21(f_grid, system, B))
        else:
            row = principal_phase(s31_mode(f_grid, system, B, label))
        rows.append(np.atleast_1d(row))
    return SweepMap(B_grid, f_grid, np.vstack(rows), observable)

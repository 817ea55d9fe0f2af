"""Magnetostatic (Walker) mode frequencies of a saturated ferromagnetic sphere.

Provides the uniform-precession (Kittel) frequency, closed-form mode
frequencies for index patterns i - |j| in {0, 1} and for the (2, 0) mode,
and a general solver for the magnetostatic characteristic equation

    i + 1 + xi0 * P_i^j'(xi0) / P_i^j(xi0) +/- j * chi2 = 0,

where xi0^2 = 1 + 1/chi1 and chi1, chi2 are the circuit-free Polder
susceptibility components of the sphere. All fields are flux densities in
tesla and the gyromagnetic ratio is in Hz/T, which makes chi1 and chi2
dimensionless, so frequencies come out in Hz directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import DomainError
from .model import FieldMap, MaterialParams

# A candidate bracketing root is accepted only if the characteristic
# residual there is this small; pole crossings leave residuals that are
# many orders of magnitude larger.
_ROOT_RESIDUAL_TOL = 1e-4
_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class WalkerModeQuery:
    """One magnetostatic-mode request: indices, sign branch, bias field.

    ``sign_branch`` selects the sign in front of the j*chi2 term of the
    characteristic equation ("plus" reproduces the closed forms for the
    i = j and i = j + 1 families, see :func:`matching_sign_branch`).
    """

    i: int
    j: int
    B_ext: float
    sign_branch: str = "plus"

    def __post_init__(self):
        if self.i < 1:
            raise ValueError("mode index i must be >= 1")
        if not -self.i <= self.j <= self.i:
            raise ValueError(f"mode index j must satisfy -i <= j <= i, got ({self.i}, {self.j})")
        if self.sign_branch not in ("plus", "minus"):
            raise ValueError("sign_branch must be 'plus' or 'minus'")
        if not math.isfinite(self.B_ext) or self.B_ext <= 0:
            raise ValueError("B_ext must be positive and finite")

    @property
    def sign(self) -> int:
        return +1 if self.sign_branch == "plus" else -1


def internal_field(B_ext: float, material: MaterialParams) -> float:
    """Internal flux density of a uniformly magnetized sphere: B_ext - mu0_Ms/3."""
    return B_ext - material.mu0_Ms / 3.0


def kittel_frequency(B_ext: float, material: MaterialParams) -> float:
    """Uniform-precession mode frequency, linear in the external field.

    f = gamma_e * B_ext; the sphere's demagnetizing field drops out for
    uniform precession.
    """
    if not math.isfinite(B_ext):
        raise ValueError("B_ext must be finite")
    return material.gamma_e * B_ext


def field_for_frequency(f: float, material: MaterialParams) -> float:
    """Inverse of :func:`kittel_frequency`: bias field placing the Kittel mode at f."""
    return f / material.gamma_e


def msm_frequency_linear(q: WalkerModeQuery, material: MaterialParams) -> float:
    """Closed-form magnetostatic mode frequency for i = j or i = j + 1 (j >= 1).

    f = gamma_e*B_ext + (j/(2j+1) - 1/3) * gamma_e*mu0_Ms   for i = j,
    f = gamma_e*B_ext + (j/(2j+3) - 1/3) * gamma_e*mu0_Ms   for i = j + 1.

    The (1, 1) case reduces exactly to the Kittel frequency.
    """
    i, j = q.i, q.j
    if j < 1:
        raise ValueError("closed forms require j >= 1")
    f_M = material.gamma_e * material.mu0_Ms
    if i == j:
        offset = (j / (2 * j + 1) - 1.0 / 3.0) * f_M
    elif i == j + 1:
        offset = (j / (2 * j + 3) - 1.0 / 3.0) * f_M
    else:
        raise ValueError(f"no linear closed form for indices ({i}, {j})")
    return material.gamma_e * q.B_ext + offset


def msm20_frequency(B_ext: float, material: MaterialParams) -> float:
    """Closed form for the (2, 0) mode.

    f = gamma_e*mu0_Ms * sqrt((r - 1/3)(r + 7/15)) with r = B_ext/mu0_Ms;
    requires r > 1/3 so the radicand is positive.
    """
    if not math.isfinite(B_ext):
        raise ValueError("B_ext must be finite")
    r = B_ext / material.mu0_Ms
    radicand = (r - 1.0 / 3.0) * (r + 7.0 / 15.0)
    if radicand <= 0:
        raise DomainError(f"(2,0) closed form needs B_ext/mu0_Ms > 1/3, got r = {r:g}")
    return material.gamma_e * material.mu0_Ms * math.sqrt(radicand)


def _legendre_pair(i: int, j: int, z: complex) -> tuple[complex, complex]:
    """P_i^j(z) and dP_i^j/dz for 0 <= j <= i via forward recurrences.

    Complex-capable: the seed (1 - z^2)^{j/2} uses the principal branch,
    and value and derivative share it, so ratios are branch-independent.
    Includes the Condon-Shortley phase (matches scipy.special.lpmv on
    real arguments in (-1, 1)).
    """
    z = complex(z)
    somx2 = (1.0 - z * z) ** 0.5
    p_jj = 1.0 + 0.0j
    for k in range(1, j + 1):
        p_jj *= -(2 * k - 1) * somx2
    if i == j:
        p_im1, p_i = 0.0 + 0.0j, p_jj  # P_{j-1}^j vanishes
    else:
        p_prev, p_curr = p_jj, z * (2 * j + 1) * p_jj
        for n in range(j + 2, i + 1):
            p_prev, p_curr = p_curr, ((2 * n - 1) * z * p_curr - (n - 1 + j) * p_prev) / (n - j)
        p_im1, p_i = p_prev, p_curr
    zz1 = z * z - 1.0
    if zz1 == 0:
        raise DomainError("Legendre derivative is singular at z = +/-1")
    dp = (i * z * p_i - (i + j) * p_im1) / zz1
    return p_i, dp


def assoc_legendre(i: int, j: int, x):
    """Associated Legendre function P_i^j and its first derivative at x.

    Negative j is mapped through the proportionality
    P_i^{-m} = (-1)^m (i-m)!/(i+m)! P_i^m. Real input yields real output
    whenever the function is real there (always for even j, and for odd j
    when \\|x\\| <= 1); otherwise a complex pair is returned.
    """
    if i < 1:
        raise ValueError("degree i must be >= 1")
    if not -i <= j <= i:
        raise ValueError("order j must satisfy -i <= j <= i")
    if not (isinstance(x, complex) or math.isfinite(x)):
        raise ValueError("x must be finite")
    m = abs(j)
    p, dp = _legendre_pair(i, m, x)
    if j < 0:
        scale = (-1) ** m * math.factorial(i - m) / math.factorial(i + m)
        p, dp = scale * p, scale * dp
    if not isinstance(x, complex):
        mag = max(abs(p), abs(dp), 1.0)
        if abs(p.imag) <= 1e-13 * mag and abs(dp.imag) <= 1e-13 * mag:
            return p.real, dp.real
    return p, dp


def _polder_components(f: float, q: WalkerModeQuery, material: MaterialParams) -> tuple[float, float, float]:
    """chi1, chi2 and the pole frequency gamma_e*B_i at probe frequency f."""
    B_i = internal_field(q.B_ext, material)
    x = material.gamma_e * B_i
    f_M = material.gamma_e * material.mu0_Ms
    den = x * x - f * f
    # |x^2 - f^2| ~ 2*x*|x - f|; guard against the susceptibility pole
    if abs(den) < 1e-12 * max(x * x, f * f):
        raise DomainError(f"characteristic equation has a pole at f = {x:.6e} Hz (gamma_e * B_internal)")
    chi1 = f_M * x / den
    chi2 = f_M * f / den
    return chi1, chi2, x


def walker_characteristic(f: float, q: WalkerModeQuery, material: MaterialParams) -> float:
    """Left side of the sphere's magnetostatic characteristic equation.

    chi1 may put xi0^2 = 1 + 1/chi1 below zero inside the magnetostatic
    band; the Legendre ratio xi0*P'/P is an even function of xi0 and hence
    real for any real xi0^2, so the residual is evaluated on a complex
    path and its (verified negligible) imaginary part discarded.
    """
    if not math.isfinite(f):
        raise ValueError("f must be finite")
    chi1, chi2, _ = _polder_components(f, q, material)
    if chi1 == 0:
        raise DomainError("chi1 vanished; characteristic equation undefined")
    xi0 = complex(1.0 + 1.0 / chi1) ** 0.5
    p, dp = _legendre_pair(q.i, abs(q.j), xi0)
    if p == 0:
        raise DomainError(f"P_i^j vanishes at xi0 = {xi0}; residual has a pole here")
    ratio = xi0 * dp / p
    value = (q.i + 1) + ratio + q.sign * q.j * chi2
    if abs(value.imag) > _IMAG_TOL * max(1.0, abs(value.real)):
        raise DomainError(f"characteristic residual is not real at f = {f:.6e} Hz (imag {value.imag:.3e})")
    return value.real


def default_search_window(q: WalkerModeQuery, material: MaterialParams) -> tuple[float, float]:
    """Kittel frequency +/- 1.5 * gamma_e*mu0_Ms; covers all low-order mode offsets."""
    center = kittel_frequency(q.B_ext, material)
    half = 1.5 * material.gamma_e * material.mu0_Ms
    return max(center - half, 1.0), center + half


def solve_walker_mode(
    q: WalkerModeQuery,
    material: MaterialParams,
    search_window: tuple[float, float] | None = None,
    n_panels: int = 64,
    f_tol: float = 1.0,
) -> float:
    """Root of the characteristic equation inside a frequency window.

    The window is split into ``n_panels`` panels; each sign change is
    refined by Brent's method to ``f_tol`` (absolute, Hz) and kept only if
    the residual there is small, which weeds out sign flips across poles
    of the residual (the chi pole and zeros of P_i^j). Exactly one
    accepted root must remain, otherwise a DomainError reports an empty
    or ambiguous window.
    """
    if search_window is None:
        search_window = default_search_window(q, material)
    lo, hi = search_window
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValueError(f"invalid search window ({lo}, {hi})")

    def residual(f: float) -> float:
        return walker_characteristic(f, q, material)

    edges = [lo + (hi - lo) * k / n_panels for k in range(n_panels + 1)]
    values = []
    for f in edges:
        try:
            values.append(residual(f))
        except DomainError:
            values.append(math.nan)

    roots: list[float] = []
    for (fa, ra), (fb, rb) in zip(zip(edges, values), zip(edges[1:], values[1:])):
        if math.isnan(ra) or math.isnan(rb) or (ra == 0 and rb == 0):
            continue
        try:
            if ra == 0:
                candidate = fa
            elif rb == 0:
                candidate = fb
            elif ra * rb < 0:
                candidate = brentq(residual, fa, fb, xtol=f_tol)
            else:
                continue
            if abs(residual(candidate)) > _ROOT_RESIDUAL_TOL:
                continue  # sign change straddles a pole, not a root
        except DomainError:
            continue  # refinement walked into the pole guard: not a root
        if not any(abs(candidate - r) <= 10 * f_tol for r in roots):
            roots.append(candidate)

    if not roots:
        raise DomainError(
            f"no root of the ({q.i},{q.j}) characteristic equation in ({lo:.6e}, {hi:.6e}) Hz"
        )
    if len(roots) > 1:
        raise DomainError(
            f"window ({lo:.6e}, {hi:.6e}) Hz contains {len(roots)} roots for ({q.i},{q.j}); narrow it"
        )
    return roots[0]


def matching_sign_branch(i: int, j: int, material: MaterialParams, B_ext: float = 0.38) -> str:
    """Which sign branch reproduces the linear closed form for (i, j).

    Determined by solving both branches near the closed-form frequency
    rather than assumed; returns "plus" or "minus".
    """
    probe = WalkerModeQuery(i=i, j=j, B_ext=B_ext, sign_branch="plus")
    target = msm_frequency_linear(probe, material)
    half = 0.03 * material.gamma_e * material.mu0_Ms
    window = (target - half, target + half)
    for branch in ("plus", "minus"):
        q = WalkerModeQuery(i=i, j=j, B_ext=B_ext, sign_branch=branch)
        try:
            root = solve_walker_mode(q, material, window, n_panels=16)
        except DomainError:
            continue
        if abs(root - target) <= 1e-6 * target:
            return branch
    raise DomainError(f"neither sign branch reproduces the closed form for ({i}, {j})")


def mode_frequency(field_map: FieldMap, B_ext: float, material: MaterialParams) -> float:
    """Evaluate a mode's field map at bias field B_ext."""
    if field_map.kind == "kittel":
        return kittel_frequency(B_ext, material)
    if field_map.kind == "walker":
        q = WalkerModeQuery(i=field_map.i, j=field_map.j, B_ext=B_ext)
        return msm_frequency_linear(q, material)
    if field_map.kind == "msm20":
        return msm20_frequency(B_ext, material)
    return field_map.frequency

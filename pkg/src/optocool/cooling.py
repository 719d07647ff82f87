"""Phonon occupation: closed forms, imperfection corrections, quadrature oracle.

The closed forms all reduce to one exact identity: for a constant total
damping ``gamma_M``,

    int dw/2pi |chi(-w)|^2 (a w + c)^2 / ((w_c/2)^2 + (w + Delta)^2)
      = [(c - a omega_M)^2 / gamma_M + (c - a Delta)^2 / w_c + a^2 (w_c + gamma_M) / 4]
        / [(w_c + gamma_M)^2 / 4 + (omega_M - Delta)^2]

which is the textbook weak-coupling phonon number when ``(a w + c)^2`` is the
Fano-shaped numerator of the ideal force spectrum. :func:`n_quadrature`
evaluates the occupation integral numerically with the frequency-resolved
damping and serves as the independent check on all of them.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import (
    InstabilityError,
    NoCoolingError,
    PerturbativeRangeWarning,
)
from . import quadrature
from .params import SystemParams
from .spectra import (
    ForceSpectrum,
    SpectrumKind,
    fano_detuning,
    require_dissipative,
    total_damping,
)

PERTURBATIVE_LIMIT = 0.3


class Method(enum.Enum):
    ANALYTIC = "analytic"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class CoolingResult:
    """Phonon occupation with a per-source breakdown.

    For ``method=ANALYTIC`` the total is the sum of ``n_thermal_residual``,
    ``n_backaction``, ``n_int``, ``n_delta``, ``n_g`` and ``n_L``.
    ``backaction_terms`` splits ``n_backaction`` into the mechanical-band
    term (the one the Fano interference removes) and the two cavity-band terms.
    """

    n_total: float
    n_thermal_residual: float
    n_backaction: float
    gamma_M: float
    method: Method
    n_int: float = 0.0
    n_delta: float = 0.0
    n_g: float = 0.0
    n_L: float = 0.0
    backaction_terms: tuple = (0.0, 0.0, 0.0)
    notes: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["method"] = self.method.value
        out["backaction_terms"] = list(self.backaction_terms)
        out["notes"] = list(self.notes)
        return out


@dataclass(frozen=True)
class Deviations:
    """Departures from the optimal settings.

    ``d_detuning`` is absolute (angular), ``d_power_rel`` is ``dU/U0`` and
    ``d_ratio_rel`` is ``(gamma g_omega/g_gamma - 3 omega_M) / (3 omega_M)``.
    """

    d_detuning: float = 0.0
    d_power_rel: float = 0.0
    d_ratio_rel: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.d_detuning, self.d_power_rel, self.d_ratio_rel)):
            raise ValueError("deviations must be finite")


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls for :func:`n_quadrature`.

    Windows are in units of the mechanical linewidth (peak) and of the cavity
    linewidth (tails). ``frequency_dependent_damping`` uses
    ``Gamma_M(w) = gamma_m + S(w) - S(-w)`` inside the susceptibility;
    otherwise ``gamma_M`` is frozen at its value at ``omega_M``.
    """

    rel_tol: float = 1e-8
    peak_window_halfwidth: float = 1e3
    tail_extent: float = 50.0
    max_subdivisions: int = 10_000
    frequency_dependent_damping: bool = True

    def __post_init__(self):
        if not 0 < self.rel_tol <= 1e-2:
            raise ValueError("quadrature.rel_tol must lie in (0, 1e-2]")
        if self.peak_window_halfwidth <= 0 or self.tail_extent <= 0:
            raise ValueError("quadrature windows must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("quadrature.max_subdivisions must be >= 1")


# -- small helpers ---------------------------------------------------------

def dispersive_limit(gamma, omega_M):
    """Resolved-sideband floor ``gamma^2 / (16 omega_M^2)``."""
    return gamma**2 / (16 * omega_M**2)


def beta_factor(gamma, omega_M):
    """``[(gamma/2)^2 + 16 omega_M^2] / [(gamma/2)^2 + 4 omega_M^2]``, between 1 and 4."""
    half = (gamma / 2) ** 2
    return (half + 16 * omega_M**2) / (half + 4 * omega_M**2)


def sideband_suppression(gamma, omega_M):
    """``(gamma/2)^2 / [(gamma/2)^2 + 4 omega_M^2]``, the factor shared by several corrections."""
    half = (gamma / 2) ** 2
    return half / (half + 4 * omega_M**2)


def gain_max(params: SystemParams):
    """``G0 = 16 omega_M^2 / (gamma gamma_m)``."""
    return 16 * params.omega_M**2 / (params.cavity.gamma * params.mech.gamma_m)


def gain(params: SystemParams):
    """Damping gain ``G`` with ``gamma_M = gamma_m (1 + G U)`` at the Fano detuning."""
    require_dissipative(params)
    mismatch = 3 * params.omega_M / params.cavity.gamma - params.coupling.g_omega / params.coupling.g_gamma
    return gain_max(params) / (1 + mismatch**2)


def n_fano(u, n_th, g):
    """Occupation at the Fano detuning as a function of drive, ``n_th/(1+GU) + U``."""
    return n_th / (1 + g * u) + u


def n_fano_with_loss(u, n_th, g, h):
    """Same with internal loss, ``(n_th + H U)/(1 + G U) + U``."""
    return (n_th + h * u) / (1 + g * u) + u


def _band_integral(a, c, gamma_M, width, omega_M, detuning):
    """The exact Lorentzian-product integral quoted in the module docstring, term by term."""
    denom = (width + gamma_M) ** 2 / 4 + (omega_M - detuning) ** 2
    return (
        (c - a * omega_M) ** 2 / gamma_M / denom,
        (c - a * detuning) ** 2 / width / denom,
        a**2 * (width + gamma_M) / 4 / denom,
    )


def _require_stable(gamma_M):
    if np.any(np.asarray(gamma_M) <= 0):
        raise InstabilityError(
            f"gamma_M = {gamma_M!r} <= 0: the drive heats the oscillator (need red detuning)"
        )


# -- closed forms ----------------------------------------------------------

def n_analytic(params: SystemParams, kind: SpectrumKind = SpectrumKind.IDEAL,
               strict_loss: bool = False) -> CoolingResult:
    """Weak-coupling phonon number.

    The ideal part is the standard three-term bracket. Internal-loss and
    multimode spectra contribute through the same exact integral and are
    reported as ``n_int`` and ``n_L``. ``gamma_M`` includes the damping of
    every selected spectral part.
    """
    cav, cpl, mech = params.cavity, params.coupling, params.mech
    gamma, delta, omega_M = cav.gamma, cav.detuning, params.omega_M
    width = cav.gamma + cav.gamma_int if strict_loss else cav.gamma
    gamma_M = total_damping(params, kind, strict_loss=strict_loss)
    _require_stable(gamma_M)
    photons = params.drive.photon_number

    # Fano-mismatch amplitude g_gamma (omega_h - omega_M), written as
    # 2 g_gamma (Delta - Delta_F) so it is exactly zero at the Fano detuning.
    g_gamma = np.asarray(cpl.g_gamma, dtype=float)
    safe = np.where(g_gamma == 0, 1.0, g_gamma)
    delta_f = (omega_M - gamma * cpl.g_omega / safe) / 2
    mismatch = np.where(g_gamma == 0, gamma * cpl.g_omega, 2 * g_gamma * (delta - delta_f))
    c = cpl.g_gamma * 2 * delta + gamma * cpl.g_omega
    denom = (gamma + gamma_M) ** 2 / 4 + (omega_M - delta) ** 2
    t1 = photons / gamma * mismatch**2 / gamma_M / denom
    t2 = photons / gamma * (c - cpl.g_gamma * delta) ** 2 / gamma / denom
    t3 = photons / gamma * cpl.g_gamma**2 * (gamma + gamma_M) / 4 / denom
    if strict_loss:
        # strict mode: ideal spectrum also uses the total linewidth
        t1, t2, t3 = (photons / gamma * v for v in _band_integral(cpl.g_gamma, c, gamma_M, width, omega_M, delta))
    n_back = t1 + t2 + t3

    n_int = 0.0
    if kind.has_loss:
        weight = photons / gamma**2 * (
            (cpl.g_gamma * width / 2) ** 2 + (cpl.g_gamma * delta + gamma * cpl.g_omega) ** 2
        )
        n_int = sum(_band_integral(0.0, 1.0, gamma_M, width, omega_M, delta)) * weight * cav.gamma_int

    n_L = 0.0
    if kind.multimode:
        kappa = np.pi * gamma * cpl.g_omega / cav.fsr
        n_L = photons / gamma * sum(_band_integral(kappa, 0.0, gamma_M, width, omega_M, delta))

    thermal = mech.gamma_m * mech.n_th / gamma_M
    return CoolingResult(
        n_total=thermal + n_back + n_int + n_L,
        n_thermal_residual=thermal,
        n_backaction=n_back,
        gamma_M=gamma_M,
        method=Method.ANALYTIC,
        n_int=n_int,
        n_L=n_L,
        backaction_terms=(t1, t2, t3),
    )


def n_dispersive(params: SystemParams):
    """Dispersive red-sideband occupation at ``Delta = -omega_M``, ``(n_th + n_disp V)/(1 + V)``."""
    gamma, omega_M = params.cavity.gamma, params.omega_M
    v = (
        params.drive.photon_number * params.coupling.g_omega**2
        / ((gamma / 2) ** 2 + 4 * omega_M**2)
        * 16 * omega_M**2 / (gamma * params.mech.gamma_m)
    )
    return (params.mech.n_th + dispersive_limit(gamma, omega_M) * v) / (1 + v)


def n_diss_limit(params: SystemParams, exact_minimization: bool = False):
    """Minimum over drive power at the Fano detuning.

    Returns ``(n_diss, U0)``. With ``exact_minimization`` the exact minimiser
    of ``n_th/(1+GU) + U`` is used; otherwise its ``n_diss << n_th`` form
    ``n_diss = 2 sqrt(n_th/G)``, ``U0 = n_diss/2``.
    """
    g = gain(params)
    n_th = params.mech.n_th
    x = n_th * g
    if np.any(np.asarray(x) <= 1):
        raise NoCoolingError(f"n_th * G = {x!r} <= 1: drive cannot reduce the occupation")
    if exact_minimization:
        return n_th * (2 / np.sqrt(x) - 1 / x), (np.sqrt(x) - 1) / g
    n_diss = 2 * np.sqrt(n_th / g)
    return n_diss, n_diss / 2


def n_diss_optimal_ratio(params: SystemParams):
    """``n_diss`` at the best coupling ratio: ``0.5 sqrt(n_th/Q * gamma/omega_M)``."""
    q = params.omega_M / params.mech.gamma_m
    return 0.5 * np.sqrt(params.mech.n_th / q * params.cavity.gamma / params.omega_M)


def loss_weight(params: SystemParams):
    """``H`` such that internal loss turns ``n_th`` into ``n_th + H U``."""
    require_dissipative(params)
    gamma, delta, omega_M = params.cavity.gamma, params.cavity.detuning, params.omega_M
    num = (gamma / 2) ** 2 + (delta + params.coupling_ratio) ** 2
    den = (gamma / 2) ** 2 + (omega_M - delta) ** 2
    return params.cavity.gamma_int / params.mech.gamma_m * num / den


def n_internal_loss(params: SystemParams, general: bool = False):
    """Excess occupation caused by internal cavity loss.

    By default returns the optimised-settings form
    ``(gamma_int/gamma) n_disp beta``. With ``general=True`` the loss weight
    ``H`` is evaluated at the actual detuning and ratio and ``H/G`` is
    returned. At the optimal settings the latter equals
    ``(gamma_int/gamma) n_disp`` exactly, i.e. ``beta`` is replaced by 1.
    """
    if general:
        return loss_weight(params) / gain(params)
    gamma, omega_M = params.cavity.gamma, params.omega_M
    return params.cavity.gamma_int / gamma * dispersive_limit(gamma, omega_M) * beta_factor(gamma, omega_M)


def _warn_if_large(value, what: str):
    if np.any(np.abs(value) > PERTURBATIVE_LIMIT):
        warnings.warn(
            f"{what} = {value!r} exceeds {PERTURBATIVE_LIMIT}; perturbative formula is unreliable",
            PerturbativeRangeWarning,
            stacklevel=3,
        )


def n_detuning_error(params: SystemParams, d_detuning, optimized: bool = True):
    """Extra phonons from detuning ``Delta + d_detuning`` instead of ``Delta``.

    ``optimized=True`` uses ``(dD/D)^2 (gamma/2)^2 / ((gamma/2)^2 + 4 omega_M^2)``
    with ``D`` the detuning in force. ``optimized=False`` evaluates the general
    form with the actual drive and damping.
    """
    gamma, delta, omega_M = params.cavity.gamma, params.cavity.detuning, params.omega_M
    _warn_if_large(np.divide(d_detuning, delta), "|dDelta/Delta|")
    if optimized:
        return (d_detuning / delta) ** 2 * sideband_suppression(gamma, omega_M)
    gamma_M = total_damping(params)
    _require_stable(gamma_M)
    lor = (gamma / 2) ** 2 + (omega_M - delta) ** 2
    return params.u * gamma**2 / lor * 4 * d_detuning**2 / (gamma * gamma_M)


def n_ratio_error(params: SystemParams, delta_rel):
    """Extra phonons from a relative error ``delta_rel`` in the coupling ratio ``3 omega_M``."""
    gamma, omega_M = params.cavity.gamma, params.omega_M
    x = delta_rel * 3 * omega_M / gamma
    _warn_if_large(x, "delta * 3 omega_M / gamma")
    return n_diss_optimal_ratio(params) / 2 * x**2


def n_multimode(params: SystemParams):
    """Occupation floor from the multimode term, ``(3 pi omega_M / 2 omega_FSR)^2 (gamma/2)^2/(...)``."""
    gamma, omega_M = params.cavity.gamma, params.omega_M
    return (1.5 * np.pi * omega_M / params.cavity.fsr) ** 2 * sideband_suppression(gamma, omega_M)


def n_power_error(params: SystemParams, d_power_rel, exact_minimization: bool = False):
    """Extra phonons when the drive is ``U0 (1 + d_power_rel)`` instead of ``U0``."""
    g = gain(params)
    n_min, u0 = n_diss_limit(params, exact_minimization)
    n_th = params.mech.n_th
    return n_fano(u0 * (1 + d_power_rel), n_th, g) - n_fano(u0, n_th, g)


def cooling_limit(params: SystemParams, deviations: Deviations | None = None,
                  exact_minimization: bool = False) -> CoolingResult:
    """Optimised limit plus independent, additive imperfection corrections.

    Uses the coupling ratio and losses of ``params``; the detuning and drive
    are taken at their optimum, shifted by ``deviations``.
    """
    deviations = deviations or Deviations()
    g = gain(params)
    n_diss, u0 = n_diss_limit(params, exact_minimization)
    u = u0 * (1 + deviations.d_power_rel)
    n_th = params.mech.n_th
    thermal = n_th / (1 + g * u)
    delta_f = fano_detuning(params)
    ref = params.with_detuning(delta_f)
    n_delta = n_detuning_error(ref, deviations.d_detuning) if deviations.d_detuning else 0.0
    n_g = n_ratio_error(params, deviations.d_ratio_rel) if deviations.d_ratio_rel else 0.0
    n_int = n_internal_loss(params) if np.any(np.asarray(params.cavity.gamma_int) > 0) else 0.0
    n_L = n_multimode(params) if params.cavity.multimode else 0.0
    notes = []
    if deviations.d_ratio_rel:
        notes.append("n_g measured against the optimal-ratio limit")
    return CoolingResult(
        n_total=thermal + u + n_int + n_delta + n_g + n_L,
        n_thermal_residual=thermal,
        n_backaction=u,
        gamma_M=params.mech.gamma_m * (1 + g * u),
        method=Method.ANALYTIC,
        n_int=n_int,
        n_delta=n_delta,
        n_g=n_g,
        n_L=n_L,
        backaction_terms=(0.0, u, 0.0),
        notes=tuple(notes),
    )


# -- quadrature oracle -----------------------------------------------------

def _breakpoints(center, window, cav_center, extent):
    pts = {center, center - window, center + window, cav_center, -extent, extent}
    step = window * 10
    while step < 2 * extent:
        pts.update((center - step, center + step))
        step *= 10
    return sorted(p for p in pts if -extent <= p <= extent)


def n_quadrature(params: SystemParams, kind: SpectrumKind = SpectrumKind.IDEAL,
                 cfg: QuadratureConfig | None = None, strict_loss: bool = False) -> CoolingResult:
    """Occupation by direct integration of the mechanical spectrum.

    Integrates ``S_bb(w) = |chi(-w)|^2 [gamma_m n_th + S_FF(w)]`` over
    ``dw/2pi`` on panels that resolve the mechanical peak at ``-omega_M``
    (width ``gamma_M``) and the cavity response (width ``gamma``), with
    semi-infinite tails. Raises :class:`QuadratureError` if the tolerance is
    not met within ``cfg.max_subdivisions``.
    """
    cfg = cfg or QuadratureConfig()
    spec = ForceSpectrum(params, kind, strict_loss=strict_loss)
    gamma_M = spec.damping(params.omega_M)
    _require_stable(gamma_M)
    omega_M = params.omega_M
    gamma_m, n_th = params.mech.gamma_m, params.mech.n_th
    delta = params.cavity.detuning
    gamma = params.cavity.gamma

    def integrand(w):
        parts = spec.parts(w)
        g = spec.damping(-w) if cfg.frequency_dependent_damping else gamma_M
        lor = 1.0 / ((g / 2) ** 2 + (w + omega_M) ** 2) / (2 * np.pi)
        return np.stack([gamma_m * n_th * lor, parts["ideal"] * lor,
                         parts["loss"] * lor, parts["multimode"] * lor])

    window = cfg.peak_window_halfwidth * gamma_M
    extent = abs(delta) + omega_M + cfg.tail_extent * gamma
    pts = _breakpoints(-omega_M, window, -delta, extent)
    (thermal, ideal, loss, multi), _ = quadrature.integrate(
        integrand, pts, tail_scale=gamma, epsrel=cfg.rel_tol, limit=cfg.max_subdivisions,
    )
    return CoolingResult(
        n_total=float(thermal + ideal + loss + multi),
        n_thermal_residual=float(thermal),
        n_backaction=float(ideal),
        gamma_M=float(gamma_M),
        method=Method.QUADRATURE,
        n_int=float(loss),
        n_L=float(multi),
        backaction_terms=(),
    )

"""Backaction force spectra, mechanical susceptibility and optical damping.

Spectra follow the convention ``S(omega) = int dt exp(i omega t) <F(t) F(0)>``
and are returned pre-multiplied by ``(x_zpf / hbar)**2``, so that they carry
units of a rate and neither the mass nor hbar appear anywhere.

The force spectra are written in terms of ``|a0|^2``, ``g_omega`` and
``g_gamma`` directly (rather than via ``omega_h``), so they remain finite in
the purely dispersive limit ``g_gamma -> 0``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCouplingError, InstabilityError
from .params import SystemParams


class SpectrumKind(enum.Enum):
    IDEAL = "ideal"
    WITH_INTERNAL_LOSS = "with_internal_loss"
    MULTIMODE = "multimode"
    MULTIMODE_WITH_INTERNAL_LOSS = "multimode_with_internal_loss"

    @property
    def has_loss(self) -> bool:
        return self in (SpectrumKind.WITH_INTERNAL_LOSS, SpectrumKind.MULTIMODE_WITH_INTERNAL_LOSS)

    @property
    def multimode(self) -> bool:
        return self in (SpectrumKind.MULTIMODE, SpectrumKind.MULTIMODE_WITH_INTERNAL_LOSS)

    @classmethod
    def infer(cls, params: SystemParams) -> "SpectrumKind":
        """Richest kind supported by ``params`` (loss if ``gamma_int > 0``, multimode if finite FSR)."""
        loss = bool(np.any(np.asarray(params.cavity.gamma_int) > 0))
        multi = params.cavity.multimode
        if loss and multi:
            return cls.MULTIMODE_WITH_INTERNAL_LOSS
        if multi:
            return cls.MULTIMODE
        if loss:
            return cls.WITH_INTERNAL_LOSS
        return cls.IDEAL


def omega_h(params: SystemParams):
    """Frequency of the Fano zero of the ideal spectrum, ``2 Delta + gamma g_omega / g_gamma``."""
    return 2 * params.cavity.detuning + params.coupling_ratio


def fano_detuning(params: SystemParams):
    """Detuning ``(omega_M - gamma g_omega / g_gamma) / 2`` that puts the spectral zero at ``-omega_M``."""
    return (params.omega_M - params.coupling_ratio) / 2


def _linewidth(params: SystemParams, strict_loss: bool):
    if strict_loss:
        return params.cavity.gamma + params.cavity.gamma_int
    return params.cavity.gamma


def s_ff_parts(omega, params: SystemParams, kind: SpectrumKind = SpectrumKind.IDEAL,
               strict_loss: bool = False, literal_multimode: bool = False) -> dict:
    """Individual contributions to the normalised force spectrum.

    Returns a dict with keys ``ideal``, ``loss`` and ``multimode``; parts not
    selected by ``kind`` are zero.

    ``strict_loss`` uses the total linewidth ``gamma + gamma_int`` in every
    Lorentzian instead of the external rate alone. ``literal_multimode``
    weights the multimode term with ``omega_h`` instead of the dispersive
    ratio ``gamma g_omega / g_gamma``; the latter is what the interferometer
    expansion produces and what the ``n_L`` correction assumes.
    """
    cav, cpl = params.cavity, params.coupling
    omega = np.asarray(omega, dtype=float)
    gamma = cav.gamma
    width = _linewidth(params, strict_loss)
    photons = params.drive.photon_number
    lorentz = (width / 2) ** 2 + (omega + cav.detuning) ** 2

    amp = cpl.g_gamma * (omega + 2 * cav.detuning) + gamma * cpl.g_omega
    ideal = photons / gamma * amp**2 / lorentz

    zero = np.zeros_like(ideal)
    loss = zero
    if kind.has_loss:
        # U * [(gamma/2)^2 + (Delta + gamma g_omega/g_gamma)^2], g_gamma-free form
        weight = photons / gamma**2 * (
            (cpl.g_gamma * width / 2) ** 2 + (cpl.g_gamma * cav.detuning + gamma * cpl.g_omega) ** 2
        )
        loss = weight * cav.gamma_int / lorentz

    multi = zero
    if kind.multimode:
        if not params.cavity.multimode:
            raise ValueError(f"{kind.value} spectrum requires a finite cavity.fsr")
        if literal_multimode:
            extra = (cpl.g_gamma * np.pi * omega_h(params) * omega / cav.fsr) ** 2
        else:
            extra = (np.pi * gamma * cpl.g_omega * omega / cav.fsr) ** 2
        multi = photons / gamma * extra / lorentz

    return {"ideal": ideal, "loss": loss, "multimode": multi}


def s_ff(omega, params: SystemParams, kind: SpectrumKind = SpectrumKind.IDEAL,
         strict_loss: bool = False, literal_multimode: bool = False):
    """Normalised backaction force spectrum ``(x_zpf/hbar)^2 S_FF(omega)``."""
    parts = s_ff_parts(omega, params, kind, strict_loss, literal_multimode)
    return parts["ideal"] + parts["loss"] + parts["multimode"]


@dataclass(frozen=True)
class ForceSpectrum:
    """A force spectrum bound to one parameter set and spectrum kind."""

    params: SystemParams
    kind: SpectrumKind = SpectrumKind.IDEAL
    strict_loss: bool = False
    literal_multimode: bool = False

    def __call__(self, omega):
        return s_ff(omega, self.params, self.kind, self.strict_loss, self.literal_multimode)

    def parts(self, omega) -> dict:
        return s_ff_parts(omega, self.params, self.kind, self.strict_loss, self.literal_multimode)

    def damping(self, omega):
        """Frequency-resolved total damping ``gamma_m + S(omega) - S(-omega)``."""
        return self.params.mech.gamma_m + self(omega) - self(-np.asarray(omega))


def susceptibility(omega, gamma_M, omega_M):
    """Mechanical susceptibility ``1 / (gamma_M/2 - i (omega - omega_M))``."""
    if np.any(np.asarray(gamma_M) <= 0):
        raise InstabilityError(f"total mechanical damping gamma_M={gamma_M!r} is not positive")
    return 1.0 / (gamma_M / 2 - 1j * (np.asarray(omega) - omega_M))


def gamma_opt(params: SystemParams, kind: SpectrumKind = SpectrumKind.IDEAL, omega_M=None,
              strict_loss: bool = False, literal_multimode: bool = False):
    """Light-induced damping ``S(omega_M) - S(-omega_M)``; negative means heating."""
    if omega_M is None:
        omega_M = params.omega_M
    spec = ForceSpectrum(params, kind, strict_loss, literal_multimode)
    return spec(omega_M) - spec(-omega_M)


def total_damping(params: SystemParams, kind: SpectrumKind = SpectrumKind.IDEAL, **kw):
    """``gamma_M = gamma_m + gamma_opt``."""
    return params.mech.gamma_m + gamma_opt(params, kind, **kw)


def require_dissipative(params: SystemParams) -> None:
    if np.any(np.asarray(params.coupling.g_gamma) == 0):
        raise DegenerateCouplingError("operation requires a nonzero dissipative coupling g_gamma")

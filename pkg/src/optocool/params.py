"""Parameter containers for a driven optomechanical cavity.

All rates and frequencies are angular (rad/s, or any common angular unit).
Fields may be plain floats or numpy arrays of a common shape; every kernel in
the package broadcasts, which makes vectorised parameter draws cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import DegenerateCouplingError


def _check(condition, message: str) -> None:
    if not np.all(condition):
        raise ValueError(message)


@dataclass(frozen=True)
class CavityParams:
    """Optical mode.

    Parameters
    ----------
    gamma : float
        External (detection-port) energy decay rate.
    gamma_int : float
        Internal decay rate (absorption, scattering), ``>= 0``.
    detuning : float
        Drive detuning ``omega_L - omega_c``; negative is red.
    fsr : float
        Free spectral range; ``math.inf`` for a single-mode cavity.
    """

    gamma: float
    gamma_int: float = 0.0
    detuning: float = 0.0
    fsr: float = math.inf

    def __post_init__(self):
        _check(np.asarray(self.gamma) > 0, "cavity.gamma must be > 0")
        _check(np.asarray(self.gamma_int) >= 0, "cavity.gamma_int must be >= 0")
        _check(np.asarray(self.fsr) > 0, "cavity.fsr must be > 0")

    @property
    def multimode(self) -> bool:
        return bool(np.all(np.isfinite(self.fsr)))


@dataclass(frozen=True)
class MechParams:
    """Mechanical oscillator: bare frequency, bare damping and bath occupation."""

    omega_m: float
    gamma_m: float
    n_th: float

    def __post_init__(self):
        _check(np.asarray(self.omega_m) > 0, "mech.omega_m must be > 0")
        _check(np.asarray(self.gamma_m) > 0, "mech.gamma_m must be > 0")
        _check(np.asarray(self.n_th) >= 0, "mech.n_th must be >= 0")

    @classmethod
    def from_q(cls, omega_m, q, n_th) -> "MechParams":
        return cls(omega_m=omega_m, gamma_m=np.divide(omega_m, q), n_th=n_th)

    @property
    def q(self):
        """Quality factor ``omega_m / gamma_m``."""
        return self.omega_m / self.gamma_m


@dataclass(frozen=True)
class CouplingParams:
    """Signed dispersive (``g_omega``) and dissipative (``g_gamma``) coupling rates."""

    g_omega: float
    g_gamma: float

    def __post_init__(self):
        _check(np.isfinite(self.g_omega) & np.isfinite(self.g_gamma),
               "coupling constants must be finite")


@dataclass(frozen=True)
class DriveParams:
    """Intracavity mean photon number ``|a0|^2``."""

    photon_number: float

    def __post_init__(self):
        _check(np.asarray(self.photon_number) >= 0, "drive.photon_number must be >= 0")


@dataclass(frozen=True)
class SystemParams:
    """Complete description of the driven system.

    ``omega_M_override`` replaces the renormalised mechanical frequency; by
    default the optical spring shift is neglected and ``omega_M = omega_m``.
    """

    cavity: CavityParams
    mech: MechParams
    coupling: CouplingParams
    drive: DriveParams
    omega_M_override: Optional[float] = field(default=None)

    @property
    def omega_M(self):
        if self.omega_M_override is not None:
            return self.omega_M_override
        return self.mech.omega_m

    @property
    def u(self):
        """Dimensionless drive strength ``|a0|^2 (g_gamma / gamma)^2``."""
        return self.drive.photon_number * (self.coupling.g_gamma / self.cavity.gamma) ** 2

    @property
    def coupling_ratio(self):
        """``gamma * g_omega / g_gamma``; raises for a vanishing ``g_gamma``."""
        g_gamma = np.asarray(self.coupling.g_gamma)
        if np.any(g_gamma == 0):
            raise DegenerateCouplingError("g_gamma = 0: coupling ratio undefined")
        return self.cavity.gamma * self.coupling.g_omega / self.coupling.g_gamma

    def with_u(self, u) -> "SystemParams":
        """Copy with the photon number chosen so that ``self.u == u``."""
        g_gamma = np.asarray(self.coupling.g_gamma)
        if np.any(g_gamma == 0):
            raise DegenerateCouplingError("g_gamma = 0: U is identically zero")
        photons = u * (self.cavity.gamma / self.coupling.g_gamma) ** 2
        return replace(self, drive=DriveParams(photons))

    def with_detuning(self, detuning) -> "SystemParams":
        return replace(self, cavity=replace(self.cavity, detuning=detuning))

    def with_cavity(self, **changes) -> "SystemParams":
        return replace(self, cavity=replace(self.cavity, **changes))


def make_system(
    gamma,
    omega_m,
    q,
    n_th,
    coupling_ratio,
    u=0.0,
    detuning=None,
    g_gamma=1.0,
    gamma_int=0.0,
    fsr=math.inf,
) -> SystemParams:
    """Build a system from the dimensionless knobs used throughout the analysis.

    ``coupling_ratio`` is ``gamma * g_omega / g_gamma``. When ``detuning`` is
    omitted the Fano detuning ``(omega_m - coupling_ratio) / 2`` is used.
    """
    if detuning is None:
        detuning = (omega_m - coupling_ratio) / 2
    g_omega = coupling_ratio * g_gamma / gamma
    return SystemParams(
        cavity=CavityParams(gamma=gamma, gamma_int=gamma_int, detuning=detuning, fsr=fsr),
        mech=MechParams.from_q(omega_m, q, n_th),
        coupling=CouplingParams(g_omega=g_omega, g_gamma=g_gamma),
        drive=DriveParams(photon_number=u * (gamma / g_gamma) ** 2),
    )

"""Michelson-Sagnac interferometer as a one-sided cavity with a movable input mirror.

The beam splitter (amplitudes ``T``, ``R``) and the membrane (``t``, ``r``)
form an effective input mirror whose reflection ``rho`` and transmission
``tau`` depend on the membrane offset ``x``. Lengths are in metres,
frequencies angular (rad/s), wavenumbers in rad/m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import constants, optimize

from .errors import DarkPortError, ResonanceSingularityError
from .params import CavityParams, CouplingParams, DriveParams, MechParams, SystemParams

C_LIGHT = constants.c
UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class MsiGeometry:
    bs_T: float
    bs_R: float
    mem_t: float
    mem_r: float
    L_a: float
    l: float
    l_s: float
    x: float = 0.0

    def __post_init__(self):
        for name in ("bs_T", "bs_R", "mem_t", "mem_r"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if abs(self.bs_T**2 + self.bs_R**2 - 1) > UNITARITY_TOL:
            raise ValueError("beam splitter must satisfy T^2 + R^2 = 1")
        if abs(self.mem_t**2 + self.mem_r**2 - 1) > UNITARITY_TOL:
            raise ValueError("membrane must satisfy t^2 + r^2 = 1")
        for name in ("L_a", "l", "l_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")

    @classmethod
    def from_reflectivities(cls, bs_R, mem_r, L_a, l, l_s, x=0.0) -> "MsiGeometry":
        """Geometry with the transmissions fixed by unitarity."""
        return cls(math.sqrt(1 - bs_R**2), bs_R, math.sqrt(1 - mem_r**2), mem_r, L_a, l, l_s, x)

    @property
    def length(self) -> float:
        """Total cavity length ``L = L_a + l + l_s``."""
        return self.L_a + self.l + self.l_s


class EffectiveMirror(NamedTuple):
    rho: complex
    tau: float
    mu: float


class MsiCavity(NamedTuple):
    gamma: float
    omega_c: float
    fsr: float
    mode_index: int


@dataclass(frozen=True)
class MsiDrive:
    """Carrier frequency, intracavity photon number and zero-point amplitude (m)."""

    omega_L: float
    photon_number: float
    x_zpf: float


def effective_mirror(geom: MsiGeometry, k, x=None) -> EffectiveMirror:
    """Reflection ``rho = |rho| e^{i mu}`` and transmission ``tau`` of the BS-membrane block."""
    x = geom.x if x is None else x
    T, R, t, r = geom.bs_T, geom.bs_R, geom.mem_t, geom.mem_r
    c2, s2 = np.cos(2 * k * x), np.sin(2 * k * x)
    rho = -2 * R * T * t - (R**2 - T**2) * r * c2 + 1j * r * s2
    tau = t * (T**2 - R**2) + 2 * R * T * r * c2
    return EffectiveMirror(rho, tau, np.angle(rho))


def mirror_derivatives(geom: MsiGeometry, k, x=None):
    """Exact ``(d mu/dx, d tau/dx)``.

    ``d mu/dx = -2 k r alpha_1 / |rho|^2`` with
    ``alpha_1 = 2 t R T cos 2kx - r (T^2 - R^2)``; the ``1/|rho|^2`` factor
    tends to one for a nearly closed cavity.
    """
    x = geom.x if x is None else x
    T, R, t, r = geom.bs_T, geom.bs_R, geom.mem_t, geom.mem_r
    rho = effective_mirror(geom, k, x).rho
    dmu = -2 * k * r * _alpha1(geom, k, x) / np.abs(rho) ** 2
    dtau = -4 * k * r * R * T * np.sin(2 * k * x)
    return dmu, dtau


def _alpha1(geom, k, x):
    T, R, t, r = geom.bs_T, geom.bs_R, geom.mem_t, geom.mem_r
    return 2 * t * R * T * np.cos(2 * k * x) - r * (T**2 - R**2)


def _alpha2(geom, k, x):
    T, R = geom.bs_T, geom.bs_R
    return np.cos(2 * k * x) + 1j * (T**2 - R**2) * np.sin(2 * k * x)


def _require_open(tau):
    # |tau| at roundoff level is a dark port, not a tiny decay rate
    if np.any(np.abs(np.asarray(tau)) <= UNITARITY_TOL):
        raise DarkPortError("effective mirror transmission tau = 0: no input coupling")


def cavity_from_msi(geom: MsiGeometry, k, c: float = C_LIGHT) -> MsiCavity:
    """Decay rate, resonance nearest the drive ``c k``, and free spectral range ``pi c / L``."""
    m = effective_mirror(geom, k)
    _require_open(m.tau)
    L = geom.length
    gamma = m.tau**2 * c / (2 * L)
    # nearest N; exact half-way ties go to the lower resonance
    n_star = (2 * k * L + m.mu) / (2 * math.pi)
    n = math.ceil(n_star - 0.5)
    omega_c = c / (2 * L) * (2 * math.pi * n - m.mu)
    return MsiCavity(gamma, omega_c, math.pi * c / L, n)


def couplings_from_msi(geom: MsiGeometry, k, x_zpf, c: float = C_LIGHT) -> CouplingParams:
    """``g_omega = (d mu/dx) (c/2L) x_zpf`` and ``g_gamma = -tau (d tau/dx) (c/2L) x_zpf``."""
    m = effective_mirror(geom, k)
    _require_open(m.tau)
    dmu, dtau = mirror_derivatives(geom, k)
    scale = c / (2 * geom.length) * x_zpf
    return CouplingParams(g_omega=dmu * scale, g_gamma=-m.tau * dtau * scale)


def detuning(geom: MsiGeometry, omega_L, c: float = C_LIGHT):
    """``omega_L - omega_c`` for the resonance nearest the carrier."""
    k = omega_L / c
    m = effective_mirror(geom, k)
    L = geom.length
    cav = cavity_from_msi(geom, k, c)
    # c/2L * (2kL + mu - 2 pi N), reduced before scaling to keep precision
    phase = math.fmod(2 * k * L, 2 * math.pi) + m.mu - math.fmod(2 * math.pi * cav.mode_index, 2 * math.pi)
    phase = (phase + math.pi) % (2 * math.pi) - math.pi
    return c / (2 * L) * phase


def system_from_msi(geom: MsiGeometry, drive: MsiDrive, mech: MechParams,
                    gamma_int: float = 0.0, c: float = C_LIGHT) -> SystemParams:
    """Effective single-mode parameters (including the FSR) of the interferometer."""
    k = drive.omega_L / c
    cav = cavity_from_msi(geom, k, c)
    return SystemParams(
        cavity=CavityParams(gamma=cav.gamma, gamma_int=gamma_int,
                            detuning=detuning(geom, drive.omega_L, c), fsr=cav.fsr),
        mech=mech,
        coupling=couplings_from_msi(geom, k, drive.x_zpf, c),
        drive=DriveParams(drive.photon_number),
    )


def n_factor_exact(omega, geom: MsiGeometry, drive: MsiDrive, c: float = C_LIGHT):
    """Interference factor ``N(omega)`` of the exact force spectrum.

    Phases are referenced to the cavity resonance so that no large
    ``omega_L L / c`` argument is ever formed.
    """
    omega = np.asarray(omega, dtype=float)
    k = drive.omega_L / c
    x, L = geom.x, geom.length
    m = effective_mirror(geom, k)
    dl = detuning(geom, drive.omega_L, c) * L / c
    wl = omega * L / c
    a1, a2 = _alpha1(geom, k, x), _alpha2(geom, k, x)
    # exp(2i(omega_L+omega)L/c) = exp(i(2(Delta+omega)L/c - mu)) modulo 2 pi
    sideband = np.exp(1j * (2 * (dl + wl) - m.mu))
    carrier_conj = np.exp(1j * (m.mu - 2 * dl))
    return a1 * (1 + np.exp(2j * wl)) + a2 * sideband + np.conj(a2) * carrier_conj


def n_factor_reduced(omega, geom: MsiGeometry, drive: MsiDrive, c: float = C_LIGHT):
    """Lowest-order form ``(2L/c)^2 / x_zpf * c gamma/(2 omega_L r) [g_w (1 + i L w/c) + g_g (2D + w)/gamma]``."""
    omega = np.asarray(omega, dtype=float)
    k = drive.omega_L / c
    L = geom.length
    cav = cavity_from_msi(geom, k, c)
    cpl = couplings_from_msi(geom, k, drive.x_zpf, c)
    delta = detuning(geom, drive.omega_L, c)
    pref = (2 * L / c) ** 2 / drive.x_zpf * c * cav.gamma / (2 * drive.omega_L * geom.mem_r)
    return pref * (cpl.g_omega * (1 + 1j * L * omega / c) + cpl.g_gamma * (2 * delta + omega) / cav.gamma)


def s_ff_exact_msi(omega, geom: MsiGeometry, drive: MsiDrive, c: float = C_LIGHT):
    """Normalised force spectrum of the interferometer from the input-output solution.

    ``(x_zpf omega_L |a0| / L)^2 (r^2/gamma) |N|^2 / |1 - |rho| e^{i phi}|^2``
    with ``phi`` the round-trip phase detuning ``2 (Delta + omega) L / c``.
    Reduces to the multimode single-cavity spectrum for ``tau^2 << 1``.
    """
    omega = np.asarray(omega, dtype=float)
    k = drive.omega_L / c
    L = geom.length
    m = effective_mirror(geom, k)
    _require_open(m.tau)
    gamma = m.tau**2 * c / (2 * L)
    phi = 2 * (detuning(geom, drive.omega_L, c) + omega) * L / c
    den = np.abs(1 - np.abs(m.rho) * np.exp(1j * phi)) ** 2
    if np.any(den == 0):
        raise ResonanceSingularityError("round-trip factor vanishes (lossless resonance)")
    num = np.abs(n_factor_exact(omega, geom, drive, c)) ** 2
    pref = (drive.x_zpf * drive.omega_L / L) ** 2 * drive.photon_number * geom.mem_r**2 / gamma
    return pref * num / den


def position_for_ratio(geom: MsiGeometry, k, ratio, c: float = C_LIGHT, samples: int = 4001):
    """Membrane offset ``x`` giving ``gamma g_omega / g_gamma = ratio``, nearest ``geom.x``.

    ``gamma g_omega - ratio g_gamma`` carries an overall factor ``tau``; with
    it removed the remaining ``tau (c/2L) d mu/dx + ratio d tau/dx`` is
    continuous and has no spurious roots at dark ports. Its roots are
    bracketed on one optical period of ``x`` and refined with Brent's method.
    """
    period = math.pi / k
    half_rate = c / (2 * geom.length)

    def h(x):
        m = effective_mirror(geom, k, x)
        dmu, dtau = mirror_derivatives(geom, k, x)
        return m.tau * half_rate * dmu + ratio * dtau

    xs = geom.x + np.linspace(-period / 2, period / 2, samples)
    vals = np.array([h(x) for x in xs])
    roots = []
    for a, b, fa, fb in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if fa == 0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(optimize.brentq(h, a, b, xtol=1e-13 * period, maxiter=200))
    good = []
    for x in roots:
        m = effective_mirror(geom, k, x)
        _, dtau = mirror_derivatives(geom, k, x)
        if abs(m.tau) > UNITARITY_TOL and dtau != 0:
            good.append(x)
    if not good:
        raise ValueError(f"no membrane position realises coupling ratio {ratio}")
    return min(good, key=lambda x: abs(x - geom.x))


def _at(geom: MsiGeometry, x) -> MsiGeometry:
    return MsiGeometry(geom.bs_T, geom.bs_R, geom.mem_t, geom.mem_r, geom.L_a, geom.l, geom.l_s, x)


def carrier_for_detuning(geom: MsiGeometry, omega_guess, delta, c: float = C_LIGHT, iterations: int = 8):
    """Carrier frequency near ``omega_guess`` whose detuning from the nearest resonance is ``delta``.

    The resonance moves with the carrier only through the weak ``k``
    dependence of ``mu``, so a few fixed-point steps converge.
    """
    omega = omega_guess
    for _ in range(iterations):
        omega = omega - detuning(geom, omega, c) + delta
    return omega

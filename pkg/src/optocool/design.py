"""Operating points, applicability checks and tolerance budgets."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import optimize as _opt

from . import spectra
from .cooling import (
    beta_factor,
    dispersive_limit,
    gain,
    gain_max,
    n_analytic,
    n_diss_limit,
    n_fano,
)
from .params import CouplingParams, DriveParams, SystemParams

# margins >= PASS_MARGIN count as "much smaller", WARN_MARGIN..PASS_MARGIN as marginal
PASS_MARGIN = 10.0
WARN_MARGIN = 3.0


def fano_detuning(params: SystemParams):
    """Detuning ``(omega_M - gamma g_omega/g_gamma) / 2`` at which ``omega_h = omega_M``."""
    return spectra.fano_detuning(params)


@dataclass(frozen=True)
class OperatingPoint:
    detuning_star: float
    u0: float
    photon_number: float
    ratio_star: float
    predicted_n: float
    gain: float
    ratio_fixed: bool = False
    notes: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["notes"] = list(self.notes)
        return out


def optimize(params: SystemParams, ratio_fixed: bool = False,
             exact_minimization: bool = False) -> OperatingPoint:
    """Optimal detuning, drive and (unless ``ratio_fixed``) coupling ratio.

    With a free ratio the dispersive coupling is re-chosen so that
    ``gamma g_omega/g_gamma = 3 omega_M`` (``g_gamma`` kept), which maximises
    the damping gain to ``G0`` and puts the optimum at ``Delta = -omega_M``.
    With a fixed ratio only the detuning and drive are optimised and the
    reduced gain ``G`` enters.
    """
    spectra.require_dissipative(params)
    notes = []
    if ratio_fixed:
        target = params
    else:
        target = at_optimal_ratio(params)
    g = gain(target)
    n_pred, u0 = n_diss_limit(target, exact_minimization)
    ratio = target.coupling_ratio
    gamma, omega_M = params.cavity.gamma, params.omega_M
    g_ratio = params.coupling.g_omega / params.coupling.g_gamma
    if gamma >= 10 * omega_M and abs(g_ratio) <= 0.1:
        notes.append(
            f"bad-cavity, dissipation-dominated: G/G0 = {gain(params) / gain_max(params):.6g} "
            "at the supplied ratio, so the limit holds without tuning the ratio"
        )
    photons = u0 * (gamma / params.coupling.g_gamma) ** 2
    return OperatingPoint(
        detuning_star=fano_detuning(target),
        u0=u0,
        photon_number=photons,
        ratio_star=ratio,
        predicted_n=n_pred,
        gain=g,
        ratio_fixed=ratio_fixed,
        notes=tuple(notes),
    )


def at_optimal_ratio(params: SystemParams) -> SystemParams:
    """Copy with ``g_omega`` set to give the ratio ``3 omega_M`` (``g_gamma`` unchanged)."""
    g_gamma = params.coupling.g_gamma
    g_omega = 3 * params.omega_M * g_gamma / params.cavity.gamma
    return replace(params, coupling=CouplingParams(g_omega=g_omega, g_gamma=g_gamma))


def apply(params: SystemParams, point: OperatingPoint) -> SystemParams:
    """The system driven at ``point``."""
    if not point.ratio_fixed:
        params = at_optimal_ratio(params)
    params = params.with_detuning(point.detuning_star)
    return replace(params, drive=DriveParams(point.photon_number))


def _golden(f, x0, step, xtol):
    res = _opt.minimize_scalar(f, bracket=(x0, x0 + step), method="golden",
                               options={"xtol": xtol})
    return res.x


def minimize_power(n_th, g, xtol=1e-10):
    """Numerical minimiser of ``n_th/(1+GU) + U`` over ``U`` (golden section in ``log U``)."""
    x0 = math.log(max(math.sqrt(n_th / g), 1e-300))
    x = _golden(lambda s: n_fano(math.exp(s), n_th, g), x0, 0.1, xtol)
    return math.exp(x)


def numeric_optimum(params: SystemParams, xtol: float = 1e-10, max_sweeps: int = 60):
    """Minimise the closed-form occupation over (detuning, drive) by coordinate descent.

    Golden-section line searches alternate between ``Delta / omega_M`` and
    ``log U``, starting from the closed-form optimum. Returns
    ``(detuning, u, n)``.
    """
    point = optimize(params, ratio_fixed=True)
    omega_M = params.omega_M
    d, s = point.detuning_star / omega_M, math.log(point.u0)

    def n_at(d_, s_):
        p = params.with_detuning(d_ * omega_M).with_u(math.exp(s_))
        return float(n_analytic(p).n_total)

    for _ in range(max_sweeps):
        d_new = _golden(lambda v: n_at(v, s), d, 1e-3, xtol)
        s_new = _golden(lambda v: n_at(d_new, v), s, 1e-2, xtol)
        done = abs(d_new - d) <= 10 * xtol * max(1.0, abs(d)) and abs(s_new - s) <= 10 * xtol * max(1.0, abs(s))
        d, s = d_new, s_new
        if done:
            break
    return d * omega_M, math.exp(s), n_at(d, s)


def _status(margin) -> str:
    if margin >= PASS_MARGIN:
        return "pass"
    if margin >= WARN_MARGIN:
        return "warn"
    return "fail"


@dataclass(frozen=True)
class ValidityReport:
    """Margins of the weak-coupling and weak-damping conditions.

    Each margin is "how many times smaller" the small side is; a condition
    holds at margin >= 10.
    """

    weak_coupling_margin: float
    underdamped_margin: float
    criterion_1: float
    criterion_2: float
    limit_vs_dispersive: float
    limit_vs_dispersive_weighted: float
    gamma_opt: float
    gamma_M: float
    flags: dict

    @property
    def holds(self) -> bool:
        return all(v == "pass" for v in self.flags.values())

    def as_dict(self) -> dict:
        out = asdict(self)
        out["holds"] = self.holds
        return out


def validity(params: SystemParams) -> ValidityReport:
    """Applicability of the weak-coupling theory at the given drive and settings.

    ``criterion_1``/``criterion_2`` compare ``n_th/Q`` with
    ``(gamma/omega_M)^3 / 16`` and ``(gamma/omega_M) / 16``; the two
    ``limit_vs_dispersive`` margins compare the optimal-ratio limit with
    ``2 n_disp`` and ``2 n_disp omega_M/gamma``. The latter four depend only
    on the system, not on the drive.
    """
    gamma, omega_M = params.cavity.gamma, params.omega_M
    g_opt = float(spectra.gamma_opt(params))
    gamma_M = params.mech.gamma_m + g_opt
    weak = gamma / g_opt if g_opt > 0 else math.inf
    under = omega_M / gamma_M if gamma_M > 0 else 0.0
    n_over_q = params.mech.n_th * params.mech.gamma_m / omega_M
    ratio = gamma / omega_M
    c1 = ratio**3 / 16 / n_over_q if n_over_q > 0 else math.inf
    c2 = ratio / 16 / n_over_q if n_over_q > 0 else math.inf
    n_disp = dispersive_limit(gamma, omega_M)
    n_diss = 0.5 * math.sqrt(n_over_q * ratio)
    lim = 2 * n_disp / n_diss if n_diss > 0 else math.inf
    lim_w = lim * omega_M / gamma
    margins = {
        "weak_coupling": weak,
        "underdamped": under,
        "criterion_1": c1,
        "criterion_2": c2,
        "limit_vs_dispersive": lim,
        "limit_vs_dispersive_weighted": lim_w,
    }
    return ValidityReport(
        weak_coupling_margin=weak,
        underdamped_margin=under,
        criterion_1=c1,
        criterion_2=c2,
        limit_vs_dispersive=lim,
        limit_vs_dispersive_weighted=lim_w,
        gamma_opt=g_opt,
        gamma_M=gamma_M,
        flags={k: _status(v) for k, v in margins.items()},
    )


@dataclass(frozen=True)
class ToleranceBudget:
    """Largest imperfections that keep each correction within ``target_excess * n_diss``."""

    max_rel_detuning_error: float
    max_rel_power_error: float
    max_rel_ratio_error: float
    max_loss_ratio: float
    max_fsr_ratio: float
    target_excess: float
    n_diss: float

    def as_dict(self) -> dict:
        return asdict(self)


def tolerance_budget(params: SystemParams, target_excess: float = 1.0) -> ToleranceBudget:
    """Invert each correction for an allowed excess ``target_excess * n_diss``.

    The detuning bound is relative to the detuning in force. The power bound
    is the exact smaller root of ``n(U0 (1 + e)) - n(U0) = target * n_diss``
    on either side of ``U0``; the others invert the closed-form corrections.
    """
    if not 0 < target_excess <= 1:
        raise ValueError("target_excess must lie in (0, 1]")
    gamma, omega_M = params.cavity.gamma, params.omega_M
    g = gain(params)
    n_diss, u0 = n_diss_limit(params)
    n_th = params.mech.n_th
    allowed = target_excess * n_diss
    half = (gamma / 2) ** 2
    lor = half + 4 * omega_M**2

    base = n_fano(u0, n_th, g)

    def excess(e):
        return n_fano(u0 * (1 + e), n_th, g) - base - allowed

    hi = 1.0
    while excess(hi) < 0:
        hi *= 2
    up = _opt.brentq(excess, 0.0, hi, xtol=1e-15, rtol=1e-14)
    down = -_opt.brentq(excess, -1.0 + 1e-15, 0.0, xtol=1e-15, rtol=1e-14) if excess(-1.0 + 1e-15) > 0 else 1.0

    return ToleranceBudget(
        max_rel_detuning_error=math.sqrt(allowed * lor / half),
        max_rel_power_error=min(up, down),
        max_rel_ratio_error=math.sqrt(2 * target_excess) * gamma / (3 * omega_M),
        max_loss_ratio=allowed / (beta_factor(gamma, omega_M) * dispersive_limit(gamma, omega_M)),
        max_fsr_ratio=2 / (3 * math.pi) * math.sqrt(allowed * lor / half),
        target_excess=target_excess,
        n_diss=n_diss,
    )

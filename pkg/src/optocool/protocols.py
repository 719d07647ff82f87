"""Dissipative-assisted cooling against dispersive sideband cooling and feedback cooling.

Nothing here is new physics; every number is assembled from
:mod:`optocool.cooling` and :mod:`optocool.design`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

from .cooling import beta_factor, dispersive_limit, n_diss_optimal_ratio
from .design import apply, optimize, validity
from .params import MechParams, SystemParams

N_IMP_CONSISTENCY = 0.10


@dataclass(frozen=True)
class FeedbackParams:
    """Detection efficiency and (optionally) the imperfection noise quanta of a feedback loop."""

    eta_det: float
    n_imp: float | None = None

    def __post_init__(self):
        if not 0 < self.eta_det <= 1:
            raise ValueError(f"eta_det must lie in (0, 1], got {self.eta_det}")
        if self.n_imp is not None and not self.n_imp >= 0:
            raise ValueError(f"n_imp must be >= 0, got {self.n_imp}")


def imperfection_quanta(params: SystemParams) -> float:
    """``gamma gamma_m / (64 |a0|^2 g_omega^2)`` for a dispersive position readout."""
    photons = params.drive.photon_number
    g_omega = params.coupling.g_omega
    if photons <= 0 or g_omega == 0:
        raise ValueError("computing n_imp needs a nonzero drive and dispersive coupling")
    return params.cavity.gamma * params.mech.gamma_m / (64 * photons * g_omega**2)


def resolve_n_imp(fb: FeedbackParams, params: SystemParams | None = None) -> float:
    """The ``n_imp`` to use: the supplied value wins over the computed one.

    When both are available and differ by more than 10 % a ``UserWarning``
    is issued.
    """
    computed = None
    if params is not None:
        try:
            computed = imperfection_quanta(params)
        except ValueError:
            computed = None
    if fb.n_imp is None:
        if computed is None:
            raise ValueError("n_imp not supplied and cannot be computed from the parameters")
        return computed
    if computed is not None and fb.n_imp > 0 and abs(computed - fb.n_imp) > N_IMP_CONSISTENCY * fb.n_imp:
        warnings.warn(
            f"supplied n_imp={fb.n_imp:.3g} differs from the computed {computed:.3g}; using the supplied value",
            UserWarning,
            stacklevel=2,
        )
    return fb.n_imp


def detector_limit(eta_det: float) -> float:
    """``0.5 (sqrt(1/eta) - 1)``."""
    return 0.5 * (math.sqrt(1 / eta_det) - 1)


def feedback_limit(mech: MechParams, fb: FeedbackParams, params: SystemParams | None = None) -> float:
    """Feedback cooling floor ``n_det + (4/sqrt(eta)) n_th n_imp``."""
    n_imp = resolve_n_imp(fb, params)
    return detector_limit(fb.eta_det) + 4 / math.sqrt(fb.eta_det) * mech.n_th * n_imp


@dataclass(frozen=True)
class ProtocolEntry:
    n_limit: float
    photon_number: float
    notes: tuple = ()


@dataclass(frozen=True)
class ComparisonReport:
    protocols: dict
    thresholds: dict
    validity: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "protocols": {k: {**asdict(v), "notes": list(v.notes)} for k, v in self.protocols.items()},
            "thresholds": dict(self.thresholds),
            "validity": dict(self.validity),
        }


def photon_budget(params: SystemParams) -> dict:
    """Intracavity photon numbers of the three reference operating points.

    ``dissipative_optimum`` reaches ``n_diss`` at the optimal ratio;
    ``dispersive_2ndisp`` and ``dissipative_2ndisp`` are what the dispersive
    and the dissipative protocol need to reach ``2 n_disp``. ``gain_ratio`` is
    their quotient, ``(1/2 + 8 (omega_M/gamma)^2) (g_gamma/g_omega)^2``, which
    tends to ``8 (omega_M/gamma)^2`` in the resolved-sideband regime when
    ``g_omega = g_gamma``.
    """
    gamma, omega_M = params.cavity.gamma, params.omega_M
    cpl = params.coupling
    n_over_q = params.mech.n_th * params.mech.gamma_m / omega_M
    point = optimize(params)
    out = {
        "dissipative_optimum": float(point.photon_number),
        "dispersive_2ndisp": math.inf,
        "dissipative_2ndisp": float(n_over_q / 2 * (omega_M / gamma) * (gamma / cpl.g_gamma) ** 2),
        "gain_ratio": math.inf,
        "resolved_sideband_gain": 8 * (omega_M / gamma) ** 2,
    }
    if cpl.g_omega != 0:
        lor = (gamma / 2) ** 2 + 4 * omega_M**2
        out["dispersive_2ndisp"] = float(n_over_q * (omega_M / gamma) * lor / gamma**2 * (gamma / cpl.g_omega) ** 2)
        out["gain_ratio"] = out["dispersive_2ndisp"] / out["dissipative_2ndisp"]
    return out


def compare(params: SystemParams, fb: FeedbackParams) -> ComparisonReport:
    """Cooling floors, photon numbers and the internal-loss threshold side by side."""
    gamma, omega_M = params.cavity.gamma, params.omega_M
    n_disp = dispersive_limit(gamma, omega_M)
    n_diss = float(n_diss_optimal_ratio(params))
    budget = photon_budget(params)
    # the cooling drive is not the feedback readout, so only fill a missing n_imp from it
    n_imp = resolve_n_imp(fb, params if fb.n_imp is None else None)
    n_det = detector_limit(fb.eta_det)
    n_fb = feedback_limit(params.mech, FeedbackParams(fb.eta_det, n_imp))

    report = validity(apply(params, optimize(params)))
    diss_notes = [f"{k}: {v}" for k, v in report.flags.items() if v != "pass"]
    disp_notes = []
    if not n_disp > n_diss:
        disp_notes.append("n_disp does not exceed n_diss; dissipative advantage absent")
    fb_notes = [f"detector-limited: n_det = {n_det:.6g}"] if n_det >= 4 / math.sqrt(fb.eta_det) * params.mech.n_th * n_imp else []

    protocols = {
        "dissipative": ProtocolEntry(n_diss, budget["dissipative_optimum"], tuple(diss_notes)),
        "dispersive": ProtocolEntry(n_disp, budget["dispersive_2ndisp"], tuple(disp_notes)),
        "feedback": ProtocolEntry(n_fb, float(params.drive.photon_number), tuple(fb_notes)),
    }
    thresholds = {
        "loss_ratio_bound": n_diss / (2 * n_disp),
        "loss_ratio_bound_beta": n_diss / (beta_factor(gamma, omega_M) * n_disp),
        "n_det": n_det,
        "n_imp": n_imp,
        "gain_ratio": budget["gain_ratio"],
        "dissipative_2ndisp_photons": budget["dissipative_2ndisp"],
    }
    return ComparisonReport(protocols, thresholds, {k: v for k, v in report.flags.items()})


"""Run configuration: flat ``key = value`` text with dotted paths.

Example::

    # bad-cavity membrane setup
    units = hertz
    cavity.gamma = 16e5
    cavity.detuning = fano      # put the spectral zero on the mechanical sideband
    mech.omega_m = 1e5
    mech.q = 1e9
    mech.n_th = 1e5
    coupling.ratio = 3e5        # gamma g_omega / g_gamma
    drive.u = optimal

``:`` works as separator too and ``#`` starts a comment. Frequencies are
angular unless ``units = hertz``, in which case every frequency-valued key
is multiplied by ``2 pi`` here, once, and nowhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .cooling import Deviations, QuadratureConfig, n_diss_limit
from .errors import ConfigError, PhysicsDomainError
from .msi import (
    C_LIGHT,
    MsiDrive,
    MsiGeometry,
    carrier_for_detuning,
    position_for_ratio,
    system_from_msi,
)
from .params import CavityParams, CouplingParams, DriveParams, MechParams, SystemParams
from .protocols import FeedbackParams
from .spectra import SpectrumKind

FREQUENCY_KEYS = frozenset({
    "cavity.gamma", "cavity.gamma_int", "cavity.detuning", "cavity.fsr",
    "mech.omega_m", "mech.gamma_m",
    "coupling.g_omega", "coupling.g_gamma", "coupling.ratio",
    "deviations.d_detuning",
    "msi.omega_L", "msi.ratio", "msi.detuning", "msi.gamma_int",
})
NUMERIC_KEYS = FREQUENCY_KEYS | frozenset({
    "cavity.gamma_int_ratio",
    "mech.q", "mech.n_th",
    "drive.photon_number", "drive.u",
    "deviations.d_power_rel", "deviations.d_ratio_rel",
    "feedback.eta_det", "feedback.n_imp",
    "sweep.start", "sweep.stop", "sweep.count",
    "quadrature.rel_tol", "quadrature.peak_window_halfwidth", "quadrature.tail_extent",
    "quadrature.max_subdivisions",
    "msi.bs_R", "msi.bs_T", "msi.mem_r", "msi.mem_t", "msi.L_a", "msi.l", "msi.l_s", "msi.x",
    "msi.wavelength", "msi.photon_number", "msi.x_zpf", "msi.samples",
    "analysis.target_excess",
})
TEXT_KEYS = frozenset({
    "units", "sweep.path", "sweep.scale", "analysis.kind",
    "quadrature.frequency_dependent_damping", "analysis.ratio_fixed",
})
# keys that may also hold a keyword instead of a number
KEYWORDS = {"cavity.detuning": {"fano"}, "drive.u": {"optimal"}, "cavity.fsr": {"inf"}}

SYSTEM_SECTIONS = ("cavity", "coupling", "drive")
MAX_SWEEP = 10_000_000


def _parse_value(key: str, text: str):
    if key in TEXT_KEYS:
        return text
    if text in KEYWORDS.get(key, ()):
        return text if text != "inf" else math.inf
    if key not in NUMERIC_KEYS:
        raise ConfigError(f"unknown key {key!r}")
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if math.isnan(value):
        raise ConfigError(f"{key}: NaN is not allowed")
    return value


def parse_text(text: str) -> dict:
    """Parse config text into a canonical dict with all frequencies angular."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        seps = [i for i in (line.find("="), line.find(":")) if i >= 0]
        if not seps:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        i = min(seps)
        key, val = line[:i].strip(), line[i + 1:].strip()
        if not key or not val:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, val)

    units = values.pop("units", "angular")
    if units not in ("angular", "hertz"):
        raise ConfigError(f"units must be 'angular' or 'hertz', got {units!r}")
    if units == "hertz":
        for key in list(values):
            if key in FREQUENCY_KEYS and isinstance(values[key], float):
                values[key] = 2 * math.pi * values[key]
        if values.get("sweep.path") in FREQUENCY_KEYS:
            for key in ("sweep.start", "sweep.stop"):
                if key in values:
                    values[key] = 2 * math.pi * values[key]
    return values


def load(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_text(text)


@dataclass(frozen=True)
class SweepSpec:
    path: str
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.path not in NUMERIC_KEYS or self.path.startswith(("sweep.", "analysis.", "quadrature.")):
            raise ConfigError(f"sweep.path {self.path!r} is not a sweepable numeric key")
        if not 2 <= self.count <= MAX_SWEEP:
            raise ConfigError(f"sweep.count must lie in [2, {MAX_SWEEP}]")
        if self.scale not in ("linear", "log"):
            raise ConfigError("sweep.scale must be 'linear' or 'log'")
        if self.scale == "log" and not (self.start > 0 and self.stop > 0):
            raise ConfigError("log sweeps need positive start and stop")

    def grid(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class MsiSetup:
    geometry: MsiGeometry
    drive: MsiDrive
    mech: MechParams
    gamma_int: float = 0.0
    samples: int = 21


@dataclass(frozen=True)
class RunConfig:
    values: dict
    system: Optional[SystemParams] = None
    msi: Optional[MsiSetup] = None
    deviations: Optional[Deviations] = None
    feedback: Optional[FeedbackParams] = None
    sweep: Optional[SweepSpec] = None
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    kind: Optional[SpectrumKind] = None
    ratio_fixed: bool = False
    target_excess: float = 1.0

    @property
    def params(self) -> SystemParams:
        return self.system

    def spectrum_kind(self) -> SpectrumKind:
        if self.kind is not None:
            return self.kind
        return SpectrumKind.infer(self.system)


def _section(values: dict, name: str) -> dict:
    prefix = name + "."
    return {k[len(prefix):]: v for k, v in values.items() if k.startswith(prefix)}


def _bool(key: str, text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {text!r}")


def _count(key: str, value: float) -> int:
    if not math.isfinite(value) or value != int(value):
        raise ConfigError(f"{key} must be an integer")
    return int(value)


def _mech(values: dict) -> MechParams:
    m = _section(values, "mech")
    for key in ("omega_m", "n_th"):
        if key not in m:
            raise ConfigError(f"mech.{key} is required")
    if ("q" in m) == ("gamma_m" in m):
        raise ConfigError("give exactly one of mech.q and mech.gamma_m")
    if "q" in m:
        return MechParams.from_q(m["omega_m"], m["q"], m["n_th"])
    return MechParams(m["omega_m"], m["gamma_m"], m["n_th"])


def _system(values: dict, exact_min: bool) -> SystemParams:
    cav = _section(values, "cavity")
    if "gamma" not in cav:
        raise ConfigError("cavity.gamma is required")
    gamma = cav["gamma"]
    if "gamma_int" in cav and "gamma_int_ratio" in cav:
        raise ConfigError("give at most one of cavity.gamma_int and cavity.gamma_int_ratio")
    gamma_int = cav.get("gamma_int", cav.get("gamma_int_ratio", 0.0) * gamma)
    mech = _mech(values)

    cpl = _section(values, "coupling")
    if "ratio" in cpl:
        if "g_omega" in cpl:
            raise ConfigError("give coupling.ratio or coupling.g_omega, not both")
        g_gamma = cpl.get("g_gamma", 1.0)
        coupling = CouplingParams(cpl["ratio"] * g_gamma / gamma, g_gamma)
    elif "g_omega" in cpl and "g_gamma" in cpl:
        coupling = CouplingParams(cpl["g_omega"], cpl["g_gamma"])
    else:
        raise ConfigError("coupling needs coupling.ratio or both coupling.g_omega and coupling.g_gamma")

    detuning = cav.get("detuning", "fano")
    params = SystemParams(
        cavity=CavityParams(gamma=gamma, gamma_int=gamma_int, detuning=0.0, fsr=cav.get("fsr", math.inf)),
        mech=mech,
        coupling=coupling,
        drive=DriveParams(0.0),
    )
    if detuning == "fano":
        detuning = (params.omega_M - params.coupling_ratio) / 2
    params = params.with_detuning(detuning)

    drive = _section(values, "drive")
    if "u" in drive and "photon_number" in drive:
        raise ConfigError("give drive.u or drive.photon_number, not both")
    if drive.get("u") == "optimal":
        params = params.with_u(n_diss_limit(params, exact_min)[1])
    elif "u" in drive:
        params = params.with_u(drive["u"])
    elif "photon_number" in drive:
        params = SystemParams(params.cavity, params.mech, params.coupling, DriveParams(drive["photon_number"]))
    return params


def _msi(values: dict) -> MsiSetup:
    m = _section(values, "msi")
    for key in ("mem_r", "L_a", "l", "l_s", "x_zpf"):
        if key not in m:
            raise ConfigError(f"msi.{key} is required")
    if "bs_R" in m:
        bs_R = m["bs_R"]
        bs_T = m.get("bs_T", math.sqrt(max(0.0, 1 - bs_R**2)))
    elif "bs_T" in m:
        bs_T = m["bs_T"]
        bs_R = math.sqrt(max(0.0, 1 - bs_T**2))
    else:
        bs_T = bs_R = math.sqrt(0.5)
    mem_r = m["mem_r"]
    mem_t = m.get("mem_t", math.sqrt(max(0.0, 1 - mem_r**2)))
    geom = MsiGeometry(bs_T, bs_R, mem_t, mem_r, m["L_a"], m["l"], m["l_s"], m.get("x", 0.0))

    if ("omega_L" in m) == ("wavelength" in m):
        raise ConfigError("give exactly one of msi.omega_L and msi.wavelength")
    omega_L = m["omega_L"] if "omega_L" in m else 2 * math.pi * C_LIGHT / m["wavelength"]
    if "ratio" in m and "x" in m:
        raise ConfigError("give msi.x or msi.ratio, not both")
    carrier = omega_L
    # position and carrier depend on each other weakly; alternate until both settle
    for _ in range(3 if "ratio" in m else 1):
        if "ratio" in m:
            x = position_for_ratio(geom, carrier / C_LIGHT, m["ratio"])
            geom = MsiGeometry(bs_T, bs_R, mem_t, mem_r, geom.L_a, geom.l, geom.l_s, x)
        if "detuning" in m:
            carrier = carrier_for_detuning(geom, omega_L, m["detuning"])
    omega_L = carrier
    drive = MsiDrive(omega_L, m.get("photon_number", 0.0), m["x_zpf"])
    samples = _count("msi.samples", m.get("samples", 21))
    if samples < 1:
        raise ConfigError("msi.samples must be >= 1")
    return MsiSetup(geom, drive, _mech(values), m.get("gamma_int", 0.0), samples)


def build(values: dict, exact_min: bool = False, require_system: bool = True) -> RunConfig:
    """Validate a canonical dict and assemble the run configuration.

    Physics-domain errors (for instance no cooling at ``drive.u = optimal``)
    propagate unchanged; everything else becomes :class:`ConfigError`.
    """
    try:
        return _build(values, exact_min, require_system)
    except (ConfigError, PhysicsDomainError):
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _build(values: dict, exact_min: bool, require_system: bool) -> RunConfig:
    has_system = any(k.split(".")[0] in SYSTEM_SECTIONS for k in values)
    has_msi = any(k.startswith("msi.") for k in values)
    if has_system and has_msi:
        raise ConfigError("config gives both a cavity system and an msi geometry; use one")
    if require_system and not (has_system or has_msi):
        raise ConfigError("config must describe a system (cavity.*) or an interferometer (msi.*)")

    system = msi = None
    if has_msi:
        msi = _msi(values)
        system = system_from_msi(msi.geometry, msi.drive, msi.mech, msi.gamma_int)
    elif has_system:
        system = _system(values, exact_min)

    dev = _section(values, "deviations")
    deviations = Deviations(**dev) if dev else None

    fb = _section(values, "feedback")
    feedback = None
    if fb:
        if "eta_det" not in fb:
            raise ConfigError("feedback.eta_det is required")
        feedback = FeedbackParams(fb["eta_det"], fb.get("n_imp"))

    sw = _section(values, "sweep")
    sweep = None
    if sw:
        for key in ("path", "start", "stop", "count"):
            if key not in sw:
                raise ConfigError(f"sweep.{key} is required")
        sweep = SweepSpec(sw["path"], sw["start"], sw["stop"], _count("sweep.count", sw["count"]),
                          sw.get("scale", "linear"))

    q = _section(values, "quadrature")
    if "max_subdivisions" in q:
        q["max_subdivisions"] = _count("quadrature.max_subdivisions", q["max_subdivisions"])
    if "frequency_dependent_damping" in q:
        q["frequency_dependent_damping"] = _bool("quadrature.frequency_dependent_damping",
                                                 q["frequency_dependent_damping"])
    quad = QuadratureConfig(**q)

    an = _section(values, "analysis")
    kind = None
    if an.get("kind", "auto") != "auto":
        try:
            kind = SpectrumKind(an["kind"])
        except ValueError:
            names = ", ".join(k.value for k in SpectrumKind)
            raise ConfigError(f"analysis.kind must be auto or one of {names}") from None
    ratio_fixed = _bool("analysis.ratio_fixed", an["ratio_fixed"]) if "ratio_fixed" in an else False
    return RunConfig(
        values=dict(values),
        system=system,
        msi=msi,
        deviations=deviations,
        feedback=feedback,
        sweep=sweep,
        quadrature=quad,
        kind=kind,
        ratio_fixed=ratio_fixed,
        target_excess=an.get("target_excess", 1.0),
    )


def with_value(values: dict, key: str, value: float) -> dict:
    """Copy of ``values`` with one key replaced (already in angular units)."""
    out = dict(values)
    out[key] = float(value)
    if key == "cavity.gamma_int_ratio":
        out.pop("cavity.gamma_int", None)
    elif key == "cavity.gamma_int":
        out.pop("cavity.gamma_int_ratio", None)
    elif key in ("drive.u", "drive.photon_number"):
        out.pop("drive.photon_number" if key == "drive.u" else "drive.u", None)
    return out

"""Dissipative-coupling-assisted laser cooling of a mechanical oscillator.

Force spectra, phonon occupation (closed form and by quadrature), optimal
operating points, imperfection budgets, a Michelson-Sagnac interferometer
mapping and a comparison with dispersive and feedback cooling.
"""

from .errors import (
    ConfigError,
    DarkPortError,
    DegenerateCouplingError,
    InstabilityError,
    NoCoolingError,
    OptocoolError,
    PerturbativeRangeWarning,
    PhysicsDomainError,
    QuadratureError,
    ResonanceSingularityError,
)
from .params import (
    CavityParams,
    CouplingParams,
    DriveParams,
    MechParams,
    SystemParams,
    make_system,
)
from .spectra import (
    ForceSpectrum,
    SpectrumKind,
    fano_detuning,
    gamma_opt,
    omega_h,
    s_ff,
    susceptibility,
)
from .cooling import (
    CoolingResult,
    Deviations,
    QuadratureConfig,
    cooling_limit,
    n_analytic,
    n_detuning_error,
    n_diss_limit,
    n_dispersive,
    n_internal_loss,
    n_multimode,
    n_quadrature,
    n_ratio_error,
)
from .design import (
    OperatingPoint,
    ToleranceBudget,
    ValidityReport,
    numeric_optimum,
    optimize,
    tolerance_budget,
    validity,
)
from .msi import (
    MsiDrive,
    MsiGeometry,
    cavity_from_msi,
    couplings_from_msi,
    effective_mirror,
    mirror_derivatives,
    s_ff_exact_msi,
    system_from_msi,
)
from .protocols import ComparisonReport, FeedbackParams, compare, feedback_limit, photon_budget

__version__ = "0.1.0"

"""Exception hierarchy.

Physics-domain errors (instability, dark port, no cooling, degenerate
coupling) share the :class:`PhysicsDomainError` base so that callers such as
the command line front end can map them to a single exit status.
"""


class OptocoolError(Exception):
    """Base class for all errors raised by this package."""


class PhysicsDomainError(OptocoolError, ValueError):
    """A requested quantity does not exist for the given parameters."""


class DegenerateCouplingError(PhysicsDomainError):
    """The dissipative coupling constant vanishes where it must not."""


class InstabilityError(PhysicsDomainError):
    """Total mechanical damping is not positive (heating / parametric instability)."""


class NoCoolingError(PhysicsDomainError):
    """Optimal drive does not exist because ``n_th * G <= 1``."""


class DarkPortError(PhysicsDomainError):
    """Effective input mirror is opaque (``tau == 0``), so the cavity is closed."""


class ResonanceSingularityError(PhysicsDomainError):
    """Round-trip factor of a lossless cavity vanishes exactly."""


class QuadratureError(OptocoolError, ArithmeticError):
    """Adaptive integration failed to reach the requested tolerance."""


class ConfigError(OptocoolError, ValueError):
    """Malformed or inconsistent run configuration."""


class PerturbativeRangeWarning(UserWarning):
    """A perturbative correction was evaluated outside its intended domain."""

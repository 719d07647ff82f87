import pytest

from optocool import design
from optocool.params import make_system


@pytest.fixture
def case_study():
    """Bad-cavity membrane point: gamma/omega_M = 16, Q = 1e9, n_th = 1e5, optimal ratio."""
    return make_system(gamma=16.0, omega_m=1.0, q=1e9, n_th=1e5, coupling_ratio=3.0)


@pytest.fixture
def case_study_optimum(case_study):
    return design.apply(case_study, design.optimize(case_study))


@pytest.fixture
def deep_optimum():
    """Optimum far inside the weak-coupling regime (n_diss ~ 6e-5)."""
    p = make_system(gamma=16.0, omega_m=1.0, q=1e9, n_th=1.0, coupling_ratio=3.0)
    return design.apply(p, design.optimize(p))


@pytest.fixture
def moderate():
    """gamma = 10, omega_m = 1, gamma_m = 1e-6, n_th = 100 at the optimal ratio (drive not set)."""
    return make_system(gamma=10.0, omega_m=1.0, q=1e6, n_th=100, coupling_ratio=3.0)

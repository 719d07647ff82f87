import math

import numpy as np
import pytest

from optocool.errors import DegenerateCouplingError
from optocool.params import (
    CavityParams,
    CouplingParams,
    DriveParams,
    MechParams,
    SystemParams,
    make_system,
)


def test_q_is_exact_ratio():
    m = MechParams.from_q(2.0, 1e7, 10.0)
    assert m.gamma_m == 2.0 / 1e7
    assert m.q == pytest.approx(1e7, rel=1e-15)


def test_u_from_photon_number():
    p = SystemParams(CavityParams(4.0), MechParams(1.0, 1e-6, 1.0), CouplingParams(0.1, 0.2), DriveParams(50.0))
    assert p.u == 50.0 * (0.2 / 4.0) ** 2


def test_with_u_round_trip(case_study):
    assert case_study.with_u(0.37).u == pytest.approx(0.37, rel=1e-15)


def test_make_system_defaults_to_fano_detuning(case_study):
    assert case_study.cavity.detuning == -1.0
    assert case_study.coupling_ratio == pytest.approx(3.0, rel=1e-15)


@pytest.mark.parametrize("kwargs", [
    dict(gamma=0.0), dict(gamma=-1.0), dict(gamma_int=-1e-3), dict(fsr=0.0),
])
def test_cavity_validation(kwargs):
    base = dict(gamma=1.0)
    with pytest.raises(ValueError):
        CavityParams(**{**base, **kwargs})


def test_mech_and_drive_validation():
    with pytest.raises(ValueError):
        MechParams(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        MechParams(1.0, 1e-6, -1.0)
    with pytest.raises(ValueError):
        DriveParams(-1.0)


def test_ratio_undefined_without_dissipative_coupling():
    p = SystemParams(CavityParams(4.0), MechParams(1.0, 1e-6, 1.0), CouplingParams(0.1, 0.0), DriveParams(1.0))
    with pytest.raises(DegenerateCouplingError):
        p.coupling_ratio
    with pytest.raises(DegenerateCouplingError):
        p.with_u(1.0)


def test_omega_override():
    p = make_system(gamma=16.0, omega_m=1.0, q=1e9, n_th=1.0, coupling_ratio=3.0)
    assert p.omega_M == 1.0
    from dataclasses import replace

    assert replace(p, omega_M_override=1.1).omega_M == 1.1


def test_broadcasting_fields():
    p = make_system(gamma=np.array([10.0, 20.0]), omega_m=1.0, q=1e6, n_th=1.0, coupling_ratio=3.0, u=0.1)
    assert p.u == pytest.approx([0.1, 0.1])
    assert not p.cavity.multimode
    assert p.with_cavity(fsr=100.0).cavity.multimode
    assert math.isinf(p.cavity.fsr)

import math
from dataclasses import replace

import numpy as np
import pytest

from optocool import msi
from optocool.errors import DarkPortError
from optocool.params import MechParams
from optocool.spectra import SpectrumKind, s_ff

C = msi.C_LIGHT
OMEGA_L = 2 * math.pi * C / 1064e-9
K = OMEGA_L / C
BAL = math.sqrt(0.5)


def balanced(mem_r=0.6, x=0.0):
    return msi.MsiGeometry.from_reflectivities(BAL, mem_r, 0.1, 0.01, 0.01, x)


def nearly_closed(tau2=1e-5, bs_R=math.sqrt(0.3), mem_r=0.6):
    """Geometry with tau^2 = tau2 at the 1064 nm carrier."""
    g = msi.MsiGeometry.from_reflectivities(bs_R, mem_r, 0.1, 0.01, 0.01)
    T, R, t, r = g.bs_T, g.bs_R, g.mem_t, g.mem_r
    c2 = (math.sqrt(tau2) - t * (T * T - R * R)) / (2 * R * T * r)
    return replace(g, x=math.acos(c2) / (2 * K))


def test_geometry_validation():
    with pytest.raises(ValueError):
        msi.MsiGeometry(0.6, 0.6, 0.8, 0.6, 0.1, 0.01, 0.01)
    with pytest.raises(ValueError):
        msi.MsiGeometry(0.8, 0.6, 0.8, 0.7, 0.1, 0.01, 0.01)
    with pytest.raises(ValueError):
        msi.MsiGeometry.from_reflectivities(0.6, 0.6, 0.0, 0.01, 0.01)
    with pytest.raises(ValueError):
        msi.MsiGeometry.from_reflectivities(1.2, 0.6, 0.1, 0.01, 0.01)
    assert balanced().length == pytest.approx(0.12)


def test_balanced_mirror_at_origin():
    g = balanced()
    m = msi.effective_mirror(g, K)
    assert m.rho == pytest.approx(-g.mem_t, abs=1e-15)
    assert m.tau == pytest.approx(g.mem_r, abs=1e-15)


def test_transparent_membrane():
    g = msi.MsiGeometry.from_reflectivities(math.sqrt(0.3), 0.0, 0.1, 0.01, 0.01, 0.37 / K)
    m = msi.effective_mirror(g, K)
    T, R = g.bs_T, g.bs_R
    assert m.rho == pytest.approx(-2 * R * T, abs=1e-15)
    assert m.tau == pytest.approx(T * T - R * R, abs=1e-15)


def test_unitarity_random():
    rng = np.random.default_rng(3)
    for _ in range(500):
        g = msi.MsiGeometry.from_reflectivities(math.sqrt(rng.uniform()), rng.uniform(), 0.1, 0.01, 0.01,
                                                rng.uniform(-1, 1) / K)
        m = msi.effective_mirror(g, K)
        assert abs(abs(m.rho) ** 2 + m.tau**2 - 1) <= 1e-12


def test_balanced_cavity():
    g = balanced()
    cav = msi.cavity_from_msi(g, K)
    assert cav.gamma == pytest.approx(g.mem_r**2 * C / (2 * g.length), rel=1e-14)
    assert cav.fsr * 2 * g.length / C == pytest.approx(2 * math.pi, rel=1e-15)
    # resonance nearest the carrier
    assert abs(cav.omega_c - OMEGA_L) <= cav.fsr / 2


def test_gamma_vanishes_for_closed_cavity():
    gams = [msi.cavity_from_msi(nearly_closed(t2), K).gamma for t2 in (1e-3, 1e-5, 1e-7)]
    assert gams[0] > gams[1] > gams[2]
    assert gams[2] == pytest.approx(1e-7 * C / (2 * 0.12), rel=1e-6)


def test_dark_port():
    g = msi.MsiGeometry.from_reflectivities(BAL, 0.0, 0.1, 0.01, 0.01)
    with pytest.raises(DarkPortError):
        msi.cavity_from_msi(g, K)
    with pytest.raises(DarkPortError):
        msi.couplings_from_msi(g, K, 1e-15)


def test_balanced_origin_is_purely_dispersive():
    g = balanced()
    cpl = msi.couplings_from_msi(g, K, 1e-15)
    assert cpl.g_gamma == 0.0
    # carries the 1/|rho|^2 factor, |rho| = t here
    scale = C / (2 * g.length) * 1e-15
    assert cpl.g_omega == pytest.approx(-2 * K * g.mem_r * g.mem_t / g.mem_t**2 * scale, rel=1e-14)


def test_balanced_quarter_point_is_purely_dissipative():
    g = balanced(x=math.pi / 4 / K)
    dmu, dtau = msi.mirror_derivatives(g, K)
    assert abs(dmu) < 1e-9 * K
    assert dtau == pytest.approx(-2 * K * g.mem_r, rel=1e-12)


def test_derivatives_match_finite_differences_at_tiny_step():
    g = msi.MsiGeometry.from_reflectivities(math.sqrt(0.3), 0.6, 0.1, 0.01, 0.01, 0.2 / K)
    h = 1e-9 / K
    dmu, dtau = msi.mirror_derivatives(g, K)
    rp, rm = msi.effective_mirror(g, K, g.x + h), msi.effective_mirror(g, K, g.x - h)
    assert np.angle(rp.rho / rm.rho) / (2 * h) == pytest.approx(dmu, rel=1e-6)
    assert (rp.tau - rm.tau) / (2 * h) == pytest.approx(dtau, rel=1e-6)


def test_derivatives_random_draws():
    rng = np.random.default_rng(11)
    h = 1e-6 / K
    for _ in range(200):
        g = msi.MsiGeometry.from_reflectivities(math.sqrt(rng.uniform(0.05, 0.95)), rng.uniform(0.05, 0.99),
                                                0.1, 0.01, 0.01, rng.uniform(0, math.pi / K))
        dmu, dtau = msi.mirror_derivatives(g, K)
        rp, rm = msi.effective_mirror(g, K, g.x + h), msi.effective_mirror(g, K, g.x - h)
        assert np.angle(rp.rho / rm.rho) / (2 * h) == pytest.approx(dmu, rel=1e-6)
        assert (rp.tau - rm.tau) / (2 * h) == pytest.approx(dtau, rel=1e-6)


def test_spectrum_periodic_in_frequency():
    g = balanced(x=0.2 / K)
    d = msi.MsiDrive(OMEGA_L, 1e6, 1e-15)
    w = np.array([0.0, 1e5, 3e6])
    period = math.pi * C / g.length
    np.testing.assert_allclose(msi.s_ff_exact_msi(w + period, g, d), msi.s_ff_exact_msi(w, g, d), rtol=1e-12)


def test_detuning_reduced_to_nearest_resonance():
    g = nearly_closed()
    cav = msi.cavity_from_msi(g, K)
    delta = msi.detuning(g, OMEGA_L)
    assert abs(delta) <= cav.fsr / 2
    assert delta == pytest.approx(OMEGA_L - cav.omega_c, abs=1e-6 * cav.fsr)


def test_carrier_for_detuning():
    g = nearly_closed()
    gamma = msi.cavity_from_msi(g, K).gamma
    w = msi.carrier_for_detuning(g, OMEGA_L, -0.5 * gamma)
    # the round-trip phase 2kL ~ 1e6 rad limits the detuning to ~1 rad/s absolute
    assert msi.detuning(g, w) == pytest.approx(-0.5 * gamma, abs=1.0)


@pytest.mark.parametrize("delta_over_gamma", [-1.0, 0.0, 0.5])
def test_reduced_interference_factor(delta_over_gamma):
    g = nearly_closed(1e-6)
    gamma = msi.cavity_from_msi(g, K).gamma
    w_l = msi.carrier_for_detuning(g, OMEGA_L, delta_over_gamma * gamma)
    d = msi.MsiDrive(w_l, 1e6, 1e-15)
    w = np.linspace(-gamma, gamma, 21)
    exact = msi.n_factor_exact(w, g, d)
    reduced = msi.n_factor_reduced(w, g, d)
    scale = np.max(np.abs(exact))
    tau2 = 1e-6
    assert np.max(np.abs(exact - reduced)) / scale < 10 * (tau2 + gamma * g.length / C)


def test_exact_spectrum_reduces_to_multimode():
    g = nearly_closed(1e-6)
    gamma = msi.cavity_from_msi(g, K).gamma
    w_l = msi.carrier_for_detuning(g, OMEGA_L, -0.3 * gamma)
    d = msi.MsiDrive(w_l, 1e6, 1e-15)
    p = msi.system_from_msi(g, d, MechParams.from_q(1e5, 1e6, 1.0))
    w = np.linspace(-gamma, gamma, 41)
    exact = msi.s_ff_exact_msi(w, g, d)
    reduced = s_ff(w, p, SpectrumKind.MULTIMODE)
    bound = 10 * (1e-6 + np.abs(w) * g.length / C)
    envelope = np.max(reduced)
    assert np.all(np.abs(exact - reduced) <= bound * np.maximum(reduced, 1e-3 * envelope) + 1e-9 * envelope)


def test_system_mapping():
    g = nearly_closed()
    d = msi.MsiDrive(OMEGA_L, 1e6, 1e-15)
    mech = MechParams.from_q(1e5, 1e6, 10.0)
    p = msi.system_from_msi(g, d, mech, gamma_int=3.0)
    cav = msi.cavity_from_msi(g, K)
    assert p.cavity.gamma == cav.gamma and p.cavity.fsr == cav.fsr
    assert p.cavity.gamma_int == 3.0
    assert p.drive.photon_number == 1e6


@pytest.mark.parametrize("ratio", [-1e7, -3e5, 0.0, 3e5, 1e8])
def test_any_ratio_is_reachable(ratio):
    g = msi.MsiGeometry.from_reflectivities(math.sqrt(0.3), 0.6, 0.1, 0.01, 0.01, 0.1 / K)
    x = msi.position_for_ratio(g, K, ratio)
    at = replace(g, x=x)
    cpl = msi.couplings_from_msi(at, K, 1.0)
    gamma = msi.cavity_from_msi(at, K).gamma
    assert gamma * cpl.g_omega / cpl.g_gamma == pytest.approx(ratio, rel=1e-8, abs=1e-8 * gamma)


def test_balanced_splitter_cannot_be_purely_dissipative():
    # for T = R the g_omega = 0 points coincide with the dark port
    with pytest.raises(ValueError):
        msi.position_for_ratio(balanced(x=0.1 / K), K, 0.0)

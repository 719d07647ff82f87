import numpy as np
import pytest

from optocool import spectra
from optocool.errors import DegenerateCouplingError, InstabilityError
from optocool.params import CavityParams, CouplingParams, DriveParams, MechParams, SystemParams, make_system
from optocool.spectra import ForceSpectrum, SpectrumKind


def _system(gamma=16.0, ratio=3.0, detuning=-1.0, u=0.01, **cav):
    return make_system(gamma=gamma, omega_m=1.0, q=1e9, n_th=1e5, coupling_ratio=ratio,
                       detuning=detuning, u=u, **cav)


def test_omega_h_at_optimal_settings():
    assert spectra.omega_h(_system()) == pytest.approx(1.0, abs=1e-15)


def test_omega_h_pure_dissipative():
    assert spectra.omega_h(_system(ratio=0.0, detuning=-1.0)) == -2.0


def test_omega_h_substitution():
    # gamma = 16, g_omega/g_gamma = 0.1, Delta = -0.3
    p = _system(ratio=1.6, detuning=-0.3)
    assert spectra.omega_h(p) == pytest.approx(1.0, rel=1e-14)
    assert spectra.fano_detuning(p) == pytest.approx(-0.3, rel=1e-14)


def test_omega_h_degenerate():
    p = SystemParams(CavityParams(1.0), MechParams(1.0, 1e-6, 1.0), CouplingParams(1.0, 0.0), DriveParams(1.0))
    with pytest.raises(DegenerateCouplingError):
        spectra.omega_h(p)


def test_fano_detuning_examples():
    assert spectra.fano_detuning(_system(ratio=3.0)) == -1.0
    assert spectra.fano_detuning(_system(ratio=0.0)) == 0.5
    assert spectra.fano_detuning(_system(ratio=16.0)) == -7.5


def test_ideal_spectrum_zero_at_minus_omega_h():
    p = _system(ratio=1.6, detuning=-0.3)
    assert spectra.s_ff(-spectra.omega_h(p), p) == 0.0


def test_ideal_spectrum_matches_printed_form():
    p = _system(ratio=2.0, detuning=-0.7, u=0.02)
    w = np.linspace(-40, 40, 81)
    wh = spectra.omega_h(p)
    expected = p.drive.photon_number * p.coupling.g_gamma**2 / 16.0 * (w + wh) ** 2 / (64 + (w - 0.7) ** 2)
    np.testing.assert_allclose(spectra.s_ff(w, p), expected, rtol=1e-13)


def test_spectrum_scales_with_drive():
    p = _system()
    assert spectra.s_ff(0.3, p.with_u(0.02)) == pytest.approx(2 * spectra.s_ff(0.3, p), rel=1e-14)
    assert spectra.s_ff(0.3, p.with_u(0.0)) == 0.0


def test_finite_without_dissipative_coupling():
    p = SystemParams(CavityParams(2.0, detuning=-1.0), MechParams(1.0, 1e-6, 1.0),
                     CouplingParams(0.5, 0.0), DriveParams(3.0))
    # pure dispersive: |a0|^2 gamma g_omega^2 / lorentz
    assert spectra.s_ff(0.2, p) == pytest.approx(3.0 * 2.0 * 0.25 / (1 + 0.64), rel=1e-14)


def test_loss_term_at_optimal_settings():
    p = _system(gamma_int=0.01)
    parts = spectra.s_ff_parts(-1.0, p, SpectrumKind.WITH_INTERNAL_LOSS)
    # U gamma_int [(g/2)^2 + (D + r)^2] / [(g/2)^2 + (w + D)^2] with both brackets equal to 68
    assert parts["loss"] == pytest.approx(1e-4, rel=1e-13)


def test_loss_numerator_is_square_plus_constant():
    p = _system(ratio=2.3, detuning=-0.4, gamma_int=0.05)
    w = np.linspace(-30, 30, 61)
    parts = spectra.s_ff_parts(w, p, SpectrumKind.WITH_INTERNAL_LOSS)
    lor = 64 + (w - 0.4) ** 2
    loss_num = parts["loss"] * lor
    assert np.ptp(loss_num) < 1e-15 * np.max(loss_num)


def test_multimode_reduces_to_ideal_for_infinite_fsr():
    p = _system()
    w = np.linspace(-20, 20, 41)
    q = p.with_cavity(fsr=1e300)
    np.testing.assert_allclose(spectra.s_ff(w, q, SpectrumKind.MULTIMODE), spectra.s_ff(w, p), rtol=1e-15)


def test_multimode_dominates_ideal():
    q = _system(fsr=50.0)
    w = np.linspace(-20, 20, 41)
    assert np.all(spectra.s_ff(w, q, SpectrumKind.MULTIMODE) >= spectra.s_ff(w, q))


def test_multimode_requires_fsr():
    with pytest.raises(ValueError):
        spectra.s_ff(0.0, _system(), SpectrumKind.MULTIMODE)


def test_literal_multimode_weight():
    q = _system(ratio=2.0, detuning=-0.5, fsr=40.0)
    w = 0.7
    extra = spectra.s_ff(w, q, SpectrumKind.MULTIMODE, literal_multimode=True) - spectra.s_ff(w, q)
    wh = spectra.omega_h(q)
    lor = 64 + (w - 0.5) ** 2
    expected = q.drive.photon_number * q.coupling.g_gamma**2 / 16 * (np.pi * wh * w / 40.0) ** 2 / lor
    assert extra == pytest.approx(expected, rel=1e-12)


def test_infer_kind():
    assert SpectrumKind.infer(_system()) is SpectrumKind.IDEAL
    assert SpectrumKind.infer(_system(gamma_int=1e-3)) is SpectrumKind.WITH_INTERNAL_LOSS
    assert SpectrumKind.infer(_system(fsr=1e3)) is SpectrumKind.MULTIMODE
    assert SpectrumKind.infer(_system(fsr=1e3, gamma_int=1e-3)) is SpectrumKind.MULTIMODE_WITH_INTERNAL_LOSS


def test_susceptibility_examples():
    g = 0.01
    assert spectra.susceptibility(3.0, g, 3.0) == pytest.approx(2 / g)
    assert abs(spectra.susceptibility(3.0 + g / 2, g, 3.0)) ** 2 == pytest.approx(2 / g**2)
    assert abs(spectra.susceptibility(1e12, g, 3.0)) < 1e-11
    w = np.linspace(-5, 5, 11)
    np.testing.assert_allclose(abs(spectra.susceptibility(w, g, 3.0)) ** 2, 1 / ((g / 2) ** 2 + (w - 3) ** 2))


def test_susceptibility_unstable():
    with pytest.raises(InstabilityError):
        spectra.susceptibility(0.0, 0.0, 1.0)
    with pytest.raises(InstabilityError):
        spectra.susceptibility(0.0, -1e-3, 1.0)


def test_gamma_opt_zero_drive():
    assert spectra.gamma_opt(_system(u=0.0)) == 0.0


def test_gamma_opt_equals_gain_at_fano(moderate):
    p = moderate.with_u(1e-3)
    g0 = 16 / (10 * 1e-6)
    mismatch = 3 / 10 - p.coupling.g_omega / p.coupling.g_gamma
    assert spectra.gamma_opt(p) == pytest.approx(1e-3 * 1e-6 * g0 / (1 + mismatch**2), rel=1e-12)


def test_gamma_opt_at_case_study_optimum(case_study_optimum):
    assert spectra.gamma_opt(case_study_optimum) / 16 == pytest.approx(6.25e-4, rel=1e-12)


def test_blue_detuning_heats():
    p = SystemParams(CavityParams(16.0, detuning=1.0), MechParams(1.0, 1e-9, 1.0),
                     CouplingParams(0.1, 0.0), DriveParams(1.0))
    assert spectra.gamma_opt(p) < 0


def test_force_spectrum_object():
    p = _system(ratio=2.0, detuning=-0.5)
    fs = ForceSpectrum(p)
    assert fs(0.3) == spectra.s_ff(0.3, p)
    assert fs.damping(1.0) == pytest.approx(p.mech.gamma_m + spectra.gamma_opt(p), rel=1e-15)
    assert set(fs.parts(0.1)) == {"ideal", "loss", "multimode"}

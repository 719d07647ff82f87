import math
import warnings
from dataclasses import replace

import pytest

from optocool import cooling, protocols
from optocool.params import CouplingParams, MechParams, make_system
from optocool.protocols import FeedbackParams


def test_feedback_params_validation():
    for eta in (0.0, -0.1, 1.1):
        with pytest.raises(ValueError):
            FeedbackParams(eta)
    with pytest.raises(ValueError):
        FeedbackParams(0.5, -1.0)


def test_detector_limit_values():
    assert protocols.detector_limit(1.0) == 0.0
    assert protocols.detector_limit(0.77) == pytest.approx(0.5 * (1 / math.sqrt(0.77) - 1), rel=1e-15)
    assert protocols.detector_limit(0.77) == pytest.approx(0.07, abs=0.005)


def test_feedback_limit_case_study():
    mech = MechParams.from_q(1.0, 1e9, 1e5)
    n_fb = protocols.feedback_limit(mech, FeedbackParams(0.77, 5.8e-8))
    n_det = protocols.detector_limit(0.77)
    assert n_fb == pytest.approx(n_det + 4 / math.sqrt(0.77) * 1e5 * 5.8e-8, rel=1e-15)
    assert n_det > n_fb - n_det
    assert protocols.feedback_limit(mech, FeedbackParams(1.0, 0.0)) == 0.0


def test_n_imp_computed_from_readout(case_study):
    p = case_study.with_u(0.01)
    expected = 16 * 1e-9 / (64 * p.drive.photon_number * p.coupling.g_omega**2)
    assert protocols.imperfection_quanta(p) == pytest.approx(expected, rel=1e-15)
    assert protocols.resolve_n_imp(FeedbackParams(0.5), p) == pytest.approx(expected, rel=1e-15)


def test_supplied_n_imp_wins_with_warning(case_study):
    p = case_study.with_u(0.01)
    with pytest.warns(UserWarning):
        assert protocols.resolve_n_imp(FeedbackParams(0.5, 1.0), p) == 1.0
    computed = protocols.imperfection_quanta(p)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert protocols.resolve_n_imp(FeedbackParams(0.5, computed * 1.05), p) == computed * 1.05


def test_n_imp_unavailable(case_study):
    with pytest.raises(ValueError):
        protocols.resolve_n_imp(FeedbackParams(0.5), case_study.with_u(0.0))


def test_compare_case_study(case_study):
    rep = protocols.compare(case_study, FeedbackParams(0.77, 5.8e-8))
    pr = rep.protocols
    assert pr["dissipative"].n_limit == pytest.approx(0.02, rel=1e-12)
    assert pr["dispersive"].n_limit == 16.0
    assert pr["dissipative"].n_limit < pr["feedback"].n_limit
    assert rep.thresholds["loss_ratio_bound"] == pytest.approx(6.25e-4, rel=1e-12)
    assert rep.thresholds["loss_ratio_bound_beta"] == pytest.approx(0.02 / (80 / 68 * 16), rel=1e-12)
    assert rep.thresholds["n_imp"] == 5.8e-8
    assert any("detector-limited" in n for n in pr["feedback"].notes)
    d = rep.as_dict()
    assert list(d["protocols"]) == ["dissipative", "dispersive", "feedback"]
    assert all(v >= 0 for v in d["thresholds"].values())


def test_compare_photon_numbers(case_study):
    rep = protocols.compare(case_study, FeedbackParams(0.77, 5.8e-8))
    assert rep.protocols["dissipative"].photon_number == pytest.approx(2.56, rel=1e-12)
    assert rep.protocols["dispersive"].photon_number == pytest.approx(0.0120888, rel=1e-5)
    assert rep.thresholds["gain_ratio"] == pytest.approx(15.11, rel=1e-3)


def test_thermal_scaling(case_study):
    hot = replace(case_study, mech=MechParams(1.0, case_study.mech.gamma_m, 2e5))
    fb = FeedbackParams(0.77, 5.8e-8)
    a, b = protocols.compare(case_study, fb), protocols.compare(hot, fb)
    assert b.protocols["dissipative"].n_limit == pytest.approx(math.sqrt(2) * a.protocols["dissipative"].n_limit, rel=1e-14)
    n_det = protocols.detector_limit(0.77)
    assert b.protocols["feedback"].n_limit - n_det == pytest.approx(2 * (a.protocols["feedback"].n_limit - n_det), rel=1e-12)


def test_perfect_feedback_wins(case_study):
    rep = protocols.compare(case_study, FeedbackParams(1.0, 0.0))
    assert rep.protocols["feedback"].n_limit == 0.0 < rep.protocols["dissipative"].n_limit


def test_resolved_sideband_gain():
    # g_omega = g_gamma, gamma << omega_M
    p = make_system(gamma=0.01, omega_m=1.0, q=1e9, n_th=1e3, coupling_ratio=0.01)
    budget = protocols.photon_budget(p)
    assert p.coupling.g_omega == pytest.approx(p.coupling.g_gamma)
    assert budget["gain_ratio"] == pytest.approx(8 * (1 / 0.01) ** 2, rel=1e-4)
    assert budget["resolved_sideband_gain"] == 8e4


def test_no_dispersive_coupling(case_study):
    p = replace(case_study, coupling=CouplingParams(0.0, 1.0))
    budget = protocols.photon_budget(p)
    assert math.isinf(budget["dispersive_2ndisp"]) and math.isinf(budget["gain_ratio"])


def test_dissipative_below_dispersive_when_valid():
    for gamma in (2.0, 8.0, 16.0, 40.0):
        p = make_system(gamma=gamma, omega_m=1.0, q=1e9, n_th=1e4, coupling_ratio=3.0)
        assert cooling.n_diss_optimal_ratio(p) < cooling.dispersive_limit(gamma, 1.0)


def test_disp_advantage_note():
    # resolved-sideband, hot: n_disp below n_diss
    p = make_system(gamma=0.1, omega_m=1.0, q=1e5, n_th=1e5, coupling_ratio=3.0)
    rep = protocols.compare(p, FeedbackParams(0.9, 1e-9))
    assert rep.protocols["dispersive"].notes

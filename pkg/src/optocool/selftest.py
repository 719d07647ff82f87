"""Built-in acceptance suite run by ``optocool selftest``.

Every check uses fixed seeds and reports timing only as a pass/fail flag, so
two runs give byte-identical JSON.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import replace

import numpy as np

from . import design, msi, records
from .cooling import (
    QuadratureConfig,
    beta_factor,
    dispersive_limit,
    gain,
    n_analytic,
    n_detuning_error,
    n_diss_limit,
    n_fano,
    n_internal_loss,
    n_quadrature,
    n_ratio_error,
)
from .params import CouplingParams, MechParams, make_system
from .protocols import FeedbackParams, detector_limit, feedback_limit
from .spectra import SpectrumKind, gamma_opt, s_ff

SEED = 20240607
CASE_STUDY = dict(gamma=16.0, omega_m=1.0, q=1e9, n_th=1e5, coupling_ratio=3.0)


def _result(cid: int, name: str, passed: bool, **metrics) -> dict:
    return {"id": cid, "name": name, "passed": bool(passed), "metrics": metrics}


def _rel(a, b):
    return abs(a - b) / abs(b)


def case_study() -> dict:
    t0 = time.perf_counter()
    p = make_system(**CASE_STUDY)
    n_diss, u0 = n_diss_limit(p)
    n_disp = dispersive_limit(p.cavity.gamma, p.omega_M)
    n_det = detector_limit(0.77)
    n_fb = feedback_limit(p.mech, FeedbackParams(0.77, 5.8e-8))
    threshold = n_diss / (2 * n_disp)
    elapsed = time.perf_counter() - t0
    ok = abs(n_diss - 0.020) <= 0.001 and abs(n_det - 0.070) <= 0.005 and _rel(threshold, 6.25e-4) <= 0.05
    return _result(1, "case study reproduction", ok and elapsed < 0.01,
                   n_diss=float(n_diss), n_det=n_det, n_fb=n_fb, loss_threshold=float(threshold),
                   within_time_budget=elapsed < 0.01)


def _oracle_draws(rng, count, margin=100.0, max_tries=2000):
    draws = []
    for _ in range(max_tries):
        ratio = 10 ** rng.uniform(math.log10(5), math.log10(50))
        q = 10 ** rng.uniform(6, 9)
        n_th = 10 ** rng.uniform(2, 5)
        p = make_system(gamma=ratio, omega_m=1.0, q=q, n_th=n_th, coupling_ratio=3.0)
        p = design.apply(p, design.optimize(p))
        rep = design.validity(p)
        if rep.weak_coupling_margin >= margin and rep.underdamped_margin >= margin:
            draws.append(p)
            if len(draws) == count:
                break
    return draws


def oracle_equivalence(count: int = 20) -> dict:
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    worst = 0.0
    draws = _oracle_draws(rng, count)
    for p in draws:
        worst = max(worst, _rel(n_quadrature(p).n_total, n_analytic(p).n_total))
    elapsed = time.perf_counter() - t0
    ok = len(draws) == count and worst < 0.05
    return _result(2, "quadrature matches closed form", ok and elapsed < 5.0,
                   draws=len(draws), worst_rel_diff=worst, within_time_budget=elapsed < 5.0)


def fano_cancellation() -> dict:
    p = make_system(gamma=10.0, omega_m=1.0, q=1e6, n_th=100, coupling_ratio=3.0)
    u0 = n_diss_limit(p)[1]
    p = p.with_u(u0)
    res = n_analytic(p)
    first = float(res.backaction_terms[0])
    target = n_fano(u0, p.mech.n_th, gain(p))
    quad = n_quadrature(p).n_total
    rel = _rel(quad, target)
    return _result(3, "Fano cancellation", first == 0.0 and rel < 0.10,
                   mismatch_term=first, quadrature=quad, fano_form=float(target), rel_diff=rel)


def internal_loss(gamma_ratio: float = 16.0) -> dict:
    p = make_system(**{**CASE_STUDY, "gamma": gamma_ratio})
    p = design.apply(p, design.optimize(p))
    base = n_quadrature(p).n_total
    worst = 0.0
    rows = []
    for r in (1e-4, 1e-3, 1e-2):
        q = p.with_cavity(gamma_int=r * p.cavity.gamma)
        n_int = n_quadrature(q, SpectrumKind.WITH_INTERNAL_LOSS).n_total - base
        predicted = float(n_internal_loss(q))
        worst = max(worst, _rel(n_int, predicted))
        rows.append({"loss_ratio": r, "quadrature": n_int, "predicted": predicted,
                     "general_form": float(n_internal_loss(q, general=True))})
    beta_hi = beta_factor(1e4, 1.0)
    beta_lo = beta_factor(1e-2, 1.0)
    limits = abs(beta_hi - 1) <= 0.01 and abs(beta_lo - 4) <= 0.04
    return _result(4, "internal-loss correction", worst < 0.10 and limits,
                   worst_rel_diff=worst, beta=float(beta_factor(gamma_ratio, 1.0)),
                   beta_large_ratio=beta_hi, beta_small_ratio=beta_lo, points=rows)


def setting_errors() -> dict:
    p = make_system(gamma=16.0, omega_m=1.0, q=1e9, n_th=100, coupling_ratio=3.0)
    p = design.apply(p, design.optimize(p))
    d0 = p.cavity.detuning

    def n_det(d):
        return n_analytic(p.with_detuning(d0 + d)).n_total

    h = 0.01 * abs(d0)
    fd = (n_det(h) + n_det(-h) - 2 * n_det(0.0)) / 2
    det_rel = _rel(fd, n_detuning_error(p, h))

    g_gamma = p.coupling.g_gamma

    def n_ratio(dl):
        q = replace(p, coupling=CouplingParams(3 * p.omega_M * (1 + dl) * g_gamma / p.cavity.gamma, g_gamma))
        return n_analytic(q.with_detuning(design.fano_detuning(q)).with_u(p.u)).n_total

    dl = 0.3
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fd_r = (n_ratio(dl) + n_ratio(-dl) - 2 * n_ratio(0.0)) / 2
        ratio_rel = _rel(fd_r, float(n_ratio_error(p, dl)))
    return _result(5, "setting-error curvature", det_rel < 0.05 and ratio_rel < 0.05,
                   detuning_rel_diff=det_rel, ratio_rel_diff=ratio_rel)


def damping_consistency(count: int = 10_000) -> dict:
    rng = np.random.default_rng(SEED + 6)
    gamma = 10 ** rng.uniform(-1, 2, count)
    q = 10 ** rng.uniform(3, 10, count)
    ratio = rng.uniform(-20, 20, count)
    u = 10 ** rng.uniform(-6, 0, count)
    p = make_system(gamma=gamma, omega_m=1.0, q=q, n_th=1.0, coupling_ratio=ratio, u=u)
    lhs = gamma_opt(p)
    rhs = u * p.mech.gamma_m * gain(p)
    worst = float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))
    return _result(6, "damping consistency", worst < 1e-9, draws=count, worst_rel_diff=worst)


def _msi_draw(rng, k):
    bs_R = math.sqrt(rng.uniform(0.05, 0.95))
    mem_r = rng.uniform(0.05, 0.99)
    return msi.MsiGeometry.from_reflectivities(bs_R, mem_r, rng.uniform(0.02, 0.5),
                                               rng.uniform(1e-3, 0.05), rng.uniform(1e-3, 0.05),
                                               rng.uniform(0, math.pi / k))


def msi_algebra(count: int = 10_000, spectrum_draws: int = 100) -> dict:
    rng = np.random.default_rng(SEED + 7)
    omega_L = 2 * math.pi * msi.C_LIGHT / 1064e-9
    k = omega_L / msi.C_LIGHT
    unit = deriv = 0.0
    for i in range(count):
        g = _msi_draw(rng, k)
        m = msi.effective_mirror(g, k)
        unit = max(unit, abs(abs(m.rho) ** 2 + m.tau**2 - 1))
        if i < 1000:
            deriv = max(deriv, _derivative_error(g, k))
    spec = _spectrum_error(rng, omega_L, spectrum_draws)
    ok = unit <= 1e-12 and deriv <= 1e-6 and spec <= 1.0
    return _result(7, "interferometer algebra", ok, unitarity_error=unit,
                   derivative_rel_error=deriv, spectrum_error_over_bound=spec)


def _derivative_error(g, k):
    h = 1e-6 / k
    dmu, dtau = msi.mirror_derivatives(g, k)
    rp = msi.effective_mirror(g, k, g.x + h)
    rm = msi.effective_mirror(g, k, g.x - h)
    fd_mu = np.angle(rp.rho / rm.rho) / (2 * h)
    fd_tau = (rp.tau - rm.tau) / (2 * h)
    return max(abs(fd_mu - dmu) / abs(dmu), abs(fd_tau - dtau) / abs(dtau))


def _spectrum_error(rng, omega_L, draws):
    """Largest ``|exact - reduced| / envelope / (10 (tau^2 + |w| L/c))`` over ``|w| <= gamma``.

    The envelope is the reduced spectrum without interference between the
    dispersive and dissipative amplitudes; the plain relative error is
    unbounded at the spectral zero.
    """
    worst = 0.0
    k0 = omega_L / msi.C_LIGHT
    done = 0
    while done < draws:
        g = _msi_draw(rng, k0)
        tau2 = 10 ** rng.uniform(-6, -3)
        tau = math.copysign(math.sqrt(tau2), rng.uniform(-1, 1))
        T, R, t, r = g.bs_T, g.bs_R, g.mem_t, g.mem_r
        c2 = (tau - t * (T * T - R * R)) / (2 * R * T * r)
        if abs(c2) > 1:
            continue
        g = replace(g, x=math.acos(c2) / (2 * k0))
        cav = msi.cavity_from_msi(g, k0)
        w_l = msi.carrier_for_detuning(g, omega_L, rng.uniform(-1, 1) * cav.gamma)
        drive = msi.MsiDrive(w_l, 1e6, 1e-15)
        mech = MechParams.from_q(1.0, 1e6, 1.0)
        sp = msi.system_from_msi(g, drive, mech)
        gam = sp.cavity.gamma
        w = np.linspace(-gam, gam, 201)
        exact = msi.s_ff_exact_msi(w, g, drive)
        reduced = s_ff(w, sp, SpectrumKind.MULTIMODE)
        env = _envelope(w, sp)
        bound = 10 * (msi.effective_mirror(g, w_l / msi.C_LIGHT).tau ** 2 + np.abs(w) * g.length / msi.C_LIGHT)
        worst = max(worst, float(np.max(np.abs(exact - reduced) / np.maximum(np.abs(reduced), env) / bound)))
        done += 1
    return worst


def _envelope(w, sp):
    cav, cpl = sp.cavity, sp.coupling
    lor = (cav.gamma / 2) ** 2 + (w + cav.detuning) ** 2
    amp2 = ((cpl.g_gamma * (w + 2 * cav.detuning)) ** 2 + (cav.gamma * cpl.g_omega) ** 2
            + (np.pi * cav.gamma * cpl.g_omega * w / cav.fsr) ** 2)
    return sp.drive.photon_number / cav.gamma * amp2 / lor


def power_optimality(count: int = 1000) -> dict:
    rng = np.random.default_rng(SEED + 8)
    worst = 0.0
    for n_th, g in ((1e5, 1e-3 * 1e9), (1e3, 1e6), (50.0, 1e4)):
        u_num = design.minimize_power(n_th, g)
        u0 = (math.sqrt(n_th * g) - 1) / g
        worst = max(worst, _rel(u_num, u0))
    x = 10 ** rng.uniform(0.01, 12, count)
    n_th = 10 ** rng.uniform(0, 6, count)
    exact = n_th * (2 / np.sqrt(x) - 1 / x)
    approx = 2 * n_th / np.sqrt(x)
    ordered = bool(np.all(exact <= approx))
    return _result(8, "power optimality", worst < 1e-6 and ordered,
                   worst_rel_u0=worst, exact_never_above_approx=ordered)


CRITERIA = (
    case_study,
    oracle_equivalence,
    fano_cancellation,
    internal_loss,
    setting_errors,
    damping_consistency,
    msi_algebra,
    power_optimality,
)


def _suite() -> list:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return [check() for check in CRITERIA]


def run() -> dict:
    """All criteria; the last one re-runs the suite and compares serialisations."""
    first = _suite()
    second = _suite()
    same = records.dumps(_strip_timing(first)) == records.dumps(_strip_timing(second))
    results = first + [_result(9, "determinism", same)]
    return {"criteria": results, "all_passed": all(r["passed"] for r in results)}


def _strip_timing(results):
    # timing flags may legitimately differ on a loaded machine
    return [{**r, "metrics": {k: v for k, v in r["metrics"].items() if k != "within_time_budget"}}
            for r in results]

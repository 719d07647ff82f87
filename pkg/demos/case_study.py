"""Bad-cavity membrane cooling: limit, operating point and comparison with feedback cooling.

Run from the repository root: ``python3 demos/case_study.py``.
"""

from optocool import compare, cooling, design, make_system
from optocool.protocols import FeedbackParams

system = make_system(gamma=16.0, omega_m=1.0, q=1e9, n_th=1e5, coupling_ratio=3.0)

point = design.optimize(system)
print("Optimal operating point (frequencies in units of omega_m)")
print(f"  detuning      {point.detuning_star:+.4g}")
print(f"  coupling ratio gamma*g_omega/g_gamma = {point.ratio_star:.4g}")
print(f"  drive U0      {point.u0:.4g}  ({point.photon_number:.4g} intracavity photons for g_gamma = 1)")
print(f"  predicted n   {point.predicted_n:.4g}")

driven = design.apply(system, point)
analytic = cooling.n_analytic(driven).n_total
numeric = cooling.n_quadrature(driven).n_total
print(f"\nClosed form {analytic:.6g} against direct integration {numeric:.6g}")

# Even this bad cavity beats the resolved-sideband floor of dispersive cooling by orders of magnitude.
print(f"Dispersive floor n_disp = {cooling.dispersive_limit(16.0, 1.0):.4g}")

report = compare(system, FeedbackParams(eta_det=0.77, n_imp=5.8e-8))
print("\nProtocol comparison")
for name, entry in report.protocols.items():
    print(f"  {name:12s} n = {entry.n_limit:.4g}")
print(f"Internal loss matters once gamma_int/gamma approaches {report.thresholds['loss_ratio_bound']:.3g}")

rep = design.validity(driven)
print("\nApplicability margins:", {k: f"{v} ({getattr(rep, k + '_margin', getattr(rep, k, None)):.3g})"
                                  for k, v in rep.flags.items()})

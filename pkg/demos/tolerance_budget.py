"""Alignment and loss tolerances that keep the occupation within a factor of two of its limit."""

import warnings

from optocool import cooling, design, make_system
from optocool.cooling import Deviations

system = make_system(gamma=16.0, omega_m=1.0, q=1e9, n_th=1e5, coupling_ratio=3.0)
driven = design.apply(system, design.optimize(system))

for target in (1.0, 0.1):
    b = design.tolerance_budget(driven, target)
    print(f"allowed excess {target:g} x n_diss (n_diss = {b.n_diss:.4g})")
    print(f"  |dDelta/Delta|    < {b.max_rel_detuning_error:.4g}")
    print(f"  |dU/U0|           < {b.max_rel_power_error:.4g}")
    print(f"  coupling ratio    < {b.max_rel_ratio_error:.4g} (relative)")
    print(f"  gamma_int/gamma   < {b.max_loss_ratio:.4g}")
    print(f"  omega_M/omega_FSR < {b.max_fsr_ratio:.4g}")

# inject the full budget for target = 1 one term at a time
b = design.tolerance_budget(driven, 1.0)
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    cases = {
        "detuning": Deviations(d_detuning=b.max_rel_detuning_error * driven.cavity.detuning),
        # a drop in power costs more than the same rise, so the lower side sets the bound
        "power (low)": Deviations(d_power_rel=-b.max_rel_power_error),
        "power (high)": Deviations(d_power_rel=b.max_rel_power_error),
        "ratio": Deviations(d_ratio_rel=b.max_rel_ratio_error),
    }
    clean = cooling.cooling_limit(driven).n_total
    print("\nexcess over the clean limit, in units of n_diss:")
    for name, dev in cases.items():
        print(f"  {name:12s} {(cooling.cooling_limit(driven, dev).n_total - clean) / b.n_diss:.4f}")

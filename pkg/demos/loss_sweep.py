"""How internal cavity loss erodes the cooling limit.

Sweeps gamma_int/gamma on a log grid at the optimal operating point and
compares direct integration with the two closed-form estimates of the extra
occupation.
"""

import numpy as np

from optocool import cooling, design, make_system
from optocool.spectra import SpectrumKind

system = make_system(gamma=16.0, omega_m=1.0, q=1e9, n_th=1e5, coupling_ratio=3.0)
driven = design.apply(system, design.optimize(system))
base = cooling.n_quadrature(driven).n_total

print(f"{'gamma_int/gamma':>16} {'n_total':>10} {'n_int (quad)':>13} {'with beta':>10} {'H/G':>10}")
for ratio in np.geomspace(1e-5, 1e-1, 9):
    lossy = driven.with_cavity(gamma_int=ratio * driven.cavity.gamma)
    total = cooling.n_quadrature(lossy, SpectrumKind.WITH_INTERNAL_LOSS).n_total
    print(f"{ratio:16.3g} {total:10.4g} {total - base:13.4g} "
          f"{cooling.n_internal_loss(lossy):10.4g} {cooling.n_internal_loss(lossy, general=True):10.4g}")

budget = design.tolerance_budget(driven)
print(f"\nKeeping the loss term below n_diss needs gamma_int/gamma < {budget.max_loss_ratio:.3g}")
print("The same sweep from the command line:")
print("  optocool sweep --config demos/configs/loss_sweep.cfg --format csv")

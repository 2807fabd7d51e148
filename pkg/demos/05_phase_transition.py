"""The subcritical/supercritical dichotomy at desk scale.

Seeding a = ac + omega0 vertices and sweeping omega0 through the critical
window: below ac the process dies before tc, above it almost everything
gets infected, and essentially nothing lands in between (the bimodal gap).
Each side's empirical failure rate is compared with its closed-form
ceiling exp(-omega0^2/(10 t0)) (plus exp(-(ac + omega0)/4) above).
"""

import math

from bootperc import critical_quantities, early_growth_check, sweep_omega0

n, r = 30_000, 2
p = float(n) ** -0.7
crit = critical_quantities(n, p, r)
print(f"n = {n}, p = {p:.3g}, r = {r}: t0 = {crit.t0:.1f}, tc = {crit.tc}, "
      f"ac = {crit.ac:.1f}")

s = math.sqrt(crit.t0)
grid = [-2.4 * s, -1.2 * s, 0.0, 1.2 * s, 2.4 * s, 3.6 * s]
report = sweep_omega0(n, p, r, grid, trials_per_cell=60, seed=17)

print(f"\n{'omega0':>8} {'a':>5} {'sub':>6} {'ambig':>6} {'super':>6} "
      f"{'mean |A_f|':>11} {'fail':>6} {'bound':>7}")
for cell in report.cells:
    bound = "  --  " if cell.bound is None else f"{cell.bound:6.3f}"
    fail = "  --  " if cell.failure_fraction is None else f"{cell.failure_fraction:5.3f}"
    flag = " (bound-exempt)" if cell.bound_exempt and cell.omega0 != 0 else ""
    print(f"{cell.omega0:8.1f} {cell.a:5d} {cell.frac_sub:6.2f} "
          f"{cell.frac_ambig:6.2f} {cell.frac_super:6.2f} "
          f"{cell.mean_final:11.1f} {fail:>6} {bound:>7}{flag}")

gap = sum(sum(1 for x in c.final_sizes if crit.tc <= x <= n // 2) for c in report.cells)
total = sum(c.trials for c in report.cells)
print(f"\nbimodal gap: {gap}/{total} trials landed in [tc, n/2]")

om = 3.0 * s
growth = early_growth_check(n, p, r, om, trials=60, seed=18)
print(f"\nearly growth at omega0 = {om:.1f}: {growth.success_fraction:.2f} of runs "
      f"pass floor(t0) steps with |A| >= t0 + ac/2 + omega0/2 = "
      f"{growth.size_threshold:.0f} (failure {growth.failure_fraction:.2f} vs "
      f"ceiling {growth.bound:.2f})")

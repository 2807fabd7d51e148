"""Critical quantities of the process family.

With pi_hat(t) = P[Bin(t, p) >= r], the drift margin
f(t) = (n pi_hat(t) - t)/(1 - pi_hat(t)) measures how far a process with a
seeds overshoots the stopping boundary at step t.  Its minimum over the
window t <= t0 = (r!/(n p^r))^(1/(r-1)) defines the critical seed size
ac = -min f, reached at the bottleneck step tc.  As n grows, tc approaches
((r-1)!/(n p^r))^(1/(r-1)) and ac approaches (1 - 1/r) tc.
"""

from bootperc import (
    ac_tc_real_relaxation,
    critical_quantities,
    drift_table,
    rho_giant,
)

print("family p = n^-0.7, r = 2:")
print("        n        t0      tc   tc/tc_asym      ac    ac/ac_asym")
for n in (10**5, 10**6, 10**7, 10**8):
    crit = critical_quantities(n, float(n) ** -0.7, 2)
    print(f"  {n:9d}  {crit.t0:8.1f}  {crit.tc:6d}   "
          f"{crit.tc / crit.tc_asymptotic:10.4f}  {crit.ac:7.1f}    "
          f"{crit.ac / crit.ac_asymptotic:.4f}")

n = 10**6
crit = critical_quantities(n, 1e-4, 2)
f = drift_table(n, 1e-4, 2)
print(f"\nn = 1e6, p = 1e-4: window floor(t0) = {len(f) - 1}, "
      f"tc = {crit.tc}, ac = {crit.ac:.2f}")
print("drift margin around the bottleneck:")
for t in range(crit.tc - 2, crit.tc + 3):
    marker = "  <- tc" if t == crit.tc else ""
    print(f"  f({t}) = {f[t]:10.4f}{marker}")

diag = ac_tc_real_relaxation(n, 1e-4, 2)
print(f"relaxing the minimization to real t moves the minimizer by "
      f"{diag['tc_gap']:+.3f} steps and ac by {diag['ac_gap']:+.4f} "
      f"(diagnostic only; integer quantities are authoritative)")

print("\ngiant-component density rho solving 1 - rho = exp(-c rho):")
for c in (1.1, 1.5, 3.0, 6.0):
    print(f"  c = {c:4.1f}: rho = {rho_giant(c):.6f}")
print("  (c = 3r/4 stays above 1/2 for every r >= 2, the margin the "
      "supercritical argument leans on)")

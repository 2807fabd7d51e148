"""Critical quantities and closed-form probability bounds.

Notation used across the package (and in the CLI/JSON interfaces):

* ``pi_hat(t) = P[Bin(t, p) >= r]`` -- chance a fresh vertex has at least
  r neighbors among t checked vertices.
* ``t0 = (r! / (n p^r))^(1/(r-1))`` -- scale of the process bottleneck.
* ``f(t) = (n pi_hat(t) - t) / (1 - pi_hat(t))`` -- drift margin; its
  minimum over integer t <= floor(t0) gives ``ac = -min f`` (the critical
  seed size) at ``tc`` (the smallest minimizer, the bottleneck step).
* ``tc_asymptotic = ((r-1)! / (n p^r))^(1/(r-1))`` and
  ``ac_asymptotic = (1 - 1/r) * tc_asymptotic`` -- leading-order forms.
* ``rho`` -- giant-component density, the positive root of
  ``1 - rho = exp(-c rho)`` for mean degree c > 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


class DegenerateRegimeError(ValueError):
    """No meaningful bottleneck exists for these parameters."""


class RegimeWarning(UserWarning):
    """Parameters sit outside the sparse regime the formulas target."""


def binom_tail_geq(t: int, p: float, r: int) -> float:
    """P[Bin(t, p) >= r] with absolute error below 1e-12.

    Computed in log space.  When r > t*p the upper tail is the small side
    and is summed directly (terms decay geometrically past the mode);
    otherwise the r lower-tail terms are summed and complemented.  The
    switch avoids catastrophic cancellation on either side.
    """
    t = int(t)
    r = int(r)
    if t < 0:
        raise ValueError(f"trial count must be >= 0, got {t}")
    if r < 0:
        raise ValueError(f"threshold must be >= 0, got {r}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p!r}")
    if r == 0:
        return 1.0
    if r > t:
        return 0.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    logp = math.log(p)
    logq = math.log1p(-p)
    lgt = math.lgamma(t + 1)
    if r > t * p:
        # direct upper-tail sum, j = r..t
        log_term = lgt - math.lgamma(r + 1) - math.lgamma(t - r + 1) + r * logp + (t - r) * logq
        term = math.exp(log_term)
        acc = 0.0
        j = r
        while j <= t:
            acc += term
            if term <= acc * 1e-18:
                break
            term *= (t - j) / (j + 1) * p / (1.0 - p)
            j += 1
        return min(acc, 1.0)
    acc = 0.0
    for j in range(r):
        acc += math.exp(lgt - math.lgamma(j + 1) - math.lgamma(t - j + 1) + j * logp + (t - j) * logq)
    return max(0.0, 1.0 - acc)


def pi_hat_table(t_max: int, p: float, r: int) -> np.ndarray:
    """Array of P[Bin(t, p) >= r] for t = 0..t_max."""
    return np.array([binom_tail_geq(t, p, r) for t in range(int(t_max) + 1)])


def _validate_npr(n, p, r):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"vertex count must be a positive integer, got {n!r}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"edge probability must lie in (0, 1), got {p!r}")
    if not isinstance(r, (int, np.integer)) or r < 2:
        raise ValueError(f"infection threshold must be an integer >= 2, got {r!r}")


def compute_t0(n: int, p: float, r: int) -> float:
    """Bottleneck scale t0 = (r! / (n p^r))^(1/(r-1)), in log space.

    Warns (non-fatally) when the parameters look outside the sparse regime
    the asymptotics target: n*p < 10 or p * n^(1/r) > 0.5.
    """
    _validate_npr(n, p, r)
    if n * p < 10 or p * n ** (1.0 / r) > 0.5:
        warnings.warn(
            f"regime check: n*p={n * p:.3g} (want >> 1) and p*n^(1/r)="
            f"{p * n ** (1.0 / r):.3g} (want << 1); results may sit far "
            "from the asymptotic formulas",
            RegimeWarning,
            stacklevel=2,
        )
    return math.exp((math.lgamma(r + 1) - math.log(n) - r * math.log(p)) / (r - 1))


def window_floor(t0: float) -> int:
    """floor(t0) with one-part-in-1e12 slack, so an analytically integral
    t0 computed in log space does not lose its endpoint to rounding."""
    return math.floor(t0 * (1.0 + 1e-12) + 1e-12)


def drift_table(n: int, p: float, r: int, t_max: int | None = None) -> np.ndarray:
    """f(t) = (n pi_hat(t) - t) / (1 - pi_hat(t)) for t = 0..t_max.

    Defaults to t_max = floor(t0).  Entries where pi_hat(t) = 1 are +inf.
    """
    if t_max is None:
        t_max = window_floor(compute_t0(n, p, r))
    pis = pi_hat_table(t_max, p, r)
    t = np.arange(t_max + 1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        f = np.where(pis < 1.0, (n * pis - t) / (1.0 - pis), np.inf)
    return f


@dataclass(frozen=True)
class CriticalQuantities:
    """The bottleneck summary for one (n, p, r) family."""

    t0: float
    tc: int
    ac: float
    tc_asymptotic: float
    ac_asymptotic: float
    pi_hat_table: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "t0": self.t0,
            "tc": self.tc,
            "ac": self.ac,
            "tc_asymptotic": self.tc_asymptotic,
            "ac_asymptotic": self.ac_asymptotic,
            "pi_hat_table": self.pi_hat_table.tolist(),
        }


def critical_quantities(n: int, p: float, r: int) -> CriticalQuantities:
    """Compute t0, the minimizer (ac, tc), the asymptotic forms, and the
    pi_hat table over 0..floor(t0).

    Raises DegenerateRegimeError when floor(t0) < r (no infection step can
    ever occur inside the window) or floor(t0) > n (the bottleneck lies
    beyond the vertex count, so the window is meaningless).  The advisory
    regime warning from compute_t0 propagates.
    """
    t0 = compute_t0(n, p, r)
    t_floor = window_floor(t0)
    if t_floor < r:
        raise DegenerateRegimeError(
            f"floor(t0)={t_floor} < r={r}: no vertex can reach threshold within the window"
        )
    if t_floor > n:
        raise DegenerateRegimeError(
            f"floor(t0)={t_floor} exceeds n={n}: bottleneck beyond the vertex count"
        )
    pis = pi_hat_table(t_floor, p, r)
    t = np.arange(t_floor + 1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        f = np.where(pis < 1.0, (n * pis - t) / (1.0 - pis), np.inf)
    tc = int(np.argmin(f))  # argmin returns the smallest minimizer
    ac = float(-f[tc])
    tc_asym = math.exp((math.lgamma(r) - math.log(n) - r * math.log(p)) / (r - 1))
    ac_asym = (1.0 - 1.0 / r) * tc_asym
    return CriticalQuantities(
        t0=float(t0),
        tc=tc,
        ac=ac,
        tc_asymptotic=float(tc_asym),
        ac_asymptotic=float(ac_asym),
        pi_hat_table=pis,
    )


def compute_ac_tc(n: int, p: float, r: int) -> tuple[float, int]:
    """(ac, tc): critical seed size and the smallest bottleneck step."""
    crit = critical_quantities(n, p, r)
    return crit.ac, crit.tc


def ac_tc_real_relaxation(n: int, p: float, r: int) -> dict:
    """Diagnostic: minimize the drift margin over *real* t in [r, floor(t0)]
    via the regularized-incomplete-beta extension of the binomial tail,
    and report how far the integer minimizer sits from the real one.

    Report-only; the integer quantities are authoritative.
    """
    from scipy.optimize import minimize_scalar
    from scipy.special import betainc

    crit = critical_quantities(n, p, r)
    hi = window_floor(crit.t0)

    def f(t: float) -> float:
        pi = float(betainc(r, t - r + 1.0, p))
        return (n * pi - t) / (1.0 - pi)

    res = minimize_scalar(f, bounds=(float(r), float(hi)), method="bounded")
    tc_real = float(res.x)
    ac_real = float(-res.fun)
    return {
        "tc": crit.tc,
        "ac": crit.ac,
        "tc_real": tc_real,
        "ac_real": ac_real,
        "tc_gap": tc_real - crit.tc,
        "ac_gap": ac_real - crit.ac,
    }


def rho_giant(c: float) -> float:
    """The unique rho in (0, 1) with 1 - rho = exp(-c * rho), for c > 1.

    Bisection brackets the root away from the trivial rho = 0 solution,
    then Newton iterations polish it to |1 - rho - exp(-c rho)| < 1e-12.
    """
    if not c > 1.0:
        raise ValueError(f"mean degree must exceed 1, got {c!r}")

    def g(x: float) -> float:
        return 1.0 - x - math.exp(-c * x)

    lo = 1e-12
    hi = 1.0 - math.exp(-c) / 2.0
    if not (g(lo) > 0.0 and g(hi) < 0.0):  # pragma: no cover - bracket is analytic
        raise RuntimeError("root bracket failed")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    rho = 0.5 * (lo + hi)
    for _ in range(8):
        deriv = -1.0 + c * math.exp(-c * rho)
        step = g(rho) / deriv
        rho -= step
        if abs(step) < 1e-15:
            break
    # for large c the root sits within one ulp of 1; keep the open interval
    rho = min(rho, math.nextafter(1.0, 0.0))
    if abs(g(rho)) >= 1e-12:  # pragma: no cover - Newton converges quadratically
        raise RuntimeError(f"rho solver residual {g(rho):.3e} too large for c={c}")
    return rho


def _clamp_prob(x: float) -> float:
    return min(1.0, max(0.0, x))


def chernoff_bounds(mean: float, lam: float) -> tuple[float, float]:
    """Binomial tail bounds: P[X <= mean - lam] <= exp(-lam^2 / (2 mean))
    and P[X >= mean + lam] <= exp(-lam^2 / (2 (mean + lam/3))).
    """
    if mean <= 0 or lam <= 0:
        raise ValueError("mean and lam must be positive")
    lower = math.exp(-(lam * lam) / (2.0 * mean))
    upper = math.exp(-(lam * lam) / (2.0 * (mean + lam / 3.0)))
    return _clamp_prob(lower), _clamp_prob(upper)


def subcritical_failure_bound(omega0: float, t0: float) -> float:
    """Failure-probability ceiling exp(-omega0^2 / (10 t0)) for seeding
    omega0 below the critical size: with at least the complementary
    probability the final set stays below tc.
    """
    if omega0 <= 0 or t0 <= 0:
        raise ValueError("omega0 and t0 must be positive")
    return _clamp_prob(math.exp(-(omega0 * omega0) / (10.0 * t0)))


def supercritical_failure_bound(omega0: float, t0: float, ac: float) -> float:
    """Failure-probability ceiling exp(-omega0^2 / (10 t0)) +
    exp(-(ac + omega0) / 4) for seeding omega0 above the critical size:
    with at least the complementary probability almost every vertex is
    eventually infected.
    """
    if ac <= 0:
        raise ValueError("ac must be positive")
    sub = subcritical_failure_bound(omega0, t0)
    return _clamp_prob(sub + math.exp(-(ac + omega0) / 4.0))


def martingale_excursion_bound(lam: float, t: int, n: int, p: float, r: int) -> float:
    """One-sided ceiling exp(-lam^2 (1-pi)^3 / (2 (n pi + lam/3))) with
    pi = pi_hat(t), on the probability that the centered infection count
    ever drifts past lam within the first t steps.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    pi = binom_tail_geq(t, p, r)
    if pi >= 1.0:
        return 1.0
    expo = (lam * lam) * (1.0 - pi) ** 3 / (2.0 * (n * pi + lam / 3.0))
    return _clamp_prob(math.exp(-expo))

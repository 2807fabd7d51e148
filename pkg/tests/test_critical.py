import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from bootperc import (
    DegenerateRegimeError,
    RegimeWarning,
    ac_tc_real_relaxation,
    binom_tail_geq,
    chernoff_bounds,
    compute_ac_tc,
    compute_t0,
    critical_quantities,
    drift_table,
    martingale_excursion_bound,
    pi_hat_table,
    rho_giant,
    subcritical_failure_bound,
    supercritical_failure_bound,
)


def mp_tail_geq(t, p, r):
    """Extended-precision oracle: direct summation of the upper tail."""
    with mpmath.workdps(50):
        pm = mpmath.mpf(p)
        total = mpmath.mpf(0)
        for j in range(r, t + 1):
            total += mpmath.binomial(t, j) * pm**j * (1 - pm) ** (t - j)
        return float(total)


def test_tail_trivial_cases():
    assert binom_tail_geq(1, 0.3, 2) == 0.0
    assert binom_tail_geq(2, 0.5, 2) == pytest.approx(0.25, abs=1e-15)
    assert binom_tail_geq(5, 0.0, 2) == 0.0
    assert binom_tail_geq(5, 1.0, 2) == 1.0
    assert binom_tail_geq(5, 0.3, 0) == 1.0
    with pytest.raises(ValueError):
        binom_tail_geq(-1, 0.3, 2)
    with pytest.raises(ValueError):
        binom_tail_geq(5, 1.3, 2)


def test_tail_example_t10():
    exact = 1.0 - 0.9**10 - 10 * 0.1 * 0.9**9
    got = binom_tail_geq(10, 0.1, 2)
    assert got == pytest.approx(exact, abs=1e-14)
    assert got == pytest.approx(0.2639011, abs=5e-7)


def test_tail_against_extended_precision_grid():
    for t in range(0, 31):
        for r in range(0, 6):
            for p in (0.01, 0.1, 0.3, 0.5):
                assert abs(binom_tail_geq(t, p, r) - mp_tail_geq(t, p, r)) < 1e-12


def test_tail_against_scipy_third_route():
    # regularized incomplete beta identity as an extra independent route
    from scipy.special import betainc

    for t, p, r in [(100, 0.01, 2), (1000, 0.002, 3), (37, 0.2, 4), (2500, 1e-4, 2)]:
        assert binom_tail_geq(t, p, r) == pytest.approx(
            float(betainc(r, t - r + 1, p)), abs=1e-12
        )


def test_tail_monotone_in_t_and_p():
    for p in (1e-4, 1e-3, 0.01, 0.1, 0.5):
        table = pi_hat_table(1000, p, 2)
        assert np.all(np.diff(table) >= 0)
        assert table[0] == 0.0 and np.all((0 <= table) & (table <= 1))
    ts = (5, 50, 500)
    ps = (1e-4, 1e-3, 0.01, 0.1, 0.3, 0.5)
    for t in ts:
        vals = [binom_tail_geq(t, p, 2) for p in ps]
        assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))


def test_compute_t0_examples():
    assert compute_t0(10**6, 1e-4, 2) == pytest.approx(200.0, rel=1e-12)
    assert compute_t0(10**6, 1e-4, 3) == pytest.approx(math.sqrt(6 / (10**6 * 1e-12)), rel=1e-12)
    # n p^r = r!  =>  t0 = 1 (parameters sit outside the sparse regime,
    # so the advisory warning fires too)
    with pytest.warns(RegimeWarning):
        assert compute_t0(200, 0.1, 2) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        compute_t0(100, 0.0, 2)
    with pytest.raises(ValueError):
        compute_t0(100, 0.5, 1)


def test_compute_t0_regime_warning():
    with pytest.warns(RegimeWarning):
        compute_t0(10, 0.9, 2)
    with pytest.warns(RegimeWarning):
        compute_t0(10**6, 5e-7, 2)  # n*p = 0.5 < 10


def exact_ac_tc_oracle(n, p_frac, r, t_max):
    """Brute-force minimizer with exact rational arithmetic (r = 2 only)."""
    assert r == 2
    q = 1 - p_frac
    best_t, best_f = None, None
    for t in range(t_max + 1):
        pi = 1 - q**t - t * p_frac * q ** (t - 1) if t >= 1 else Fraction(0)
        f = (n * pi - t) / (1 - pi)
        if best_f is None or f < best_f:
            best_t, best_f = t, f
    return -best_f, best_t


def test_ac_tc_against_exact_oracle():
    n, r = 10**4, 2
    p = 0.005
    ac_oracle, tc_oracle = exact_ac_tc_oracle(n, Fraction(5, 1000), r, 8)
    assert compute_t0(n, p, r) == pytest.approx(8.0, rel=1e-12)
    ac, tc = compute_ac_tc(n, p, r)
    assert tc == tc_oracle
    assert ac == pytest.approx(float(ac_oracle), rel=1e-12)
    assert tc in (4, 5) and ac == pytest.approx(2.5, abs=0.1)


def test_ac_identity_and_smallest_minimizer():
    for n, p, r in [(10**4, 0.005, 2), (10**6, 1e-4, 2), (10**5, 2e-3, 3)]:
        crit = critical_quantities(n, p, r)
        pi_c = crit.pi_hat_table[crit.tc]
        assert crit.ac == pytest.approx((crit.tc - n * pi_c) / (1 - pi_c), rel=1e-12)
        assert crit.tc <= crit.t0
        f = drift_table(n, p, r)
        assert np.all(f[crit.tc] <= f + 1e-12)
        earlier = f[: crit.tc]
        if earlier.size:
            assert np.all(earlier > f[crit.tc])  # smallest minimizer, least tie


def test_ac_asymptotic_ratio_at_1e6():
    crit = critical_quantities(10**6, 1e-4, 2)
    assert crit.ac_asymptotic == pytest.approx(50.0, rel=1e-12)
    assert 0.9 <= crit.ac / crit.ac_asymptotic <= 1.1


def test_degenerate_regimes():
    with pytest.raises(DegenerateRegimeError):
        critical_quantities(10**6, 0.2, 2)  # floor(t0) < r
    with pytest.raises(DegenerateRegimeError):
        critical_quantities(100, 1e-9, 2)  # floor(t0) >> n


def test_real_relaxation_diagnostic():
    rep = ac_tc_real_relaxation(10**6, 1e-4, 2)
    assert abs(rep["tc_gap"]) <= 1.0
    assert rep["ac_real"] >= rep["ac"] - 1e-9  # real minimum can only be deeper
    assert rep["tc"] == critical_quantities(10**6, 1e-4, 2).tc


def rho_bisect_oracle(c, tol=1e-13):
    g = lambda x: 1.0 - x - math.exp(-c * x)
    lo, hi = 1e-12, 1.0 - math.exp(-c) / 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_rho_examples():
    assert rho_giant(50.0) > 0.999
    assert rho_giant(1.5) == pytest.approx(rho_bisect_oracle(1.5), abs=1e-10)
    assert rho_giant(1.5) == pytest.approx(0.5828, abs=1e-3)
    for r in range(2, 13):
        assert rho_giant(3 * r / 4) > 0.5
    with pytest.raises(ValueError):
        rho_giant(1.0)
    with pytest.raises(ValueError):
        rho_giant(0.3)


def test_rho_residuals():
    for c in (1.1, 1.5, 2.0, 5.0, 50.0, 1.01, 7.3):
        rho = rho_giant(c)
        assert abs(1.0 - rho - math.exp(-c * rho)) < 1e-12
        assert 0.0 < rho < 1.0


def test_failure_bounds_examples():
    assert subcritical_failure_bound(1e-12, 266.0) == pytest.approx(1.0, abs=1e-9)
    omega = math.sqrt(10 * 266.0 * math.log(100))
    assert subcritical_failure_bound(omega, 266.0) == pytest.approx(0.01, rel=1e-9)
    got = supercritical_failure_bound(57.0, 266.0, 66.0)
    expect = math.exp(-(57.0**2) / 2660.0) + math.exp(-123.0 / 4.0)
    assert got == pytest.approx(expect, rel=1e-12)
    assert got == pytest.approx(0.2948, abs=2e-4)


def test_failure_bounds_monotone_in_omega0():
    omegas = np.linspace(1, 200, 40)
    sub = [subcritical_failure_bound(w, 266.0) for w in omegas]
    sup = [supercritical_failure_bound(w, 266.0, 66.0) for w in omegas]
    assert all(a >= b for a, b in zip(sub, sub[1:]))
    assert all(a >= b for a, b in zip(sup, sup[1:]))
    assert all(0.0 <= x <= 1.0 for x in sub + sup)


def test_excursion_bound():
    # pi_hat(t) = 0 for t < r collapses the bound to exp(-3 lam / 2)
    for lam in (0.5, 2.0, 10.0):
        assert martingale_excursion_bound(lam, 1, 10**6, 1e-4, 2) == pytest.approx(
            math.exp(-1.5 * lam), rel=1e-12
        )
    pi = binom_tail_geq(100, 1e-4, 2)
    lam = 50.0
    expect = math.exp(-(lam**2) * (1 - pi) ** 3 / (2 * (10**6 * pi + lam / 3)))
    assert martingale_excursion_bound(lam, 100, 10**6, 1e-4, 2) == pytest.approx(expect, rel=1e-12)
    lams = np.linspace(0.5, 100, 25)
    vals = [martingale_excursion_bound(l, 100, 10**6, 1e-4, 2) for l in lams]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_chernoff_examples():
    lower, upper = chernoff_bounds(100.0, 20.0)
    assert lower == pytest.approx(math.exp(-2.0), rel=1e-12)
    _, upper = chernoff_bounds(100.0, 30.0)
    assert upper == pytest.approx(math.exp(-900.0 / 220.0), rel=1e-12)
    lower, upper = chernoff_bounds(100.0, 1e-9)
    assert lower == pytest.approx(1.0, abs=1e-12)
    assert upper == pytest.approx(1.0, abs=1e-12)
    lams = np.linspace(0.1, 80, 30)
    pairs = [chernoff_bounds(100.0, l) for l in lams]
    assert all(a[0] >= b[0] and a[1] >= b[1] for a, b in zip(pairs, pairs[1:]))

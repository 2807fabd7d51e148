import numpy as np
import pytest

from bootperc import (
    DIFF_DRIFT,
    DIFF_FLIP,
    PiProcess,
    ProcessParams,
    binom_tail_geq,
    collect_martingale_samples,
    empirical_martingale_check,
    empirical_variance_check,
    export_martingale_csv,
    martingale_from_trace,
    reconstruct_infected_size,
    round_differences,
    run_exploration,
    variance_ceiling,
)
from conftest import random_instance


def seeds(*vals):
    return np.array(vals, dtype=np.int32)


def run_with_pi(params, p, t_max=None):
    trace = run_exploration(params)
    pi = PiProcess.from_trace(trace, p, t_max=t_max)
    return trace, pi


def test_m_zero_at_start(triangle):
    trace, pi = run_with_pi(ProcessParams(triangle, 2, seeds(1, 2)), p=0.5, t_max=3)
    mt = martingale_from_trace(trace, pi)
    assert mt.step_values[0] == 0.0


def test_no_flip_closed_form(empty6):
    # empty graph, nothing flips: M(t) = -(n - a) pi(t) / (1 - pi(t))
    p = 0.3
    trace, pi = run_with_pi(ProcessParams(empty6, 2, seeds(1, 2, 3)), p=p, t_max=3)
    mt = martingale_from_trace(trace, pi)
    for t in range(4):
        pi_t = binom_tail_geq(min(t, 3), p, 2)
        assert mt.step_values[t] == pytest.approx(-3 * pi_t / (1 - pi_t), rel=1e-12)


def test_p_zero_gives_identically_zero(empty6):
    trace, pi = run_with_pi(ProcessParams(empty6, 2, seeds(1, 2, 3)), p=0.0)
    mt = martingale_from_trace(trace, pi)
    assert np.all(mt.step_values == 0.0)


def test_pi_process_definition():
    params = random_instance(4242)
    p = params.graph.params.p
    trace = run_exploration(params)
    T = trace.stopping_time
    pi = PiProcess.from_trace(trace, p, t_max=min(T + 5, params.graph.n))
    for t in range(pi.t_max + 1):
        hat = binom_tail_geq(t, p, params.r)
        assert pi.hat_values[t] == pytest.approx(hat, abs=1e-15)
        expect = hat if t <= T else binom_tail_geq(T, p, params.r)
        assert pi.values[t] == pytest.approx(expect, abs=1e-15)
    assert np.all(pi.values <= pi.hat_values + 1e-15)


def test_round_trip_identity_random_instances():
    for i in range(40):
        params = random_instance(i + 77)
        p = params.graph.params.p
        trace, pi = run_with_pi(params, p)
        mt = martingale_from_trace(trace, pi)
        recon = reconstruct_infected_size(mt)
        assert np.allclose(recon, mt.infected_size, rtol=1e-9, atol=1e-9)


def test_t_prime_equals_stopping_time():
    for i in range(40):
        params = random_instance(i + 177)
        p = params.graph.params.p
        trace = run_exploration(params)
        # horizon must cover T for the crossing to be visible
        t_max = min(trace.stopping_time + 3, params.graph.n)
        pi = PiProcess.from_trace(trace, p, t_max=t_max)
        mt = martingale_from_trace(trace, pi)
        assert mt.t_prime == trace.stopping_time


def test_singular_pi_rejected(triangle):
    trace = run_exploration(ProcessParams(triangle, 2, seeds(1, 2)))
    pi = PiProcess.from_trace(trace, p=1.0, t_max=3)
    with pytest.raises(ZeroDivisionError):
        martingale_from_trace(trace, pi)


def test_flip_difference_value(triangle):
    # K3: vertex 3 flips at step 2; pi is flat there (pi_hat(1) = pi_hat(2)
    # only if r > 2; for r = 2 use the exact expression instead)
    p = 0.5
    trace, pi = run_with_pi(ProcessParams(triangle, 2, seeds(1, 2)), p=p, t_max=3)
    diffs = round_differences(trace, pi)
    flips = diffs.value[diffs.kind == DIFF_FLIP]
    assert flips.size == 1
    assert flips[0] == pytest.approx(1.0 / (1.0 - binom_tail_geq(1, p, 2)), rel=1e-12)
    # r = 2 means pi_hat(1) = 0: the flip difference is exactly 1
    assert flips[0] == 1.0


def test_drift_zero_when_pi_flat(empty6):
    # after T the pi process freezes, so drift rows vanish
    trace, pi = run_with_pi(ProcessParams(empty6, 2, seeds(1, 2, 3)), p=0.4, t_max=6)
    diffs = round_differences(trace, pi)
    frozen = diffs.value[(diffs.kind == DIFF_DRIFT) & (diffs.tau > 3)]
    assert np.all(frozen == 0.0)


def test_differences_within_ceiling_random():
    for i in range(30):
        params = random_instance(i + 300)
        p = params.graph.params.p
        trace, pi = run_with_pi(params, p)
        diffs = round_differences(trace, pi)
        assert diffs.within_bounds()
        counts_total = diffs.count.sum() if diffs.count.size else 0
        # every (tau, iota) round accounted for: (n - a) per step
        assert counts_total == (params.graph.n - params.a) * pi.t_max


def test_multiplicity_bookkeeping(star5):
    p = 0.2
    trace, pi = run_with_pi(ProcessParams(star5, 2, seeds(2, 3)), p=p)
    diffs = round_differences(trace, pi)
    for tau in range(1, pi.t_max + 1):
        rows = diffs.count[diffs.tau == tau].sum()
        assert rows == star5.n - 2


def test_empirical_checks_smoke():
    n, p, r, a = 2000, 3e-3, 2, 25
    t_probe = 12
    samples = collect_martingale_samples(n, p, r, a, t_probe, trials=200, seed=3, workers=1)
    mean_rep = empirical_martingale_check(n, p, r, a, t_probe, 200, 3, samples=samples)
    var_rep = empirical_variance_check(n, p, r, a, t_probe, 200, 3, samples=samples)
    assert abs(mean_rep.z) <= 5.0
    assert mean_rep.stderr > 0
    assert var_rep.ceiling == pytest.approx(variance_ceiling(n, p, r, t_probe), rel=1e-12)
    assert samples.diff_within_bounds
    assert var_rep.var <= var_rep.ceiling * 1.6  # loose smoke bound


def test_empirical_t_probe_zero():
    samples = collect_martingale_samples(500, 0.01, 2, 10, 0, trials=20, seed=1, workers=1)
    assert np.all(samples.values == 0.0)
    rep = empirical_martingale_check(500, 0.01, 2, 10, 0, 20, 1, samples=samples)
    assert rep.mean == 0.0 and rep.z == 0.0


def test_empirical_p_zero():
    samples = collect_martingale_samples(50, 0.0, 2, 5, 10, trials=10, seed=1, workers=1)
    assert np.all(samples.values == 0.0)
    rep = empirical_variance_check(50, 0.0, 2, 5, 10, 10, 1, samples=samples)
    assert rep.var == 0.0 and rep.ceiling == 0.0


def test_martingale_csv_export(tmp_path):
    params = random_instance(9)
    p = params.graph.params.p
    trace, pi = run_with_pi(params, p)
    mt = martingale_from_trace(trace, pi)
    path = tmp_path / "mart.csv"
    export_martingale_csv(mt, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,pi_t,M_t,infected_size"
    assert len(lines) == pi.t_max + 2
    t0, pi0, m0, a0 = lines[1].split(",")
    assert (t0, float(pi0), float(m0), int(a0)) == ("0", 0.0, 0.0, params.a)


def test_collector_deterministic_across_workers():
    kw = dict(n=1500, p=4e-3, r=2, a=20, t_probe=10, trials=24, seed=11)
    s1 = collect_martingale_samples(**kw, workers=1)
    s2 = collect_martingale_samples(**kw, workers=2)
    assert np.array_equal(s1.values, s2.values)
    assert s1.max_diff_ratio == s2.max_diff_ratio

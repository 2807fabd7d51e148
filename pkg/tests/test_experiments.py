import json
import math

import numpy as np
import pytest

from bootperc import (
    AMBIGUOUS,
    SUBCRITICAL,
    SUPERCRITICAL,
    classify_final_size,
    completion_check,
    critical_quantities,
    early_growth_check,
    giant_component,
    giant_completion_trials,
    graph_from_pairs,
    near_infected_set,
    rho_giant,
    run_trial,
    sample_gnp,
    seed_size_for_offset,
    sweep_omega0,
    binom_tail_geq,
    GraphParams,
)

# a small but regular cell: n p^2 = n^{-0.4}, t0 ~ 105
N_SMOKE = 20_000
P_SMOKE = float(N_SMOKE) ** -0.7
R_SMOKE = 2


def test_classification_thresholds():
    assert classify_final_size(5, 1000, tc=10) == SUBCRITICAL
    assert classify_final_size(10, 1000, tc=10) == AMBIGUOUS
    assert classify_final_size(501, 1000, tc=10) == SUPERCRITICAL
    assert classify_final_size(500, 1000, tc=10) == AMBIGUOUS


def test_run_trial_extremes():
    out = run_trial(5000, 0.01, 2, a=0, seed=1)
    assert out.final_size == 0 and out.classification == SUBCRITICAL
    out = run_trial(5000, 0.01, 2, a=5000, seed=2)
    assert out.final_size == 5000 and out.classification == SUPERCRITICAL
    assert out.stopping_time == 5000 and out.t0_reached
    with pytest.raises(ValueError):
        run_trial(100, 0.01, 2, a=101, seed=3)


def test_run_trial_fields_consistent():
    crit = critical_quantities(N_SMOKE, P_SMOKE, R_SMOKE)
    a = seed_size_for_offset(crit.ac, 3.0 * math.sqrt(crit.t0), N_SMOKE)
    out = run_trial(N_SMOKE, P_SMOKE, R_SMOKE, a, seed=10)
    assert out.classification in (SUBCRITICAL, SUPERCRITICAL, AMBIGUOUS)
    if out.t0_reached:
        assert out.infected_at_t0 is not None
        assert out.infected_at_t0 > math.floor(crit.t0)
    else:
        assert out.infected_at_t0 is None
    assert out.stopping_time == out.final_size


def test_seed_size_for_offset():
    assert seed_size_for_offset(66.0, 57.0, 1000) == 123
    assert seed_size_for_offset(66.0, -57.0, 1000) == 9
    assert seed_size_for_offset(5.0, -100.0, 1000) == 0
    assert seed_size_for_offset(5.0, 1e9, 1000) == 1000


def test_sweep_fractions_and_bounds():
    crit = critical_quantities(N_SMOKE, P_SMOKE, R_SMOKE)
    om_up = 3.0 * math.sqrt(crit.t0)
    # keep the below-cell hypothesis 0 < omega0 <= ac - r satisfiable at
    # this small scale
    om_down = min(om_up, crit.ac - R_SMOKE - 0.5)
    rep = sweep_omega0(
        N_SMOKE, P_SMOKE, R_SMOKE, [-om_down, 0.0, om_up], 12, seed=5, workers=2
    )
    below, middle, above = rep.cells
    assert below.frac_sub + below.frac_super + below.frac_ambig == pytest.approx(1.0)
    assert not below.bound_exempt and not above.bound_exempt
    assert middle.bound_exempt and middle.bound is None
    assert below.frac_sub >= 0.9  # deep subcritical at 3 sd
    assert above.frac_super >= 0.9
    assert below.failure_fraction <= below.bound + 5 * math.sqrt(
        below.bound * (1 - below.bound) / below.trials
    )
    assert len(below.final_sizes) == 12 and below.final_sizes == sorted(below.final_sizes)


def test_sweep_bound_exempt_marking():
    # omega0 beyond t0 - ac must be marked exempt but still run
    crit = critical_quantities(N_SMOKE, P_SMOKE, R_SMOKE)
    om = (crit.t0 - crit.ac) * 1.5
    rep = sweep_omega0(N_SMOKE, P_SMOKE, R_SMOKE, [om], 3, seed=6, workers=1)
    assert rep.cells[0].bound_exempt
    with pytest.raises(ValueError):
        sweep_omega0(N_SMOKE, P_SMOKE, R_SMOKE, [], 3, seed=6)


def test_sweep_deterministic_across_workers():
    om = 25.0
    kw = dict(trials_per_cell=6, seed=77)
    r1 = sweep_omega0(N_SMOKE, P_SMOKE, R_SMOKE, [-om, om], **kw, workers=1)
    r2 = sweep_omega0(N_SMOKE, P_SMOKE, R_SMOKE, [-om, om], **kw, workers=2)
    assert json.dumps(r1.to_json_dict(), sort_keys=True) == json.dumps(
        r2.to_json_dict(), sort_keys=True
    )
    assert r1.to_csv_text() == r2.to_csv_text()


def test_near_infected_set_examples():
    # path 1-2-3-4-5-6; checked = {2, 3}; r = 2 wants >= 1 neighbor
    g = graph_from_pairs(6, np.array([1, 2, 3, 4, 5]), np.array([2, 3, 4, 5, 6]))
    got = near_infected_set(g, [2, 3], r=2)
    assert got.tolist() == [1, 4]  # adjacent to exactly r-1 = 1 checked vertex
    assert near_infected_set(g, [2, 3], r=3).tolist() == []  # r-2 neighbors excluded
    got = near_infected_set(g, [2, 3], r=2, exclude=[4])
    assert got.tolist() == [1]
    # r - 1 = 2 neighbors inside checked
    got = near_infected_set(g, [1, 3], r=3)
    assert got.tolist() == [2]


def test_giant_component_examples():
    # no internal edges: singletons
    g = graph_from_pairs(6, np.array([1, 2, 3, 4, 5]), np.array([2, 3, 4, 5, 6]))
    comp, size = giant_component(g, [1, 3, 5])
    assert size == 1
    comp, size = giant_component(g, [2, 3, 4, 5])  # spans a path
    assert size == 4 and comp.tolist() == [2, 3, 4, 5]
    comp, size = giant_component(g, [])
    assert size == 0


def test_giant_component_matches_scipy():
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    g = sample_gnp(GraphParams(800, 0.004, 3))
    members = np.arange(1, 401, dtype=np.int32)
    comp, size = giant_component(g, members)
    # independent route: scipy connected components on the induced subgraph
    idx = {int(v): i for i, v in enumerate(members)}
    rows, cols = [], []
    for v in members:
        for w in g.neighbors(int(v)).tolist():
            if w in idx:
                rows.append(idx[int(v)])
                cols.append(idx[w])
    mat = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(400, 400))
    _, labels = connected_components(mat, directed=False)
    _, counts = np.unique(labels, return_counts=True)
    assert size == counts.max()


def test_giant_in_gnp_matches_rho():
    # induced G(m, c/m) with c = 1.5: largest component ~ rho(1.5) * m
    m = 4000
    c = 1.5
    g = sample_gnp(GraphParams(m, c / m, 12))
    comp, size = giant_component(g, np.arange(1, m + 1, dtype=np.int32))
    assert size >= 0.9 * rho_giant(c) * m


def test_completion_check_hand_instance():
    # 8 vertices; U' = {1,2}, checked = {3}, exclude = {4}
    u = np.array([1, 2, 1, 2, 6, 5])
    v = np.array([5, 5, 6, 7, 7, 8])
    g = graph_from_pairs(8, u, v)
    rep = completion_check(g, [1, 2], [3], r=2, p=0.25, exclude=[4])
    # candidates {5,6,7,8}: degrees into U' are 2,1,1,0 -> stage1 set = {5}
    assert rep.stage1_count == 1
    assert rep.stage1_threshold == pytest.approx(8 / (8 * math.sqrt(math.e)))
    assert rep.stage1_pass  # 1 >= 0.6065
    # floor(threshold) = 0 -> B' empty; everyone left has < 2 neighbors in B'
    assert rep.stage2_count == 3  # {6, 7, 8}
    assert rep.stage2_threshold == 4.0
    assert rep.stage2_pass
    with pytest.raises(ValueError):
        completion_check(g, [1], [3], r=2, p=0.25)  # |U'| < floor(1/(2p)) = 2


def test_completion_stage1_probability_matches_poisson_limit():
    # per-vertex stage-1 success probability at |U'| p = 1/2 for r = 2
    # approaches 1 - e^{-1/2}(1 + 1/2) = 0.090204
    val = binom_tail_geq(5000, 1e-4, 2)
    assert val == pytest.approx(1 - math.exp(-0.5) * 1.5, abs=5e-4)


def test_early_growth_smoke():
    crit = critical_quantities(N_SMOKE, P_SMOKE, R_SMOKE)
    om = 3.0 * math.sqrt(crit.t0)
    rep = early_growth_check(N_SMOKE, P_SMOKE, R_SMOKE, om, trials=60, seed=9, workers=2)
    assert rep.within_bound
    assert rep.success_fraction >= 0.8
    assert rep.size_threshold == pytest.approx(crit.t0 + crit.ac / 2 + om / 2)
    with pytest.raises(ValueError):
        early_growth_check(N_SMOKE, P_SMOKE, R_SMOKE, -1.0, trials=5, seed=9)


def test_giant_completion_pipeline_smoke():
    crit = critical_quantities(N_SMOKE, P_SMOKE, R_SMOKE)
    om = 3.0 * math.sqrt(crit.t0)
    reports = giant_completion_trials(
        N_SMOKE, P_SMOKE, R_SMOKE, om, trials=5, seed=2, workers=2
    )
    assert len(reports) == 5
    for rep in reports:
        assert rep.t0_reached
        assert rep.near_size >= 0
        assert rep.near_threshold == pytest.approx(1.5 / P_SMOKE)
        if rep.giant_size is not None:
            assert rep.giant_size <= rep.w_size
        if rep.completion is not None:
            assert rep.completion.stage1_count >= 0
            d = rep.to_json_dict()
            assert set(d["completion"]) == {
                "stage1_count", "stage1_threshold", "stage1_pass",
                "stage2_count", "stage2_threshold", "stage2_pass",
            }

"""Bootstrap percolation on binomial random graphs.

A numpy/numba toolkit for the threshold-r infection process on G(n, p):
two equivalent process engines (round-synchronous and sequential
exploration), numerically careful critical quantities (t0, tc, ac, the
giant-component density rho, and closed-form failure bounds), martingale
reconstruction and empirical concentration checks, and a seeded Monte
Carlo harness that reproduces the subcritical/supercritical dichotomy at
desk scale.
"""

from .critical import (
    CriticalQuantities,
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
    window_floor,
)
from .experiments import (
    AMBIGUOUS,
    SUBCRITICAL,
    SUPERCRITICAL,
    CompletionReport,
    EarlyGrowthReport,
    GiantTrialReport,
    SweepCell,
    SweepReport,
    TrialOutcome,
    classify_final_size,
    completion_check,
    early_growth_check,
    giant_component,
    giant_completion_trials,
    near_infected_set,
    run_trial,
    seed_size_for_offset,
    sweep_omega0,
)
from .graphs import (
    Graph,
    GraphParams,
    degree_into,
    edge_pairs,
    graph_from_pairs,
    read_edge_list,
    sample_gnp,
    validate_graph,
    write_edge_list,
)
from .martingale import (
    DIFF_DRIFT,
    DIFF_FLIP,
    DIFF_KIND_NAMES,
    DIFF_SETTLED,
    MartingaleCheckReport,
    MartingaleSamples,
    MartingaleTrace,
    PiProcess,
    RoundDifferences,
    VarianceCheckReport,
    collect_martingale_samples,
    empirical_martingale_check,
    empirical_variance_check,
    export_martingale_csv,
    martingale_from_trace,
    reconstruct_infected_size,
    round_differences,
    variance_ceiling,
)
from .process import (
    ExplorationTrace,
    ProcessParams,
    RelabeledInstance,
    SELECTION_POLICIES,
    SelectionRule,
    export_trace_csv,
    random_seed_set,
    relabel_for_exploration,
    run_exploration,
    run_synchronous,
)
from .rng import derive_seed, substream

__version__ = "0.1.0"

__all__ = [
    "AMBIGUOUS",
    "CompletionReport",
    "DIFF_DRIFT",
    "DIFF_FLIP",
    "DIFF_KIND_NAMES",
    "DIFF_SETTLED",
    "CriticalQuantities",
    "DegenerateRegimeError",
    "EarlyGrowthReport",
    "ExplorationTrace",
    "GiantTrialReport",
    "Graph",
    "GraphParams",
    "MartingaleCheckReport",
    "MartingaleSamples",
    "MartingaleTrace",
    "PiProcess",
    "ProcessParams",
    "RegimeWarning",
    "RelabeledInstance",
    "RoundDifferences",
    "SELECTION_POLICIES",
    "SUBCRITICAL",
    "SUPERCRITICAL",
    "SelectionRule",
    "SweepCell",
    "SweepReport",
    "TrialOutcome",
    "VarianceCheckReport",
    "ac_tc_real_relaxation",
    "binom_tail_geq",
    "chernoff_bounds",
    "classify_final_size",
    "collect_martingale_samples",
    "completion_check",
    "compute_ac_tc",
    "compute_t0",
    "critical_quantities",
    "degree_into",
    "derive_seed",
    "drift_table",
    "early_growth_check",
    "edge_pairs",
    "empirical_martingale_check",
    "empirical_variance_check",
    "export_martingale_csv",
    "export_trace_csv",
    "giant_component",
    "giant_completion_trials",
    "graph_from_pairs",
    "martingale_excursion_bound",
    "martingale_from_trace",
    "near_infected_set",
    "pi_hat_table",
    "random_seed_set",
    "read_edge_list",
    "reconstruct_infected_size",
    "relabel_for_exploration",
    "rho_giant",
    "round_differences",
    "run_exploration",
    "run_synchronous",
    "run_trial",
    "sample_gnp",
    "seed_size_for_offset",
    "subcritical_failure_bound",
    "substream",
    "supercritical_failure_bound",
    "sweep_omega0",
    "validate_graph",
    "variance_ceiling",
    "window_floor",
    "write_edge_list",
]

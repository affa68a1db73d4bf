"""Simulation and likelihood inference for hybrid PA/UA directed networks."""

from ._hrn import (
    DegreeCounts,
    DerivedConstants,
    EstimationResult,
    HybridParams,
    LimitPmf,
    NetworkState,
    ParseError,
    Scenario,
    SimulationResult,
    SufficientStats,
    ValidationError,
    attach_prob_in,
    attach_prob_out,
    ccdf,
    classify_scenario,
    degree_counts,
    derived_constants,
    fit_integrated,
    fit_mh,
    fit_nelder_mead,
    limit_pmf,
    limit_pmf_quadrature,
    log_likelihood,
    mle_scenarios,
    nb_pmf,
    parse_edge_file,
    replay,
    replicate_seed,
    score,
    simulate,
    simulate_replicates,
    step_distribution,
    window,
)

__version__ = "0.1.0"

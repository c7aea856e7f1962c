"""Tempered hierarchical ReCom sampler (compiled core)."""

from ._core import (
    MeasureParams,
    ParseError,
    Plan,
    RegionGraph,
    SamplerError,
    ScoreBreakdown,
    ValidationError,
    config_hash,
    count_county_splits,
    isoperimetric_score,
    ks_statistic,
    load_graph,
    load_plan,
    log_density,
    log_hierarchical_tree_count,
    log_tree_count,
    parse_graph,
    quantile_type7,
    run_cli,
    sample,
    seats_won,
    swap_log_ratio,
    uniform_swing,
    validate_plan,
    vra_general_condition,
    vra_primary_condition,
)

__all__ = [name for name in dir() if not name.startswith("_")]

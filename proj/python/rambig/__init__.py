"""Robust MDPs with optimized norm weights for the ambiguity sets."""

from ._core import (
    AmbiguitySet,
    DomainKind,
    Estimator,
    InsufficientData,
    MethodSpec,
    NormKind,
    SampleStats,
    TabularMdp,
    ZSource,
    config_schema,
    credible_index,
    dual_lower_bound,
    emit_plot_data,
    hoeffding_l1_psi,
    make_domain,
    optimal_weights,
    run_experiment,
    run_weighted_pipeline,
    simulate_dataset,
    single_update_guarantee,
    value_iteration,
    weighted_l1_tail,
    weighted_linf_tail,
    worst_case,
)

__all__ = [name for name in dir() if not name.startswith("_")]

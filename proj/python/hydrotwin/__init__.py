"""Hydraulic loop digital twin: simulation, dataset generation, training and FDD."""

from ._core import (
    CampaignSpec,
    ComponentVector,
    ConfusionMatrix,
    ControlVector,
    Error,
    FddModels,
    FddOutcome,
    FddReport,
    InvalidInput,
    LoopConfig,
    Parameter,
    ProcessVector,
    SampleRecord,
    SamplingPlan,
    ThresholdVector,
    TwinState,
    detect,
    evaluate_localization,
    generate,
    records_from_csv,
    records_to_csv,
    run_campaign,
    run_fdd,
    simulate,
    solve_flow,
    split,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]

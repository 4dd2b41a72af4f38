from .dataset import (
    CHART_TYPES,
    EvalRecord,
    GroundTruth,
    GroundTruthPatch,
    MissingImage,
    PatchConflict,
    SchemaError,
    UnknownRecord,
    apply_patches,
    ground_truth_tsv,
    load_dataset,
    load_patches,
)
from .report import ItemScore, MetricReport, render_report
from .runner import (
    InsufficientData,
    ResponseCache,
    bootstrap_ci,
    echo_transport,
    perturbed_transport,
    run_eval,
)

__all__ = [
    "CHART_TYPES",
    "EvalRecord",
    "GroundTruth",
    "GroundTruthPatch",
    "InsufficientData",
    "ItemScore",
    "MetricReport",
    "MissingImage",
    "PatchConflict",
    "ResponseCache",
    "SchemaError",
    "UnknownRecord",
    "apply_patches",
    "bootstrap_ci",
    "echo_transport",
    "ground_truth_tsv",
    "load_dataset",
    "load_patches",
    "perturbed_transport",
    "render_report",
    "run_eval",
]

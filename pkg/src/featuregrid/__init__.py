"""featuregrid: skew-normal feature redistribution over VGG-style layers.

Generates families of architectures that keep the layer sequence and total
feature budget of a reference network while redistributing the per-layer
feature counts according to a three-parameter skew normal distribution, and
manages the surrounding experiment lifecycle (grid enumeration, manifests,
result aggregation, warm-restart schedule math).
"""

from .archgen import (
    ArchitectureSpec,
    FeatureAllocation,
    LayerSlot,
    NetworkTemplate,
    allocate,
    classify_shape,
    default_vgg10_template,
    default_vgg16_template,
    get_template,
    has_full_coverage,
    is_valid,
    realize,
    template_budget,
    vgg_budget,
)
from .expio import (
    Augmentation,
    BestPerXi,
    ExperimentManifest,
    ResultsConflictError,
    ResultsError,
    ResultsParseError,
    RunResult,
    ScatterRow,
    best_per_xi,
    ingest_results,
    manifest_for,
    manifest_from_json,
    manifest_to_json,
    read_manifests,
    scatter_data,
    write_manifests,
)
from .gridsearch import (
    GridSpec,
    GridSummary,
    SummaryRow,
    candidate_count,
    default_grid,
    enumerate_grid,
    summarize,
)
from .schedule import ScheduleParams, epoch_table, lr_at, restart_boundaries
from .skewnorm import (
    DEFAULT_SUBDIVISIONS,
    BinMasses,
    SkewNormalParams,
    bin_masses,
    distribution_mean,
    erf,
    interval_mass,
    pdf,
)

__version__ = "0.1.0"

__all__ = [
    "ArchitectureSpec",
    "Augmentation",
    "BestPerXi",
    "BinMasses",
    "DEFAULT_SUBDIVISIONS",
    "ExperimentManifest",
    "FeatureAllocation",
    "GridSpec",
    "GridSummary",
    "LayerSlot",
    "NetworkTemplate",
    "ResultsConflictError",
    "ResultsError",
    "ResultsParseError",
    "RunResult",
    "ScatterRow",
    "ScheduleParams",
    "SkewNormalParams",
    "SummaryRow",
    "allocate",
    "best_per_xi",
    "bin_masses",
    "candidate_count",
    "classify_shape",
    "default_grid",
    "default_vgg10_template",
    "default_vgg16_template",
    "distribution_mean",
    "enumerate_grid",
    "epoch_table",
    "erf",
    "get_template",
    "has_full_coverage",
    "ingest_results",
    "interval_mass",
    "is_valid",
    "lr_at",
    "manifest_for",
    "manifest_from_json",
    "manifest_to_json",
    "pdf",
    "read_manifests",
    "realize",
    "restart_boundaries",
    "scatter_data",
    "summarize",
    "template_budget",
    "vgg_budget",
    "write_manifests",
]

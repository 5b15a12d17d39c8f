"""fmconf: feature-model configuration engine for layered SaaS models.

Parses feature models (XML or arc-table dialect) into a
multiplicity-annotated hypergraph, enumerates valid configurations per
scope, computes exact variability and commonality metrics, and plans
requirement-driven configuration changes.
"""

__version__ = "0.1.0"

from .engine import (
    DEFAULT_SCOPE_CAP,
    LayerMetrics,
    Violation,
    ViolationReason,
    brute_force_enumerate,
    check_configuration,
    enumerate_configurations,
    is_valid,
    layer_metrics,
    layer_report,
)
from .ingest import (
    SourceFormat,
    parse,
    parse_arc_table,
    parse_feature_xml,
    serialize,
    serialize_arc_table,
    serialize_xml,
)
from .model import (
    ArcKind,
    Configuration,
    Feature,
    FeatureId,
    FeatureModel,
    HyperArc,
    Layer,
    Level,
    Multiplicity,
    build_model,
    classify_arc,
    scope_subtree,
)
from .selfconfig import (
    ReconfigurationPlan,
    RequirementSet,
    reconfigure,
    select_configuration,
)

__all__ = [
    "ArcKind",
    "Configuration",
    "DEFAULT_SCOPE_CAP",
    "Feature",
    "FeatureId",
    "FeatureModel",
    "HyperArc",
    "Layer",
    "LayerMetrics",
    "Level",
    "Multiplicity",
    "ReconfigurationPlan",
    "RequirementSet",
    "SourceFormat",
    "Violation",
    "ViolationReason",
    "brute_force_enumerate",
    "build_model",
    "check_configuration",
    "classify_arc",
    "enumerate_configurations",
    "is_valid",
    "layer_metrics",
    "layer_report",
    "parse",
    "parse_arc_table",
    "parse_feature_xml",
    "reconfigure",
    "scope_subtree",
    "select_configuration",
    "serialize",
    "serialize_arc_table",
    "serialize_xml",
]

"""portlayout: overview+detail layout for ported compound graphs."""

from .geometry import Rect
from .ingest import ParseError, emit_generic, parse_function_network, parse_generic
from .model import (
    Atom,
    CompoundGraph,
    Diagnostic,
    DuplicateMode,
    Edge,
    ExpansionPlan,
    ExpansionState,
    Group,
    GroupKind,
    Port,
    PortDirection,
    close_expansion,
    resolve_duplicates,
    validate,
)
from .pipeline import FatalDiagnosticsError, LayoutConfig, PipelineResult, run_pipeline
from .scene import Metrics, Scene, compute_metrics, from_json, to_json, to_svg

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "CompoundGraph",
    "Diagnostic",
    "DuplicateMode",
    "Edge",
    "ExpansionPlan",
    "ExpansionState",
    "FatalDiagnosticsError",
    "Group",
    "GroupKind",
    "LayoutConfig",
    "Metrics",
    "ParseError",
    "PipelineResult",
    "Port",
    "PortDirection",
    "Rect",
    "Scene",
    "close_expansion",
    "compute_metrics",
    "emit_generic",
    "from_json",
    "parse_function_network",
    "parse_generic",
    "resolve_duplicates",
    "run_pipeline",
    "to_json",
    "to_svg",
    "validate",
]

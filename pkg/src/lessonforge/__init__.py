"""Outcome-oriented lesson-plan authoring for VR training content.

The package follows the Backward-design cascade: an author states learning
outcomes, the engine derives objectives, skills, and assessment criteria,
and finally orders library activities into a lesson graph whose DFS
linearization is what the VR runtime consumes.
"""

from .errors import LessonForgeError
from .generator import (
    GeneratedItem,
    GeneratorRequest,
    GeneratorResult,
    LlmConfig,
    deterministic_generate,
    full_plan_generate,
    llm_generate,
)
from .graph import (
    Diagnostic,
    DiagnosticCategory,
    GraphEdge,
    GraphNode,
    LessonGraph,
    Severity,
    chain_from_sequence,
    linearize,
    validate,
)
from .interchange import (
    LessonFile,
    RuntimeEntry,
    RuntimeSequence,
    canonical_json_bytes,
    export_runtime_sequence,
    lesson_bytes,
    load_lesson,
    load_lesson_file,
    parse_script,
    preview,
    save_lesson,
)
from .library import (
    ActivityDescriptor,
    LibraryBundle,
    NodeProperties,
    PhaseCategory,
    list_by_phase,
    load_library,
    match_keywords,
    tokenize,
)
from .plan import (
    ActivityRef,
    HierarchyLevel,
    Mode,
    PlanDocument,
    PlanItem,
    Provenance,
)

__version__ = "0.1.0"

__all__ = [
    "ActivityDescriptor",
    "ActivityRef",
    "Diagnostic",
    "DiagnosticCategory",
    "GeneratedItem",
    "GeneratorRequest",
    "GeneratorResult",
    "GraphEdge",
    "GraphNode",
    "HierarchyLevel",
    "LessonFile",
    "LessonForgeError",
    "LessonGraph",
    "LibraryBundle",
    "LlmConfig",
    "Mode",
    "NodeProperties",
    "PhaseCategory",
    "PlanDocument",
    "PlanItem",
    "Provenance",
    "RuntimeEntry",
    "RuntimeSequence",
    "Severity",
    "canonical_json_bytes",
    "chain_from_sequence",
    "deterministic_generate",
    "export_runtime_sequence",
    "full_plan_generate",
    "lesson_bytes",
    "linearize",
    "list_by_phase",
    "llm_generate",
    "load_lesson",
    "load_lesson_file",
    "load_library",
    "match_keywords",
    "parse_script",
    "preview",
    "save_lesson",
    "tokenize",
    "validate",
]

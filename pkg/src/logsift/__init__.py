"""logsift: log template mining, matching, robustness evaluation, analytics.

Pipeline: mask and group raw lines into signature clusters, generate
templates per cluster (external LLM endpoint or built-in heuristic oracle),
then match incoming lines against the templates for structured events,
coverage measurement, robustness evaluation, and large-scale analytics.
"""

__version__ = "0.1.0"

from .core import (
    LogTemplate,
    ParsedEvent,
    RawLogRecord,
    Severity,
    classify_severity,
    parse_template,
)
from .generation import (
    LlmEndpointConfig,
    PromptSpec,
    build_prompt,
    extract_templates,
    heuristic_templates,
    request_templates,
)
from .matching import (
    CompiledTemplateSet,
    CoverageReport,
    compile_templates,
    coverage,
    match_line,
)
from .metrics import avg_similarity, levenshtein_norm, word_error_rate
from .perturb import Perturbation, PerturbationKind, RobustnessRow, evaluate, perturb
from .signatures import SignatureGroup, group_records, mask

__all__ = [
    "LogTemplate",
    "ParsedEvent",
    "RawLogRecord",
    "Severity",
    "classify_severity",
    "parse_template",
    "LlmEndpointConfig",
    "PromptSpec",
    "build_prompt",
    "extract_templates",
    "heuristic_templates",
    "request_templates",
    "CompiledTemplateSet",
    "CoverageReport",
    "compile_templates",
    "coverage",
    "match_line",
    "avg_similarity",
    "levenshtein_norm",
    "word_error_rate",
    "Perturbation",
    "PerturbationKind",
    "RobustnessRow",
    "evaluate",
    "perturb",
    "SignatureGroup",
    "group_records",
    "mask",
    "__version__",
]

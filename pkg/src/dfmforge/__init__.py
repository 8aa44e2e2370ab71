"""dfmforge: supply-driven DFM design, refinement, and evaluation."""

from .codec import parse_yaml, serialize_yaml, to_dict, to_json
from .model import (
    Additivity,
    Dependency,
    DfmSchema,
    Measure,
    ValidationCode,
    ValidationReport,
    Violation,
    shared_hierarchy_entries,
    validate,
)

__version__ = "0.1.0"

"""figtab: chart figures in PDFs -> structured data tables.

Pipeline: detect captioned figures in a PDF, send each crop to a
vision-language model, parse the tab-separated reply into an editable
table, export anywhere. A benchmark harness scores extractions against
reference tables with tolerance-based matching metrics.
"""

from .metrics import MatchResult, Tolerance, UndefinedMetric, best_column_rmsf1, recall, rmsf1, value_match
from .numbers import CellValue, parse_number
from .tables import CellEdit, DataTable, EmptyTable, IndexOutOfBounds, apply_edit, numeric_matrix, parse_reply

__version__ = "0.1.0"

__all__ = [
    "CellEdit",
    "CellValue",
    "DataTable",
    "EmptyTable",
    "IndexOutOfBounds",
    "MatchResult",
    "Tolerance",
    "UndefinedMetric",
    "apply_edit",
    "best_column_rmsf1",
    "numeric_matrix",
    "parse_number",
    "parse_reply",
    "recall",
    "rmsf1",
    "value_match",
]

"""Structured tables parsed from model replies.

A DataTable is rectangular: every row has exactly one cell per header
column (short rows are padded, long rows truncated with a warning).
Each row carries a confidence score in [0, 1]: the fraction of its
cells that parse as numeric, counted over the columns that are
numeric for a majority of rows. Rows in fully textual tables score 1.
The confidence is a parse-quality heuristic, not a model probability.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Optional

from .numbers import CellValue, parse_number


class EmptyTable(ValueError):
    """The reply contained no tab-separated content."""


class IndexOutOfBounds(IndexError):
    """Cell edit addressed a row or column outside the table."""


@dataclass(frozen=True)
class CellEdit:
    row_index: int
    col_index: int
    new_raw: str


@dataclass
class Provenance:
    backend: Optional[str] = None
    prompt_kind: Optional[str] = None
    timestamp: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "backend": self.backend,
            "prompt_kind": self.prompt_kind,
            "timestamp": self.timestamp,
        }


@dataclass
class DataTable:
    header: list[str]
    rows: list[list[CellValue]]
    row_confidence: list[float]
    source_figure: Optional[str] = None
    provenance: Provenance = field(default_factory=Provenance)
    warnings: list[str] = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.header)


_FENCE_RE = re.compile(r"^\s*```")


def _majority_numeric_columns(rows: list[list[CellValue]], n_cols: int) -> list[bool]:
    flags = []
    for c in range(n_cols):
        numeric = sum(1 for row in rows if row[c].is_numeric)
        flags.append(len(rows) > 0 and numeric > len(rows) / 2)
    return flags


def _row_confidence(row: list[CellValue], majority: list[bool]) -> float:
    considered = [cell for cell, m in zip(row, majority) if m]
    if not considered:
        return 1.0
    return sum(1 for cell in considered if cell.is_numeric) / len(considered)


def compute_confidence(rows: list[list[CellValue]], n_cols: int) -> list[float]:
    majority = _majority_numeric_columns(rows, n_cols)
    return [_row_confidence(row, majority) for row in rows]


def build_table(
    header: list[str],
    raw_rows: list[list[str]],
    source_figure: Optional[str] = None,
    provenance: Optional[Provenance] = None,
) -> DataTable:
    """Assemble a rectangular DataTable from raw cell strings."""
    n_cols = len(header)
    warnings: list[str] = []
    rows: list[list[CellValue]] = []
    for i, raw in enumerate(raw_rows):
        if len(raw) > n_cols:
            warnings.append(
                f"row {i}: {len(raw)} cells truncated to {n_cols} columns"
            )
            raw = raw[:n_cols]
        elif len(raw) < n_cols:
            raw = raw + [""] * (n_cols - len(raw))
        rows.append([parse_number(cell) for cell in raw])
    return DataTable(
        header=header,
        rows=rows,
        row_confidence=compute_confidence(rows, n_cols),
        source_figure=source_figure,
        provenance=provenance or Provenance(),
        warnings=warnings,
    )


def parse_reply(response_text: str) -> DataTable:
    """Parse a model reply into a table.

    Code fences are removed, then everything before the first and after
    the last tab-bearing line is dropped; the first surviving line is
    the header. Raises EmptyTable when no line contains a tab.
    """
    lines = [
        line for line in response_text.splitlines() if not _FENCE_RE.match(line)
    ]
    tab_indices = [i for i, line in enumerate(lines) if "\t" in line]
    if not tab_indices:
        raise EmptyTable("reply contains no tab-separated lines")
    window = lines[tab_indices[0] : tab_indices[-1] + 1]
    # keep tab-bearing lines even when visually blank (all-empty cells)
    window = [line for line in window if "\t" in line or line.strip()]

    header = [cell.strip() for cell in window[0].split("\t")]
    raw_rows = [[cell.strip() for cell in line.split("\t")] for line in window[1:]]
    return build_table(header, raw_rows)


def apply_edit(table: DataTable, edit: CellEdit) -> DataTable:
    """Replace one cell and refresh that row's confidence.

    Only the edited row's confidence entry is recomputed (against the
    updated table's column majorities); other rows keep their entries
    even if the edit shifted a column majority.
    """
    if not (0 <= edit.row_index < table.n_rows):
        raise IndexOutOfBounds(f"row {edit.row_index} out of range")
    if not (0 <= edit.col_index < table.n_cols):
        raise IndexOutOfBounds(f"column {edit.col_index} out of range")

    rows = [list(row) for row in table.rows]
    rows[edit.row_index][edit.col_index] = parse_number(edit.new_raw)
    majority = _majority_numeric_columns(rows, table.n_cols)
    confidence = list(table.row_confidence)
    confidence[edit.row_index] = _row_confidence(rows[edit.row_index], majority)
    return replace(table, rows=rows, row_confidence=confidence)


def numeric_matrix(table: DataTable) -> list[list[Optional[float]]]:
    """Column-major numeric view (header excluded)."""
    return [
        [row[c].numeric for row in table.rows] for c in range(table.n_cols)
    ]


def to_tsv(table: DataTable) -> str:
    """Canonical TSV: header line first, \\n endings, raw cell text."""
    lines = ["\t".join(table.header)]
    for row in table.rows:
        lines.append("\t".join(cell.raw for cell in row))
    return "\n".join(lines) + "\n"


def from_tsv(text: str, **kwargs) -> DataTable:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # artifact of the required trailing newline, nothing else
    if not lines or lines == [""]:
        raise EmptyTable("no content")
    header = lines[0].split("\t")
    return build_table(header, [line.split("\t") for line in lines[1:]], **kwargs)


def to_json_dict(table: DataTable) -> dict:
    return {
        "header": list(table.header),
        "rows": [[cell.raw for cell in row] for row in table.rows],
        "confidence": list(table.row_confidence),
    }


def from_json_dict(payload: dict, **kwargs) -> DataTable:
    table = build_table(
        [str(h) for h in payload["header"]],
        [[str(c) for c in row] for row in payload["rows"]],
        **kwargs,
    )
    return table

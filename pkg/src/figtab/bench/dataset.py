"""Benchmark dataset loading and ground-truth patching.

Datasets are described by a local JSON manifest (schema below) rather
than any upstream layout; converting public benchmark dumps into this
shape is a one-off script outside the harness. Ground truth is either a
full table (TSV) or a single value series.

Public chart benchmarks ship with known annotation errors (mislabeled
values, swapped columns). Corrections are applied as explicit patch
files so a run records exactly which fixes were active.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema

from ..tables import CellEdit, DataTable, apply_edit, build_table, from_tsv, to_tsv

CHART_TYPES = (
    "bar",
    "bar_with_labels",
    "line",
    "line_with_labels",
    "box",
    "histogram",
    "other",
)
SPLITS = ("dev", "validation")
PATCH_OPERATIONS = ("replace_cell", "swap_columns", "replace_table")


class SchemaError(ValueError):
    """Manifest or patch file does not match the expected shape."""


class MissingImage(FileNotFoundError):
    pass


class UnknownRecord(KeyError):
    pass


class PatchConflict(ValueError):
    pass


MANIFEST_SCHEMA = {
    "type": "object",
    "required": ["dataset", "records"],
    "properties": {
        "dataset": {"type": "string"},
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "image", "chart_type", "split", "ground_truth"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "image": {"type": "string", "minLength": 1},
                    "chart_type": {"enum": list(CHART_TYPES)},
                    "split": {"enum": list(SPLITS)},
                    "ground_truth": {
                        "type": "object",
                        "required": ["kind"],
                        "properties": {
                            "kind": {"enum": ["table", "series"]},
                            "tsv": {"type": "string"},
                            "values": {
                                "type": "array",
                                "items": {"type": "number"},
                                "minItems": 1,
                            },
                            "label": {"type": "string"},
                        },
                        "additionalProperties": False,
                    },
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}


@dataclass
class GroundTruth:
    kind: str  # "table" | "series"
    table: Optional[DataTable] = None
    values: Optional[list[float]] = None
    label: str = ""


@dataclass
class EvalRecord:
    id: str
    image_path: Path
    chart_type: str
    split: str
    ground_truth: GroundTruth
    patches_applied: list[str] = field(default_factory=list)

    def image_bytes(self) -> bytes:
        return self.image_path.read_bytes()


def _parse_ground_truth(record_id: str, spec: dict) -> GroundTruth:
    kind = spec["kind"]
    if kind == "table":
        if "tsv" not in spec:
            raise SchemaError(f"record {record_id!r}: table ground truth needs 'tsv'")
        table = from_tsv(spec["tsv"])
        if table.n_rows == 0:
            raise SchemaError(f"record {record_id!r}: ground-truth table has no rows")
        if not any(cell.is_numeric for row in table.rows for cell in row):
            raise SchemaError(
                f"record {record_id!r}: ground-truth table has no numeric cells"
            )
        return GroundTruth(kind="table", table=table, label=spec.get("label", ""))
    if "values" not in spec:
        raise SchemaError(f"record {record_id!r}: series ground truth needs 'values'")
    return GroundTruth(
        kind="series",
        values=[float(v) for v in spec["values"]],
        label=spec.get("label", ""),
    )


def load_dataset(
    manifest_path: str | Path,
    chart_type: Optional[str] = None,
    split: Optional[str] = None,
) -> list[EvalRecord]:
    """Load records from a manifest, optionally filtered.

    Image paths are resolved relative to the manifest location and must
    exist (MissingImage names the offending record).
    """
    manifest_path = Path(manifest_path)
    try:
        payload = json.loads(manifest_path.read_text())
    except (OSError, ValueError) as exc:
        raise SchemaError(f"cannot read manifest: {exc}") from exc
    try:
        jsonschema.validate(payload, MANIFEST_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"manifest invalid: {exc.message}") from exc

    seen_ids: set[str] = set()
    records: list[EvalRecord] = []
    base = manifest_path.parent
    for item in payload["records"]:
        rid = item["id"]
        if rid in seen_ids:
            raise SchemaError(f"duplicate record id {rid!r}")
        seen_ids.add(rid)
        if chart_type and item["chart_type"] != chart_type:
            continue
        if split and item["split"] != split:
            continue
        image_path = (base / item["image"]).resolve()
        if not image_path.is_file():
            raise MissingImage(f"record {rid!r}: image not found: {item['image']}")
        records.append(
            EvalRecord(
                id=rid,
                image_path=image_path,
                chart_type=item["chart_type"],
                split=item["split"],
                ground_truth=_parse_ground_truth(rid, item["ground_truth"]),
            )
        )
    return records


@dataclass(frozen=True)
class GroundTruthPatch:
    record_id: str
    operation: str
    payload: dict

    def describe(self) -> str:
        return f"{self.operation}({json.dumps(self.payload, sort_keys=True)})"


def load_patches(path: str | Path) -> list[GroundTruthPatch]:
    """Read one JSON patch object per line."""
    patches = []
    for n, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except ValueError as exc:
            raise SchemaError(f"patch line {n}: invalid JSON: {exc}") from exc
        for key in ("record_id", "operation", "payload"):
            if key not in obj:
                raise SchemaError(f"patch line {n}: missing {key!r}")
        if obj["operation"] not in PATCH_OPERATIONS:
            raise SchemaError(f"patch line {n}: unknown operation {obj['operation']!r}")
        patches.append(
            GroundTruthPatch(obj["record_id"], obj["operation"], obj["payload"])
        )
    return patches


def _patch_table(record: EvalRecord, patch: GroundTruthPatch) -> DataTable:
    table = record.ground_truth.table
    if table is None:
        raise SchemaError(
            f"patch {patch.operation} needs table ground truth (record {record.id!r})"
        )
    p = patch.payload
    if patch.operation == "replace_cell":
        return apply_edit(table, CellEdit(int(p["row"]), int(p["col"]), str(p["value"])))
    if patch.operation == "swap_columns":
        a, b = int(p["col_a"]), int(p["col_b"])
        if not (0 <= a < table.n_cols and 0 <= b < table.n_cols):
            raise SchemaError(f"swap_columns out of range for record {record.id!r}")
        header = list(table.header)
        header[a], header[b] = header[b], header[a]
        rows = []
        for row in table.rows:
            row = list(row)
            row[a], row[b] = row[b], row[a]
            rows.append([cell.raw for cell in row])
        return build_table(header, rows)
    raise AssertionError(patch.operation)


def apply_patches(
    records: list[EvalRecord], patches: list[GroundTruthPatch]
) -> list[EvalRecord]:
    """Return patched copies of the records; inputs are left untouched.

    Two replace_cell patches aimed at the same cell conflict; a second
    replace_table on one record conflicts as well.
    """
    by_id = {r.id: copy.deepcopy(r) for r in records}
    touched_cells: set[tuple[str, int, int]] = set()
    replaced_tables: set[str] = set()

    for patch in patches:
        record = by_id.get(patch.record_id)
        if record is None:
            raise UnknownRecord(patch.record_id)
        if patch.operation == "replace_table":
            if patch.record_id in replaced_tables:
                raise PatchConflict(f"table of {patch.record_id!r} replaced twice")
            replaced_tables.add(patch.record_id)
            if record.ground_truth.kind == "series":
                values = patch.payload.get("values")
                if not values:
                    raise SchemaError("replace_table on series needs 'values'")
                record.ground_truth.values = [float(v) for v in values]
            else:
                record.ground_truth.table = from_tsv(str(patch.payload["tsv"]))
        else:
            if patch.operation == "replace_cell":
                cell = (patch.record_id, int(patch.payload["row"]), int(patch.payload["col"]))
                if cell in touched_cells:
                    raise PatchConflict(
                        f"cell {cell[1:]} of {patch.record_id!r} patched twice"
                    )
                touched_cells.add(cell)
            record.ground_truth.table = _patch_table(record, patch)
        record.patches_applied.append(patch.describe())
    return [by_id[r.id] for r in records]


def ground_truth_tsv(record: EvalRecord) -> str:
    """Canonical TSV reply for a record, used by the echo mock."""
    gt = record.ground_truth
    if gt.kind == "table":
        assert gt.table is not None
        return to_tsv(gt.table)
    assert gt.values is not None
    label = gt.label or "value"
    lines = [f"x\t{label}"]
    lines += [f"{i + 1}\t{_plain(v)}" for i, v in enumerate(gt.values)]
    return "\n".join(lines) + "\n"


def _plain(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)

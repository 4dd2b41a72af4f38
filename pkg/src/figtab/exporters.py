"""DataTable serialization: CSV, TSV, JSON, LaTeX, R script, XLSX.

CSV, TSV and JSON are lossless for raw cell text and round-trip through
the matching importers. LaTeX and R are write-only integration formats.
XLSX is a deliberately minimal OOXML workbook: one sheet, inline
strings, no styles, which is all a spreadsheet needs to open it.
"""

from __future__ import annotations

import csv
import io
import json
import re
import zipfile
from dataclasses import dataclass, field

from .tables import DataTable, build_table, to_json_dict, to_tsv

FORMATS = ("csv", "tsv", "json", "latex", "r", "xlsx")

_R_IDENTIFIER = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


class InvalidIdentifier(ValueError):
    """Requested R object name is not a valid identifier."""


class EncodingError(ValueError):
    """Cell text could not be encoded for the requested format."""


class CsvParseError(ValueError):
    """Input is not parseable CSV."""


@dataclass
class ExportOptions:
    include_confidence: bool = False
    table_name: str = "extracted"


@dataclass
class ExportRequest:
    table: DataTable
    format: str
    options: ExportOptions = field(default_factory=ExportOptions)


def export(request: ExportRequest) -> bytes:
    if request.format not in FORMATS:
        raise ValueError(f"unknown export format: {request.format!r}")
    writer = _WRITERS[request.format]
    try:
        return writer(request.table, request.options)
    except UnicodeEncodeError as exc:
        raise EncodingError(str(exc)) from exc


def _grid(table: DataTable, options: ExportOptions) -> tuple[list[str], list[list[str]]]:
    header = list(table.header)
    rows = [[cell.raw for cell in row] for row in table.rows]
    if options.include_confidence:
        header.append("confidence")
        for row, conf in zip(rows, table.row_confidence):
            row.append(f"{conf:.3f}")
    return header, rows


def _write_csv(table: DataTable, options: ExportOptions) -> bytes:
    header, rows = _grid(table, options)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for record in [header] + rows:
        if record == [""]:
            # a bare empty line would be skipped by readers; force quotes
            buf.write('""\n')
        else:
            writer.writerow(record)
    return buf.getvalue().encode("utf-8")


def _write_tsv(table: DataTable, options: ExportOptions) -> bytes:
    if not options.include_confidence:
        return to_tsv(table).encode("utf-8")
    header, rows = _grid(table, options)
    lines = ["\t".join(header)] + ["\t".join(row) for row in rows]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _write_json(table: DataTable, options: ExportOptions) -> bytes:
    # confidence is part of the canonical JSON form regardless of options
    payload = to_json_dict(table)
    return (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


_LATEX_ESCAPES = {
    "\\": r"\textbackslash{}",
    "&": r"\&",
    "%": r"\%",
    "$": r"\$",
    "#": r"\#",
    "_": r"\_",
    "{": r"\{",
    "}": r"\}",
    "~": r"\textasciitilde{}",
    "^": r"\textasciicircum{}",
}


def latex_escape(text: str) -> str:
    return "".join(_LATEX_ESCAPES.get(ch, ch) for ch in text)


def _write_latex(table: DataTable, options: ExportOptions) -> bytes:
    header, rows = _grid(table, options)
    lines = [
        r"\begin{tabular}{" + "l" * len(header) + "}",
        r"\hline",
        " & ".join(latex_escape(h) for h in header) + r" \\",
        r"\hline",
    ]
    for row in rows:
        lines.append(" & ".join(latex_escape(c) for c in row) + r" \\")
    lines += [r"\hline", r"\end{tabular}"]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _r_string(text: str) -> str:
    return json.dumps(text, ensure_ascii=True)


def _format_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _write_r(table: DataTable, options: ExportOptions) -> bytes:
    name = options.table_name
    if not _R_IDENTIFIER.match(name):
        raise InvalidIdentifier(f"not a valid R name: {name!r}")

    columns: list[tuple[str, str]] = []
    for c, col_name in enumerate(table.header):
        cells = [row[c] for row in table.rows]
        if cells and all(cell.is_numeric for cell in cells):
            values = ", ".join(_format_number(cell.numeric) for cell in cells)
            vector = f"c({values})" if cells else "numeric(0)"
        else:
            values = ", ".join(_r_string(cell.raw) for cell in cells)
            vector = f"c({values})" if cells else "character(0)"
        columns.append((col_name, vector))
    if options.include_confidence:
        conf = ", ".join(f"{v:.3f}" for v in table.row_confidence)
        columns.append(("confidence", f"c({conf})" if table.rows else "numeric(0)"))

    prov = table.provenance
    lines = [
        "# data frame exported by figtab",
        f"# source figure: {table.source_figure or 'n/a'}",
        f"# backend: {prov.backend or 'n/a'}  prompt: {prov.prompt_kind or 'n/a'}"
        f"  extracted: {prov.timestamp or 'n/a'}",
        f"{name} <- data.frame(",
        "  check.names = FALSE,",
    ]
    lines += [
        f"  {_r_string(col_name)} = {vector}" + ("," if i < len(columns) - 1 else "")
        for i, (col_name, vector) in enumerate(columns)
    ]
    lines += [")", f"print({name})"]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _xml_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def column_letter(index: int) -> str:
    """0-based column index to spreadsheet letters (0 -> A, 26 -> AA)."""
    letters = ""
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        letters = chr(ord("A") + rem) + letters
    return letters


_XLSX_CONTENT_TYPES = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">
<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>
<Default Extension="xml" ContentType="application/xml"/>
<Override PartName="/xl/workbook.xml" ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml"/>
<Override PartName="/xl/worksheets/sheet1.xml" ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.worksheet+xml"/>
</Types>
"""

_XLSX_ROOT_RELS = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">
<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="xl/workbook.xml"/>
</Relationships>
"""

_XLSX_WORKBOOK = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<workbook xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships">
<sheets><sheet name="Sheet1" sheetId="1" r:id="rId1"/></sheets>
</workbook>
"""

_XLSX_WORKBOOK_RELS = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">
<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/worksheet" Target="worksheets/sheet1.xml"/>
</Relationships>
"""


def _sheet_xml(table: DataTable, options: ExportOptions) -> str:
    header, _ = _grid(table, options)

    def cell_xml(ref: str, raw: str, numeric: float | None) -> str:
        if numeric is not None:
            value = _format_number(numeric)
            return f'<c r="{ref}"><v>{value}</v></c>'
        return f'<c r="{ref}" t="inlineStr"><is><t xml:space="preserve">{_xml_escape(raw)}</t></is></c>'

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>',
        '<worksheet xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main">',
        "<sheetData>",
    ]
    cells = "".join(
        cell_xml(f"{column_letter(c)}1", h, None) for c, h in enumerate(header)
    )
    out.append(f'<row r="1">{cells}</row>')
    for r, row in enumerate(table.rows, start=2):
        parts = [
            cell_xml(f"{column_letter(c)}{r}", cell.raw, cell.numeric)
            for c, cell in enumerate(row)
        ]
        if options.include_confidence:
            ref = f"{column_letter(len(row))}{r}"
            parts.append(cell_xml(ref, "", table.row_confidence[r - 2]))
        out.append(f'<row r="{r}">{"".join(parts)}</row>')
    out += ["</sheetData>", "</worksheet>", ""]
    return "\n".join(out)


def _write_xlsx(table: DataTable, options: ExportOptions) -> bytes:
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        zf.writestr("[Content_Types].xml", _XLSX_CONTENT_TYPES)
        zf.writestr("_rels/.rels", _XLSX_ROOT_RELS)
        zf.writestr("xl/workbook.xml", _XLSX_WORKBOOK)
        zf.writestr("xl/_rels/workbook.xml.rels", _XLSX_WORKBOOK_RELS)
        zf.writestr("xl/worksheets/sheet1.xml", _sheet_xml(table, options))
    return buf.getvalue()


_WRITERS = {
    "csv": _write_csv,
    "tsv": _write_tsv,
    "json": _write_json,
    "latex": _write_latex,
    "r": _write_r,
    "xlsx": _write_xlsx,
}


def import_csv(data: bytes) -> DataTable:
    """Read RFC 4180 CSV back into a DataTable (first row is the header)."""
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise CsvParseError(f"not UTF-8: {exc}") from exc
    try:
        records = list(csv.reader(io.StringIO(text)))
    except csv.Error as exc:
        raise CsvParseError(str(exc)) from exc
    if not records:
        raise CsvParseError("empty input")
    return build_table(records[0], records[1:])


def import_table_file(data: bytes, fmt: str) -> DataTable:
    """Read one of the lossless formats back into a DataTable."""
    if fmt == "csv":
        return import_csv(data)
    if fmt == "tsv":
        from .tables import from_tsv

        return from_tsv(data.decode("utf-8"))
    if fmt == "json":
        from .tables import from_json_dict

        return from_json_dict(json.loads(data.decode("utf-8")))
    raise ValueError(f"no importer for format {fmt!r}")

import json
import shutil
import subprocess
import zipfile
from io import BytesIO

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from figtab.exporters import (
    CsvParseError,
    ExportOptions,
    ExportRequest,
    InvalidIdentifier,
    column_letter,
    export,
    import_csv,
    import_table_file,
)
from figtab.tables import build_table


def _table(header, rows, **kwargs):
    return build_table(header, rows, **kwargs)


SIMPLE = _table(["A", "B"], [["1", "2"], ["3", "4"]])


class TestCsv:
    def test_plain(self):
        data = export(ExportRequest(SIMPLE, "csv"))
        assert data == b"A,B\n1,2\n3,4\n"

    def test_comma_quoted(self):
        t = _table(["A"], [["a,b"]])
        data = export(ExportRequest(t, "csv"))
        assert data == b'A\n"a,b"\n'
        assert import_csv(data).rows[0][0].raw == "a,b"

    def test_newline_in_cell_round_trips(self):
        t = _table(["A"], [["line1\nline2"]])
        back = import_csv(export(ExportRequest(t, "csv")))
        assert back.rows[0][0].raw == "line1\nline2"

    def test_confidence_column(self):
        data = export(
            ExportRequest(SIMPLE, "csv", ExportOptions(include_confidence=True))
        )
        assert data.splitlines()[0] == b"A,B,confidence"
        assert data.splitlines()[1].endswith(b",1.000")

    def test_import_empty_fails(self):
        with pytest.raises(CsvParseError):
            import_csv(b"")


class TestTsvJson:
    def test_tsv(self):
        assert export(ExportRequest(SIMPLE, "tsv")) == b"A\tB\n1\t2\n3\t4\n"

    def test_json_shape(self):
        payload = json.loads(export(ExportRequest(SIMPLE, "json")))
        assert payload == {
            "header": ["A", "B"],
            "rows": [["1", "2"], ["3", "4"]],
            "confidence": [1.0, 1.0],
        }


class TestLatex:
    def test_structure(self):
        text = export(ExportRequest(SIMPLE, "latex")).decode()
        assert text.startswith("\\begin{tabular}{ll}")
        assert text.count(r" \\") == 3  # header + 2 data rows
        assert text.rstrip().endswith("\\end{tabular}")

    def test_escaping(self):
        t = _table(["50%", "other"], [["a_b & c", "$5 #1 {x} ~y ^z \\cmd"]])
        text = export(ExportRequest(t, "latex")).decode()
        assert r"\%" in text and r"\_" in text and r"\&" in text
        assert r"\$" in text and r"\#" in text and r"\{" in text
        assert r"\textasciitilde{}" in text
        assert r"\textasciicircum{}" in text
        assert r"\textbackslash{}" in text

    def test_preamble_matches_header_width(self):
        t = _table(["A", "B", "C"], [])
        text = export(ExportRequest(t, "latex")).decode()
        assert "\\begin{tabular}{lll}" in text


class TestRScript:
    def test_bad_identifier(self):
        with pytest.raises(InvalidIdentifier):
            export(ExportRequest(SIMPLE, "r", ExportOptions(table_name="1bad")))

    def test_typed_columns(self):
        t = _table(["Year", "Label"], [["2020", "alpha"], ["2021", "beta"]])
        text = export(ExportRequest(t, "r", ExportOptions(table_name="fig1"))).decode()
        assert "fig1 <- data.frame(" in text
        assert '"Year" = c(2020, 2021)' in text
        assert '"Label" = c("alpha", "beta")' in text
        assert "print(fig1)" in text

    def test_magnitudes_expanded(self):
        t = _table(["V"], [["2.3 million"]])
        text = export(ExportRequest(t, "r")).decode()
        assert "c(2300000)" in text

    @pytest.mark.skipif(shutil.which("Rscript") is None, reason="R not installed")
    def test_executes_in_r(self, tmp_path):
        t = _table(["Year", "Value"], [["2020", "1234"], ["2021", "1300"]])
        script = tmp_path / "t.R"
        script.write_bytes(export(ExportRequest(t, "r", ExportOptions(table_name="fig1"))))
        out = subprocess.run(
            ["Rscript", str(script)], capture_output=True, text=True, check=True
        )
        assert "2020" in out.stdout and "1234" in out.stdout


class TestXlsx:
    def test_valid_zip_with_required_parts(self):
        data = export(ExportRequest(SIMPLE, "xlsx"))
        with zipfile.ZipFile(BytesIO(data)) as zf:
            names = set(zf.namelist())
            assert {"[Content_Types].xml", "xl/workbook.xml", "xl/worksheets/sheet1.xml"} <= names
            assert zf.testzip() is None
            sheet = zf.read("xl/worksheets/sheet1.xml").decode()
        assert sheet.count("<row ") == SIMPLE.n_rows + 1

    def test_inline_strings_escaped(self):
        t = _table(["H"], [["<b> & 'q'"]])
        data = export(ExportRequest(t, "xlsx"))
        with zipfile.ZipFile(BytesIO(data)) as zf:
            sheet = zf.read("xl/worksheets/sheet1.xml").decode()
        assert "&lt;b&gt; &amp;" in sheet

    def test_numeric_cells_use_values(self):
        data = export(ExportRequest(SIMPLE, "xlsx"))
        with zipfile.ZipFile(BytesIO(data)) as zf:
            sheet = zf.read("xl/worksheets/sheet1.xml").decode()
        assert '<c r="A2"><v>1</v></c>' in sheet


def test_column_letters():
    assert column_letter(0) == "A"
    assert column_letter(25) == "Z"
    assert column_letter(26) == "AA"
    assert column_letter(27) == "AB"
    assert column_letter(701) == "ZZ"
    assert column_letter(702) == "AAA"


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        export(ExportRequest(SIMPLE, "parquet"))


_cell = st.text(
    alphabet=st.characters(codec="utf-8", exclude_characters="\t\n\r", exclude_categories=("Cs", "Cc")),
    max_size=8,
).map(str.strip)
_header_cell = _cell.filter(bool)


@st.composite
def tables(draw):
    n_cols = draw(st.integers(1, 4))
    n_rows = draw(st.integers(0, 4))
    header = [draw(_header_cell) for _ in range(n_cols)]
    rows = [[draw(_cell) for _ in range(n_cols)] for _ in range(n_rows)]
    return build_table(header, rows)


class TestRoundTripProperty:
    @settings(max_examples=120, deadline=None)
    @given(tables(), st.sampled_from(["csv", "tsv", "json"]))
    def test_lossless_formats(self, table, fmt):
        data = export(ExportRequest(table, fmt))
        back = import_table_file(data, fmt)
        assert back.header == table.header
        assert [[c.raw for c in r] for r in back.rows] == [
            [c.raw for c in r] for r in table.rows
        ]

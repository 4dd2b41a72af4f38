import json
import zipfile

import pytest

from figtab.bench.minidata import build_mini_dataset
from figtab.cli import dispatch
from figtab.vlm import save_transcript, transcript_key
from pdfgen import PAGE_H, PageSpec, build_pdf


@pytest.fixture(scope="module")
def mini_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("mini")
    build_mini_dataset(out)
    return out


@pytest.fixture()
def fixture_pdf(tmp_path):
    spec = (
        PageSpec()
        .image(100, PAGE_H - 490, 200, 190)
        .text(100, PAGE_H - 513, "Figure 1: cli fixture", size=10)
    )
    path = tmp_path / "fixture.pdf"
    path.write_bytes(build_pdf([spec]))
    return path


class TestDetect:
    def test_writes_manifest_and_pngs(self, fixture_pdf, tmp_path, capsys):
        out = tmp_path / "figs"
        code = dispatch(["detect", "--pdf", str(fixture_pdf), "--out", str(out), "--json"])
        assert code == 0
        manifest = json.loads(capsys.readouterr().out)
        assert manifest["figures"][0]["label"] == "Figure 1"
        assert (out / "figures.json").is_file()
        assert (out / manifest["figures"][0]["image_path"]).is_file()

    def test_human_output(self, fixture_pdf, tmp_path, capsys):
        code = dispatch(["detect", "--pdf", str(fixture_pdf), "--out", str(tmp_path / "o")])
        assert code == 0
        assert "Figure 1" in capsys.readouterr().out

    def test_missing_pdf_is_operational_error(self, tmp_path, capsys):
        code = dispatch(["detect", "--pdf", str(tmp_path / "no.pdf"), "--out", str(tmp_path)])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestUsageErrors:
    def test_unknown_flag(self, capsys):
        assert dispatch(["detect", "--nope"]) == 2

    def test_unknown_subcommand(self, capsys):
        assert dispatch(["frobnicate"]) == 2

    def test_missing_required(self, capsys):
        assert dispatch(["detect"]) == 2

    def test_help_exits_zero(self, capsys):
        assert dispatch(["--help"]) == 0


class TestEval:
    def test_echo_eval_end_to_end(self, mini_dir, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = dispatch([
            "eval",
            "--manifest", str(mini_dir / "manifest.json"),
            "--backends-file", str(mini_dir / "backends.json"),
            "--out", str(out),
        ])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["overall"]["mean_recall"] == 1.0
        assert report["overall"]["ci_low"] == 1.0
        assert report["overall"]["ci_high"] == 1.0
        assert "| 100.0% |" in capsys.readouterr().out

    def test_json_stdout(self, mini_dir, capsys):
        code = dispatch([
            "eval",
            "--manifest", str(mini_dir / "manifest.json"),
            "--backends-file", str(mini_dir / "backends.json"),
            "--json",
        ])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["overall"]["n"] == 10

    def test_chart_type_filter(self, mini_dir, capsys):
        code = dispatch([
            "eval",
            "--manifest", str(mini_dir / "manifest.json"),
            "--backends-file", str(mini_dir / "backends.json"),
            "--chart-type", "box",
            "--json",
        ])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["overall"]["n"] == 2

    def test_bad_manifest_exit_1(self, mini_dir, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code = dispatch([
            "eval", "--manifest", str(bad),
            "--backends-file", str(mini_dir / "backends.json"),
        ])
        assert code == 1


class TestExtractExport:
    def test_extract_via_transcript(self, tmp_path, capsys):
        image = tmp_path / "chart.png"
        from PIL import Image

        Image.new("RGB", (30, 20), (9, 9, 9)).save(image)
        transcript = tmp_path / "t.json"
        save_transcript(transcript, {transcript_key(image.read_bytes()): "A\tB\n1\t2"})
        backends = tmp_path / "backends.json"
        backends.write_text(json.dumps({
            "backends": {"echo": {"provider": "mock", "model_id": "m", "transcript": "t.json"}},
            "default": "echo",
        }))
        code = dispatch(["extract", "--image", str(image), "--backends-file", str(backends)])
        assert code == 0
        assert capsys.readouterr().out == "A\tB\n1\t2\n"

    def test_extract_json(self, tmp_path, capsys):
        image = tmp_path / "chart.png"
        from PIL import Image

        Image.new("RGB", (30, 20), (9, 9, 9)).save(image)
        transcript = tmp_path / "t.json"
        save_transcript(transcript, {transcript_key(image.read_bytes()): "A\tB\n1\t2"})
        backends = tmp_path / "backends.json"
        backends.write_text(json.dumps({
            "backends": {"echo": {"provider": "mock", "model_id": "m", "transcript": "t.json"}},
        }))
        code = dispatch(["extract", "--image", str(image),
                         "--backends-file", str(backends), "--json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["header"] == ["A", "B"]

    def test_export_xlsx(self, tmp_path, capsys):
        table = tmp_path / "table.tsv"
        table.write_text("A\tB\n1\t2\n")
        code = dispatch(["export", "--table", str(table), "--format", "xlsx", "--json"])
        assert code == 0
        meta = json.loads(capsys.readouterr().out)
        with zipfile.ZipFile(meta["out"]) as zf:
            assert "xl/workbook.xml" in zf.namelist()

    def test_export_csv_default_path(self, tmp_path, capsys):
        table = tmp_path / "table.tsv"
        table.write_text("A\tB\nx\t2\n")
        code = dispatch(["export", "--table", str(table), "--format", "csv"])
        assert code == 0
        assert (tmp_path / "table.csv").read_text() == "A,B\nx,2\n"

    def test_export_bad_r_name(self, tmp_path, capsys):
        table = tmp_path / "table.tsv"
        table.write_text("A\n1\n")
        code = dispatch(["export", "--table", str(table), "--format", "r",
                         "--name", "9bad"])
        assert code == 1


class TestServe:
    def test_missing_config_exit_1(self, tmp_path, capsys):
        assert dispatch(["serve", "--config", str(tmp_path / "none.json")]) == 1

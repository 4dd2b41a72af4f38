import json
import math

import numpy as np
import pytest

from figtab.bench import (
    InsufficientData,
    MetricReport,
    MissingImage,
    PatchConflict,
    SchemaError,
    UnknownRecord,
    apply_patches,
    bootstrap_ci,
    echo_transport,
    load_dataset,
    load_patches,
    perturbed_transport,
    render_report,
    run_eval,
)
from figtab.bench.dataset import GroundTruthPatch
from figtab.bench.minidata import build_mini_dataset, verify_collision_free
from figtab.bench.runner import ResponseCache
from figtab.vlm import BackendConfig, MockTransport, PromptProfile


@pytest.fixture(scope="module")
def mini(tmp_path_factory):
    out = tmp_path_factory.mktemp("mini")
    manifest = build_mini_dataset(out)
    return manifest


@pytest.fixture()
def records(mini):
    return load_dataset(mini)


def mock_backend(**kw):
    return BackendConfig(provider="mock", model_id="echo-mock", **kw)


SIMPLE = PromptProfile.simple()


class TestLoadDataset:
    def test_loads_ten_records(self, records):
        assert len(records) == 10
        assert len({r.chart_type for r in records}) >= 4

    def test_filter_by_chart_type(self, mini):
        box = load_dataset(mini, chart_type="box")
        assert {r.chart_type for r in box} == {"box"}
        assert len(box) == 2

    def test_filter_by_split(self, mini):
        dev = load_dataset(mini, split="dev")
        assert len(dev) == 2

    def test_missing_image(self, tmp_path, mini):
        payload = json.loads(mini.read_text())
        payload["records"][0]["image"] = "gone.png"
        bad = tmp_path / "manifest.json"
        bad.write_text(json.dumps(payload))
        with pytest.raises(MissingImage) as err:
            load_dataset(bad)
        assert "mini-001" in str(err.value)

    def test_schema_violation(self, tmp_path):
        bad = tmp_path / "m.json"
        bad.write_text(json.dumps({"dataset": "x", "records": [{"id": "a"}]}))
        with pytest.raises(SchemaError):
            load_dataset(bad)

    def test_duplicate_ids(self, mini):
        payload = json.loads(mini.read_text())
        payload["records"].append(payload["records"][0])
        bad = mini.parent / "dup_manifest.json"
        bad.write_text(json.dumps(payload))
        with pytest.raises(SchemaError):
            load_dataset(bad)

    def test_collision_free_fixture(self):
        verify_collision_free()


class TestPatches:
    def test_swap_columns(self, records):
        target = records[3]  # mini-004: Year, SeriesA, SeriesB
        patched = apply_patches(
            [target],
            [GroundTruthPatch(target.id, "swap_columns", {"col_a": 1, "col_b": 2})],
        )[0]
        assert patched.ground_truth.table.header == ["Year", "SeriesB", "SeriesA"]
        assert target.ground_truth.table.header == ["Year", "SeriesA", "SeriesB"]

    def test_replace_cell_frame(self, records):
        target = records[0]
        patched = apply_patches(
            [target],
            [GroundTruthPatch(target.id, "replace_cell", {"row": 0, "col": 1, "value": "7"})],
        )[0]
        assert patched.ground_truth.table.rows[0][1].numeric == 7.0
        for r in range(1, 4):
            assert (
                patched.ground_truth.table.rows[r][1].raw
                == target.ground_truth.table.rows[r][1].raw
            )
        assert patched.patches_applied

    def test_same_cell_conflict(self, records):
        target = records[0]
        patches = [
            GroundTruthPatch(target.id, "replace_cell", {"row": 0, "col": 1, "value": "7"}),
            GroundTruthPatch(target.id, "replace_cell", {"row": 0, "col": 1, "value": "8"}),
        ]
        with pytest.raises(PatchConflict):
            apply_patches([target], patches)

    def test_unknown_record(self, records):
        with pytest.raises(UnknownRecord):
            apply_patches(records, [GroundTruthPatch("nope", "replace_cell", {})])

    def test_replace_table(self, records):
        target = records[0]
        patched = apply_patches(
            [target],
            [GroundTruthPatch(target.id, "replace_table", {"tsv": "A\tB\n1\t2\n"})],
        )[0]
        assert patched.ground_truth.table.header == ["A", "B"]

    def test_idempotent_recordwise(self, records):
        target = records[0]
        patches = [
            GroundTruthPatch(target.id, "replace_cell", {"row": 1, "col": 1, "value": "9"})
        ]
        once = apply_patches([target], patches)
        twice = apply_patches(once, patches)
        assert (
            [[c.raw for c in r] for r in once[0].ground_truth.table.rows]
            == [[c.raw for c in r] for r in twice[0].ground_truth.table.rows]
        )

    def test_load_patches_jsonl(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text(
            '{"record_id": "a", "operation": "replace_cell", "payload": {"row": 0, "col": 0, "value": "1"}}\n'
            "\n"
            '{"record_id": "b", "operation": "replace_table", "payload": {"tsv": "A\\n1\\n"}}\n'
        )
        patches = load_patches(path)
        assert len(patches) == 2
        assert patches[0].operation == "replace_cell"

    def test_bad_patch_operation(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text('{"record_id": "a", "operation": "drop", "payload": {}}\n')
        with pytest.raises(SchemaError):
            load_patches(path)


class TestBootstrap:
    def test_degenerate_zero_width(self):
        lo, hi = bootstrap_ci([0.9] * 20, seed=1)
        assert lo == hi == 0.9

    def test_deterministic(self):
        scores = [0.1, 0.5, 0.9, 0.4, 0.8]
        assert bootstrap_ci(scores, seed=7) == bootstrap_ci(scores, seed=7)

    def test_binomial_band(self):
        # binomial theory: mean 0.5, sd 0.05 -> 95% CI about [0.40, 0.60]
        scores = [0.0, 1.0] * 50
        lo, hi = bootstrap_ci(scores, resamples=10_000, seed=3)
        assert math.isclose(lo, 0.40, abs_tol=0.03)
        assert math.isclose(hi, 0.60, abs_tol=0.03)

    def test_insufficient(self):
        with pytest.raises(InsufficientData):
            bootstrap_ci([0.5])

    def test_interval_contains_mean(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            scores = rng.uniform(0, 1, size=rng.integers(2, 30)).tolist()
            lo, hi = bootstrap_ci(scores, resamples=500, seed=11)
            assert lo <= sum(scores) / len(scores) <= hi


class TestRunEval:
    def test_echo_scores_everything_perfectly(self, records):
        report = run_eval(
            records, mock_backend(), SIMPLE, transport=echo_transport(records)
        )
        assert report.overall["n"] == 10
        assert report.overall["mean_recall"] == 1.0
        assert report.overall["mean_precision"] == 1.0
        assert report.overall["mean_f1"] == 1.0
        assert (report.overall["ci_low"], report.overall["ci_high"]) == (1.0, 1.0)
        assert all(not item.flagged for item in report.per_item)

    def test_perturbed_within_tolerance(self, records):
        report = run_eval(
            records, mock_backend(), SIMPLE,
            transport=perturbed_transport(records, 0.04),
        )
        assert report.overall["mean_recall"] == 1.0

    def test_perturbed_outside_tolerance(self, records):
        report = run_eval(
            records, mock_backend(), SIMPLE,
            transport=perturbed_transport(records, 0.06),
        )
        assert report.overall["mean_recall"] == 0.0

    def test_aggregates_match_items(self, records):
        report = run_eval(
            records, mock_backend(), SIMPLE,
            transport=perturbed_transport(records, 0.04),
        )
        mean_f1 = sum(i.f1 for i in report.per_item) / len(report.per_item)
        assert abs(report.overall["mean_f1"] - mean_f1) < 1e-12
        for chart_type, agg in report.per_type.items():
            items = [i for i in report.per_item if i.chart_type == chart_type]
            assert agg["n"] == len(items)
            assert abs(agg["mean_f1"] - sum(i.f1 for i in items) / len(items)) < 1e-12

    def test_failures_score_zero_and_flag(self, records):
        transport = echo_transport(records)
        # poison one record's reply with prose only
        key = sorted(transport.replies)[0]
        transport.replies[key] = "I cannot read this chart, sorry."
        report = run_eval(records, mock_backend(), SIMPLE, transport=transport)
        flagged = [i for i in report.per_item if i.flagged]
        assert len(flagged) == 1
        assert flagged[0].recall == flagged[0].f1 == 0.0
        assert report.overall["n"] == 10

    def test_byte_identical_reports(self, records):
        def run():
            report = run_eval(
                records, mock_backend(), SIMPLE,
                transport=echo_transport(records), seed=42,
            )
            return render_report(report, "json")

        assert run() == run()

    def test_cache_prevents_second_fetch(self, records, tmp_path):
        transport = echo_transport(records)
        run_eval(records, mock_backend(), SIMPLE, transport=transport,
                 cache_dir=tmp_path / "cache")
        first_calls = transport.calls
        report = run_eval(records, mock_backend(), SIMPLE, transport=transport,
                          cache_dir=tmp_path / "cache")
        assert transport.calls == first_calls  # all served from cache
        assert report.overall["mean_f1"] == 1.0

    def test_parallel_matches_serial(self, records):
        serial = run_eval(records, mock_backend(), SIMPLE,
                          transport=echo_transport(records), parallelism=1)
        parallel = run_eval(records, mock_backend(), SIMPLE,
                            transport=echo_transport(records), parallelism=4)
        assert render_report(serial, "json") == render_report(parallel, "json")

    def test_headline_metric_is_f1_for_mixed(self, records):
        report = run_eval(records, mock_backend(), SIMPLE,
                          transport=echo_transport(records))
        assert report.overall["metric"] == "f1"
        tables_only = [r for r in records if r.ground_truth.kind == "table"]
        report2 = run_eval(tables_only, mock_backend(), SIMPLE,
                           transport=echo_transport(tables_only))
        assert report2.overall["metric"] == "recall"


class TestRenderReport:
    def _report(self, records):
        return run_eval(records, mock_backend(), SIMPLE,
                        transport=echo_transport(records))

    def test_markdown_columns(self, records):
        text = render_report(self._report(records), "markdown-table").decode()
        lines = text.strip().splitlines()
        assert lines[0] == "| Model | Provider | N | Recall | 95% CI |"
        assert "| echo-mock | mock | 10 | 100.0% | [100.0, 100.0] |" in lines

    def test_heatmap_csv_shape(self, records):
        text = render_report(self._report(records), "heatmap-csv").decode()
        header, row = text.strip().splitlines()
        types = header.split(",")[1:]
        values = row.split(",")[1:]
        assert len(types) == len(values) == 6
        assert all(v == "100.0" for v in values)

    def test_empty_report(self):
        report = run_eval([], mock_backend(), SIMPLE, transport=MockTransport())
        text = render_report(report, "markdown-table").decode()
        assert "n=0" in text
        payload = json.loads(render_report(report, "json"))
        assert payload["overall"]["n"] == 0

    def test_json_round_trip(self, records):
        report = self._report(records)
        payload = json.loads(render_report(report, "json"))
        back = MetricReport.from_dict(payload)
        assert render_report(back, "json") == render_report(report, "json")

    def test_unknown_format(self, records):
        with pytest.raises(ValueError):
            render_report(self._report(records), "pdf")


class TestResponseCache:
    def test_round_trip(self, tmp_path):
        cache = ResponseCache(tmp_path)
        assert cache.get(b"png", "m", "simple") is None
        cache.put(b"png", "m", "simple", "A\t1")
        assert cache.get(b"png", "m", "simple") == "A\t1"
        assert cache.get(b"png", "m", "detailed") is None
        assert cache.get(b"other", "m", "simple") is None

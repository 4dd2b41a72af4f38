"""Bundled 10-item mini-dataset for offline end-to-end runs.

Every record gets a tiny synthetic PNG (the mock backends key replies on
the image bytes, so each image must be unique) and ground truth whose
numeric values are chosen so that scaling any value by 6% can never
collide with a different value at 5% tolerance: within a record, no two
distinct values have a ratio inside [1.005, 1.12]. That makes the
perturbation sweep exact: +4% scores full recall, +6% scores zero.

Run ``python -m figtab.bench.minidata OUTDIR`` to materialize the
manifest, images, echo transcript and a ready-to-use backends file.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from PIL import Image, ImageDraw

# (id, chart_type, split, ground truth spec)
RECORD_SPECS: list[tuple[str, str, str, dict]] = [
    ("mini-001", "bar", "validation",
     {"kind": "table", "tsv": "Quarter\tRevenue\nQ1\t120\nQ2\t250\nQ3\t410\nQ4\t675\n"}),
    ("mini-002", "bar", "validation",
     {"kind": "table", "tsv": "Year\tCount\n2019\t35\n2020\t52\n2021\t88\n2022\t140\n"}),
    ("mini-003", "bar_with_labels", "validation",
     {"kind": "table", "tsv": "Category\tShare\nalpha\t5.2\nbeta\t18\ngamma\t42\ndelta\t76\n"}),
    ("mini-004", "line", "validation",
     {"kind": "table",
      "tsv": "Year\tSeriesA\tSeriesB\n2020\t30\t1200\n2021\t64\t2600\n2022\t150\t5600\n2023\t320\t12000\n"}),
    ("mini-005", "line", "validation",
     {"kind": "series", "values": [25, 40, 90, 200, 430], "label": "throughput"}),
    ("mini-006", "line_with_labels", "validation",
     {"kind": "table", "tsv": "Month\tValue\nJan\t7.5\nFeb\t21\nMar\t55\nApr\t130\nMay\t275\n"}),
    ("mini-007", "box", "validation",
     {"kind": "table", "tsv": "Group\tMedian\tIQR\nctrl\t14\t3.5\ntreatA\t33\t8.2\ntreatB\t78\t19\n"}),
    ("mini-008", "box", "validation",
     {"kind": "series", "values": [22, 48, 105, 240], "label": "upper whisker"}),
    ("mini-009", "histogram", "dev",
     {"kind": "table", "tsv": "Bin\tFrequency\n0-10\t6\n10-20\t17\n20-30\t39\n30-40\t92\n40-50\t210\n"}),
    ("mini-010", "histogram", "dev",
     {"kind": "series", "values": [28, 65, 150, 340, 760], "label": "bin count"}),
]

# ratio band where a +6% perturbation of one value could still match a
# different value at 5% relative tolerance (see module docstring)
COLLISION_BAND = (1.005, 1.12)


def record_values(spec: dict) -> list[float]:
    from ..tables import from_tsv, numeric_matrix

    if spec["kind"] == "series":
        return [float(v) for v in spec["values"]]
    matrix = numeric_matrix(from_tsv(spec["tsv"]))
    return [v for col in matrix for v in col if v is not None]


def verify_collision_free() -> None:
    """Assert the documented ratio property; used by the test suite."""
    for rid, _, _, spec in RECORD_SPECS:
        values = record_values(spec)
        assert values, f"{rid}: no numeric ground truth"
        assert all(v > 0 for v in values), f"{rid}: values must be positive"
        for a in values:
            for b in values:
                if a == b:
                    continue
                ratio = max(a, b) / min(a, b)
                lo, hi = COLLISION_BAND
                assert not (lo <= ratio <= hi), (
                    f"{rid}: values {a} and {b} sit in the collision band"
                )


def _make_image(index: int) -> Image.Image:
    w, h = 64 + 6 * index, 48 + 2 * index
    img = Image.new("RGB", (w, h), (250, 250, 245))
    draw = ImageDraw.Draw(img)
    shade = (40 + 20 * index) % 255
    for k in range(4):
        x0 = 6 + k * (w - 12) // 4
        bar_h = (k + 1) * (h - 16) // 5
        draw.rectangle(
            [x0, h - 8 - bar_h, x0 + (w - 12) // 5, h - 8],
            fill=(shade, 90, 255 - shade),
        )
    return img


def build_mini_dataset(out_dir: str | Path) -> Path:
    """Write manifest, images, echo transcript and backends file.

    Returns the manifest path.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    verify_collision_free()

    records_json = []
    for i, (rid, chart_type, split, spec) in enumerate(RECORD_SPECS):
        image_name = f"{rid}.png"
        _make_image(i).save(out / image_name)
        records_json.append(
            {
                "id": rid,
                "image": image_name,
                "chart_type": chart_type,
                "split": split,
                "ground_truth": spec,
            }
        )
    manifest = {"dataset": "figtab-mini", "records": records_json}
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")

    # echo transcript: reply to each image with its own ground truth
    from ..vlm.mock import save_transcript, transcript_key
    from .dataset import ground_truth_tsv, load_dataset

    records = load_dataset(manifest_path)
    replies = {
        transcript_key(r.image_bytes()): ground_truth_tsv(r) for r in records
    }
    save_transcript(out / "echo_transcript.json", replies)

    backends = {
        "backends": {
            "echo": {
                "provider": "mock",
                "model_id": "echo-mock",
                "transcript": "echo_transcript.json",
            }
        },
        "default": "echo",
    }
    (out / "backends.json").write_text(json.dumps(backends, indent=2) + "\n")
    return manifest_path


def main(argv: list[str]) -> int:
    if len(argv) != 1:
        print("usage: python -m figtab.bench.minidata OUTDIR", file=sys.stderr)
        return 2
    path = build_mini_dataset(argv[0])
    print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))

"""Benchmark execution: extract every record, score it, aggregate.

Failures never abort a run: a record whose extraction or parse fails
scores zero and is flagged, so headline numbers cannot silently improve
by dropping hard items. Responses can be cached on disk keyed by
(image bytes, model, prompt kind), which makes rescoring free and keeps
paid API usage down.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..metrics import Tolerance, best_column_rmsf1, recall as recall_metric, rmsf1
from ..tables import EmptyTable, numeric_matrix, parse_reply
from ..vlm import BackendConfig, MockTransport, PromptProfile, VlmClient
from .dataset import EvalRecord, ground_truth_tsv
from .report import ItemScore, MetricReport

DEFAULT_RESAMPLES = 10_000


class InsufficientData(ValueError):
    pass


def bootstrap_ci(
    scores: Sequence[float],
    level: float = 0.95,
    resamples: int = DEFAULT_RESAMPLES,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean of per-item scores.

    Resamples the items with replacement, takes the mean of each
    resample, and reports the (1-level)/2 and (1+level)/2 percentiles.
    Deterministic for a fixed seed.
    """
    if len(scores) < 2:
        raise InsufficientData("bootstrap needs at least 2 scores")
    if not 0 < level < 1:
        raise ValueError("level must be in (0, 1)")
    first = scores[0]
    if all(s == first for s in scores):
        # every resample mean equals the common value; skip the float noise
        return float(first), float(first)
    rng = np.random.default_rng(seed)
    values = np.asarray(scores, dtype=float)
    idx = rng.integers(0, len(values), size=(resamples, len(values)))
    means = values[idx].mean(axis=1)
    lo_pct = (1 - level) / 2 * 100
    lo, hi = np.percentile(means, [lo_pct, 100 - lo_pct])
    return float(lo), float(hi)


class ResponseCache:
    """Disk cache of raw replies keyed by (image bytes, model, prompt kind)."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, png: bytes, model: str, prompt_kind: str) -> Path:
        digest = hashlib.sha256(png).hexdigest()
        key = hashlib.sha256(f"{digest}:{model}:{prompt_kind}".encode()).hexdigest()
        return self.root / f"{key}.json"

    def get(self, png: bytes, model: str, prompt_kind: str) -> Optional[str]:
        path = self._path(png, model, prompt_kind)
        if not path.is_file():
            return None
        return json.loads(path.read_text())["response_text"]

    def put(self, png: bytes, model: str, prompt_kind: str, text: str) -> None:
        path = self._path(png, model, prompt_kind)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump({"response_text": text}, fh)
            os.replace(tmp, path)  # atomic publish
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def _score_record(record: EvalRecord, reply: str, tol: Tolerance) -> ItemScore:
    try:
        table = parse_reply(reply)
    except EmptyTable as exc:
        return ItemScore(
            id=record.id,
            chart_type=record.chart_type,
            recall=0.0,
            precision=0.0,
            f1=0.0,
            error=f"EmptyTable: {exc}",
            flagged=True,
        )
    pred = numeric_matrix(table)
    gt = record.ground_truth

    if gt.kind == "series":
        assert gt.values is not None
        if not pred:
            return ItemScore(record.id, record.chart_type, 0.0, 0.0, 0.0,
                             error="no columns extracted", flagged=True)
        result = best_column_rmsf1(pred, gt.values, tol)
        return ItemScore(
            id=record.id,
            chart_type=record.chart_type,
            recall=result.recall,
            precision=result.precision,
            f1=result.f1,
        )

    assert gt.table is not None
    gt_matrix = numeric_matrix(gt.table)
    gt_values = [v for col in gt_matrix for v in col if v is not None]
    pred_values = [v for col in pred for v in col if v is not None]
    rec = recall_metric(pred_values, gt_values, tol)
    result = rmsf1(pred, gt_matrix, tol)
    return ItemScore(
        id=record.id,
        chart_type=record.chart_type,
        recall=rec,
        precision=result.precision,
        f1=result.f1,
    )


def run_eval(
    records: Sequence[EvalRecord],
    backend: BackendConfig,
    profile: PromptProfile,
    tol: Tolerance = Tolerance(),
    seed: int = 0,
    parallelism: int = 1,
    transport=None,
    cache_dir: Optional[str | Path] = None,
    resamples: int = DEFAULT_RESAMPLES,
    preprocess_images: bool = False,
    log=None,
) -> MetricReport:
    """Extract, parse and score every record; aggregate with bootstrap CI.

    Table-style ground truth is scored with multiset recall plus full
    permutation-invariant F1; series-style ground truth with the best
    single extracted column. The headline metric (used for the CI
    column) is recall when every record carries a table, F1 otherwise.
    """
    cache = ResponseCache(cache_dir) if cache_dir else None
    client = VlmClient(backend, transport=transport, log=log)

    pngs: list[bytes] = []
    for record in records:
        png = record.image_bytes()
        if preprocess_images:
            import io

            from PIL import Image

            from ..vlm import preprocess, to_png_bytes

            png = to_png_bytes(preprocess(Image.open(io.BytesIO(png)).convert("RGB")))
        pngs.append(png)

    replies: dict[int, str] = {}
    errors: dict[int, str] = {}
    pending: list[int] = []
    for i, png in enumerate(pngs):
        cached = (
            cache.get(png, backend.model_id, profile.kind) if cache else None
        )
        if cached is not None:
            replies[i] = cached
        else:
            pending.append(i)

    if pending:
        outcomes = client.batch_extract(
            [pngs[i] for i in pending], profile, parallelism=parallelism
        )
        for slot, outcome in zip(pending, outcomes):
            if outcome.ok:
                replies[slot] = outcome.extraction.response_text
                if cache:
                    cache.put(
                        pngs[slot], backend.model_id, profile.kind, replies[slot]
                    )
            else:
                errors[slot] = outcome.error or "extraction failed"

    per_item: list[ItemScore] = []
    for i, record in enumerate(records):
        if i in errors:
            per_item.append(
                ItemScore(record.id, record.chart_type, 0.0, 0.0, 0.0,
                          error=errors[i], flagged=True)
            )
        else:
            per_item.append(_score_record(record, replies[i], tol))

    headline = "recall" if all(r.ground_truth.kind == "table" for r in records) else "f1"
    scores = [getattr(item, headline) for item in per_item]
    n = len(per_item)
    if n >= 2:
        ci_low, ci_high = bootstrap_ci(scores, resamples=resamples, seed=seed)
    elif n == 1:
        ci_low = ci_high = scores[0]
    else:
        ci_low = ci_high = 0.0

    def mean(xs: list[float]) -> float:
        return sum(xs) / len(xs) if xs else 0.0

    per_type: dict[str, dict] = {}
    for chart_type in sorted({item.chart_type for item in per_item}):
        items = [i for i in per_item if i.chart_type == chart_type]
        per_type[chart_type] = {
            "n": len(items),
            "mean_recall": mean([i.recall for i in items]),
            "mean_f1": mean([i.f1 for i in items]),
        }

    overall = {
        "metric": headline,
        "mean": mean(scores),
        "n": n,
        "ci_low": ci_low,
        "ci_high": ci_high,
        "mean_recall": mean([i.recall for i in per_item]),
        "mean_precision": mean([i.precision for i in per_item]),
        "mean_f1": mean([i.f1 for i in per_item]),
        "flagged": sum(1 for i in per_item if i.flagged),
    }
    patch_log = sorted({p for r in records for p in r.patches_applied})
    config = {
        "model": backend.model_id,
        "provider": backend.provider,
        "backend_name": backend.label,
        "prompt_kind": profile.kind,
        "tolerance": tol.relative,
        "zero_epsilon": tol.zero_epsilon,
        "seed": seed,
        "resamples": resamples if n >= 2 else 0,
        "ci_method": "percentile bootstrap over items",
        "preprocess": preprocess_images,
        "patches": patch_log,
    }
    return MetricReport(per_item=per_item, per_type=per_type, overall=overall, config=config)


def echo_transport(records: Sequence[EvalRecord]) -> MockTransport:
    """Mock transport replying with each record's ground truth verbatim."""
    replies = {
        hashlib.sha256(r.image_bytes()).hexdigest(): ground_truth_tsv(r)
        for r in records
    }
    return MockTransport(replies=replies)


def perturbed_transport(
    records: Sequence[EvalRecord], factor: float
) -> MockTransport:
    """Mock transport replying with every numeric scaled by (1 + factor)."""

    def perturb_tsv(tsv: str) -> str:
        out_lines = []
        lines = tsv.rstrip("\n").split("\n")
        out_lines.append(lines[0])  # header untouched
        from ..numbers import parse_number

        for line in lines[1:]:
            cells = []
            for cell in line.split("\t"):
                parsed = parse_number(cell)
                if parsed.numeric is not None:
                    cells.append(repr(parsed.numeric * (1.0 + factor)))
                else:
                    cells.append(cell)
            out_lines.append("\t".join(cells))
        return "\n".join(out_lines) + "\n"

    replies = {
        hashlib.sha256(r.image_bytes()).hexdigest(): perturb_tsv(ground_truth_tsv(r))
        for r in records
    }
    return MockTransport(replies=replies)

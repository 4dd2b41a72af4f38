"""Benchmark report structure and renderers (JSON, markdown, heatmap CSV)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional


@dataclass
class ItemScore:
    id: str
    chart_type: str
    recall: float
    precision: float
    f1: float
    error: Optional[str] = None
    flagged: bool = False


@dataclass
class MetricReport:
    per_item: list[ItemScore]
    per_type: dict[str, dict]
    overall: dict
    config: dict

    def __post_init__(self) -> None:
        if self.overall["n"]:
            assert self.overall["ci_low"] <= self.overall["mean"] <= self.overall["ci_high"]
        assert self.overall["n"] == len(self.per_item)

    def as_dict(self) -> dict:
        return {
            "per_item": [asdict(item) for item in self.per_item],
            "per_type": self.per_type,
            "overall": self.overall,
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MetricReport":
        return cls(
            per_item=[ItemScore(**item) for item in payload["per_item"]],
            per_type=payload["per_type"],
            overall=payload["overall"],
            config=payload["config"],
        )


def _pct(x: float) -> str:
    return f"{100.0 * x:.1f}%"


def render_report(report: MetricReport, format: str = "json") -> bytes:
    """Serialize a report.

    json: the full report, deterministic byte-for-byte for equal inputs.
    markdown-table: one summary row (Model | Provider | N | Recall | 95% CI).
    heatmap-csv: model row x chart-type columns of F1 percentages.
    """
    if format == "json":
        return (
            json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"
        ).encode("utf-8")

    overall = report.overall
    config = report.config
    if format == "markdown-table":
        lines = [
            "| Model | Provider | N | Recall | 95% CI |",
            "| --- | --- | --- | --- | --- |",
        ]
        if overall["n"] == 0:
            lines.append("| " + (config.get("model") or "-") + " | "
                         + config.get("provider", "-") + " | 0 | n/a | n/a |")
            lines.append("")
            lines.append("No items scored (n=0).")
        else:
            ci = f"[{100 * overall['ci_low']:.1f}, {100 * overall['ci_high']:.1f}]"
            lines.append(
                "| {model} | {provider} | {n} | {recall} | {ci} |".format(
                    model=config.get("model") or config.get("backend_name", "-"),
                    provider=config.get("provider", "-"),
                    n=overall["n"],
                    recall=_pct(overall["mean_recall"]),
                    ci=ci,
                )
            )
        return ("\n".join(lines) + "\n").encode("utf-8")

    if format == "heatmap-csv":
        chart_types = sorted(report.per_type)
        header = ["model"] + chart_types
        row = [config.get("model") or config.get("backend_name", "-")]
        row += [f"{100 * report.per_type[t]['mean_f1']:.1f}" for t in chart_types]
        return ("\n".join([",".join(header), ",".join(row)]) + "\n").encode("utf-8")

    raise ValueError(f"unknown report format: {format!r}")

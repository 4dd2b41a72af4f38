"""End-to-end figure detection: PDF bytes in, cropped images out."""

from __future__ import annotations

import json
import re
from pathlib import Path

from .captions import find_captions
from .content import ContentInterpreter
from .document import PdfDocument, open_document
from .layout import build_page_layout, scan_pdf
from .model import FigureRegion
from .regions import expand_region
from .render import render_region

DEFAULT_DPI = 144  # 2x the 72 pt baseline; matches the upscaling gain


def detect_figures(data: bytes, dpi: int = DEFAULT_DPI) -> list[FigureRegion]:
    """Find captioned figures and render each crop."""
    doc = open_document(data)
    figures: list[FigureRegion] = []
    for page in doc.pages:
        elements = ContentInterpreter(doc).collect(page.contents, page.resources)
        layout = build_page_layout(doc, page)
        for caption in find_captions(layout):
            crop = expand_region(caption, layout)
            image = render_region(doc, crop, page.index, dpi, elements=elements)
            figures.append(
                FigureRegion(caption=caption, crop=crop, image=image, dpi=dpi)
            )
    return figures


def _slug(label: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", label.lower()).strip("-")


def write_figure_outputs(
    data: bytes,
    out_dir: str | Path,
    source_name: str = "document.pdf",
    dpi: int = DEFAULT_DPI,
) -> dict:
    """Detect figures, save PNGs, and return (and write) the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    figures = detect_figures(data, dpi=dpi)

    entries = []
    used_names: set[str] = set()
    for figure in figures:
        base = _slug(figure.caption.label) or "figure"
        name = f"{base}-p{figure.page_index + 1}"
        candidate = name
        suffix = 2
        while candidate in used_names:
            candidate = f"{name}-{suffix}"
            suffix += 1
        used_names.add(candidate)
        image_path = out / f"{candidate}.png"
        figure.image.save(image_path)
        entries.append(
            {
                "label": figure.caption.label,
                "page": figure.page_index,
                "crop": figure.crop.as_list(),
                "caption": figure.caption.caption_text,
                "image_path": image_path.name,
            }
        )

    manifest = {"source": source_name, "figures": entries}
    (out / "figures.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


__all__ = [
    "DEFAULT_DPI",
    "detect_figures",
    "scan_pdf",
    "write_figure_outputs",
]

"""Geometry and layout types for figure detection.

All rectangles here use page coordinates with the origin at the top
left of the page (y grows downward), matching how crops and pixel
coordinates are reported. The low-level PDF machinery works in PDF user
space (origin bottom left) and flips once when building a PageLayout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from PIL import Image


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self) -> None:
        if self.x0 > self.x1 or self.y0 > self.y1:
            raise ValueError(f"degenerate rect: {self}")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    def union(self, other: "Rect") -> "Rect":
        return Rect(
            min(self.x0, other.x0),
            min(self.y0, other.y0),
            max(self.x1, other.x1),
            max(self.y1, other.y1),
        )

    def contains(self, other: "Rect", slack: float = 1e-6) -> bool:
        return (
            self.x0 <= other.x0 + slack
            and self.y0 <= other.y0 + slack
            and self.x1 >= other.x1 - slack
            and self.y1 >= other.y1 - slack
        )

    def intersects(self, other: "Rect") -> bool:
        return not (
            self.x1 < other.x0
            or other.x1 < self.x0
            or self.y1 < other.y0
            or other.y1 < self.y0
        )

    def gap_to(self, other: "Rect") -> float:
        """Separation between two rects: max of the axis gaps, 0 if touching."""
        dx = max(0.0, max(other.x0 - self.x1, self.x0 - other.x1))
        dy = max(0.0, max(other.y0 - self.y1, self.y0 - other.y1))
        return max(dx, dy)

    def horizontal_overlap(self, other: "Rect") -> float:
        return max(0.0, min(self.x1, other.x1) - max(self.x0, other.x0))

    def padded(self, amount: float) -> "Rect":
        return Rect(
            self.x0 - amount, self.y0 - amount, self.x1 + amount, self.y1 + amount
        )

    def clamped(self, width: float, height: float) -> "Rect":
        return Rect(
            min(max(self.x0, 0.0), width),
            min(max(self.y0, 0.0), height),
            min(max(self.x1, 0.0), width),
            min(max(self.y1, 0.0), height),
        )

    def as_list(self) -> list[float]:
        return [self.x0, self.y0, self.x1, self.y1]


def bounding_rect(points: list[tuple[float, float]]) -> Rect:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return Rect(min(xs), min(ys), max(xs), max(ys))


@dataclass
class TextBlock:
    bbox: Rect
    text: str


@dataclass
class PageLayout:
    page_index: int
    width: float
    height: float
    text_blocks: list[TextBlock] = field(default_factory=list)
    image_boxes: list[Rect] = field(default_factory=list)
    drawing_boxes: list[Rect] = field(default_factory=list)


@dataclass
class CaptionMatch:
    page_index: int
    block: Rect
    label: str  # normalized, e.g. "Figure 3"
    caption_text: str


@dataclass
class FigureRegion:
    caption: CaptionMatch
    crop: Rect
    image: Image.Image
    dpi: int

    @property
    def page_index(self) -> int:
        return self.caption.page_index


def merge_boxes(boxes: list[Rect], max_gap: float) -> list[Rect]:
    """Merge boxes that overlap or sit within max_gap, to a fixed point."""
    merged = list(boxes)
    changed = True
    while changed:
        changed = False
        out: list[Rect] = []
        for box in merged:
            for i, existing in enumerate(out):
                if existing.gap_to(box) <= max_gap:
                    out[i] = existing.union(box)
                    changed = True
                    break
            else:
                out.append(box)
        merged = out
    return merged


def pixel_size(rect: Rect, dpi: int) -> tuple[int, int]:
    """Rendered size of a page-space rect at a given dpi (72 pt per inch)."""
    scale = dpi / 72.0
    return (
        max(1, round(rect.width * scale)),
        max(1, round(rect.height * scale)),
    )

"""Crop-region growth around a caption.

The crop starts at the caption block and repeatedly absorbs any image
or drawing box within the proximity threshold of the growing region,
until nothing more is close enough (a fixed point: larger thresholds
can only ever make the crop larger). Boxes in a different column are
ignored via a horizontal-overlap gate. If the page has no graphics near
the caption at all, a band above the caption is taken instead: captions
sit below their figure far more often than above.
"""

from __future__ import annotations

from .model import CaptionMatch, PageLayout, Rect

PROXIMITY_THRESHOLD = 36.0  # pt; half an inch separates figure gaps from strangers
PADDING = 6.0  # pt on every side, keeps axis labels inside the crop
FALLBACK_BAND_FRACTION = 0.40  # of page height, above the caption
COLUMN_OVERLAP_FRACTION = 0.30  # of the narrower span


def _same_column(box: Rect, caption: Rect, fraction: float) -> bool:
    narrower = min(box.width, caption.width)
    if narrower <= 1.0:
        return True
    return box.horizontal_overlap(caption) >= fraction * narrower


def expand_region(
    caption: CaptionMatch,
    layout: PageLayout,
    threshold: float = PROXIMITY_THRESHOLD,
    padding: float = PADDING,
    fallback_fraction: float = FALLBACK_BAND_FRACTION,
    column_overlap: float = COLUMN_OVERLAP_FRACTION,
) -> Rect:
    """Crop rectangle for one caption. Always contains the caption block."""
    if caption.page_index != layout.page_index:
        raise ValueError("caption and layout belong to different pages")

    candidates = [
        box
        for box in list(layout.image_boxes) + list(layout.drawing_boxes)
        if _same_column(box, caption.block, column_overlap)
    ]

    region = caption.block
    used = [False] * len(candidates)
    grew = True
    absorbed_any = False
    while grew:
        grew = False
        for i, box in enumerate(candidates):
            if used[i]:
                continue
            if region.gap_to(box) <= threshold:
                region = region.union(box)
                used[i] = True
                grew = True
                absorbed_any = True

    if not absorbed_any:
        band_top = max(0.0, caption.block.y0 - fallback_fraction * layout.height)
        region = Rect(caption.block.x0, band_top, caption.block.x1, caption.block.y1)

    return region.padded(padding).clamped(layout.width, layout.height)

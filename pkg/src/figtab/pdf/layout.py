"""Page layout extraction: text blocks, image boxes, drawing clusters.

Converts interpreter output (PDF user space, y up) into PageLayout
objects with top-left-origin rectangles. Text spans are grouped into
lines, lines into blocks, preserving content-stream order so captions
read in document order. Vector paths are clustered into drawing boxes:
a figure drawn from hundreds of little strokes becomes one box.
"""

from __future__ import annotations

from typing import Optional

from .content import ContentInterpreter, ImagePlace, PathDraw, TextSpan
from .document import MalformedPdf, Page, PdfDocument, open_document
from .model import PageLayout, Rect, TextBlock, merge_boxes

DRAWING_MERGE_GAP = 5.0  # pt between primitives that form one figure
PAGE_BACKGROUND_AREA_FRAC = 0.85  # fills this large are page dressing
MIN_DRAWING_SIZE = 0.3  # ignore sub-point specks

LINE_BASELINE_TOLERANCE = 0.40  # fraction of font size
LINE_JOIN_GAP = 2.0  # em fraction is too strict for wide tracking; use pt
BLOCK_LINE_SPACING = 1.9  # max baseline step, in font sizes
BLOCK_MIN_OVERLAP = 0.20  # horizontal overlap vs narrower line


class _Line:
    def __init__(self, span, baseline: float) -> None:
        self.spans = [span]
        self.baseline = baseline

    def try_add(self, span, baseline: float) -> bool:
        size = max(span.size, 1.0)
        if abs(baseline - self.baseline) > LINE_BASELINE_TOLERANCE * size:
            return False
        x0 = min(s.bbox[0] for s in self.spans)
        x1 = max(s.bbox[2] for s in self.spans)
        if span.bbox[0] > x1 + 2.5 * size or span.bbox[2] < x0 - 2.5 * size:
            return False
        self.spans.append(span)
        return True

    def finish(self) -> tuple[Rect, str, float, float]:
        spans = sorted(self.spans, key=lambda s: s.bbox[0])
        text_parts = [spans[0].text]
        for prev, cur in zip(spans, spans[1:]):
            gap = cur.bbox[0] - prev.bbox[2]
            joiner = " " if gap > 0.18 * max(cur.size, 1.0) else ""
            text_parts.append(joiner + cur.text)
        x0 = min(s.bbox[0] for s in spans)
        y0 = min(s.bbox[1] for s in spans)
        x1 = max(s.bbox[2] for s in spans)
        y1 = max(s.bbox[3] for s in spans)
        size = max(s.size for s in spans)
        return Rect(x0, y0, x1, y1), "".join(text_parts), self.baseline, size


def _group_lines(spans: list[tuple[TextSpan, float]]) -> list[tuple[Rect, str, float, float]]:
    lines: list[_Line] = []
    for span, baseline in spans:
        for line in reversed(lines[-6:]):
            if line.try_add(span, baseline):
                break
        else:
            lines.append(_Line(span, baseline))
    return [line.finish() for line in lines]


class _Block:
    def __init__(self, line) -> None:
        self.lines = [line]

    @property
    def bbox(self) -> Rect:
        rect = self.lines[0][0]
        for line in self.lines[1:]:
            rect = rect.union(line[0])
        return rect

    def try_add(self, line) -> bool:
        rect, _, baseline, size = line
        last_rect, _, last_baseline, last_size = self.lines[-1]
        ref = max(size, last_size, 1.0)
        step = baseline - last_baseline
        if not (0.4 * ref <= step <= BLOCK_LINE_SPACING * ref):
            return False
        overlap = rect.horizontal_overlap(last_rect)
        narrower = max(min(rect.width, last_rect.width), 1.0)
        if overlap < BLOCK_MIN_OVERLAP * narrower:
            return False
        self.lines.append(line)
        return True

    def finish(self) -> TextBlock:
        text = " ".join(line[1] for line in self.lines)
        return TextBlock(bbox=self.bbox, text=text)


def _group_blocks(lines) -> list[TextBlock]:
    blocks: list[_Block] = []
    for line in lines:
        for block in reversed(blocks[-4:]):
            if block.try_add(line):
                break
        else:
            blocks.append(_Block(line))
    return [b.finish() for b in blocks]


def build_page_layout(doc: PdfDocument, page: Page) -> PageLayout:
    elements = ContentInterpreter(doc).collect(page.contents, page.resources)
    width, height = page.width, page.height

    def flip(bbox) -> Rect:
        x0, y0, x1, y1 = bbox
        return Rect(x0, height - y1, x1, height - y0).clamped(width, height)

    spans: list[tuple[TextSpan, float]] = []
    image_boxes: list[Rect] = []
    raw_drawings: list[tuple[Rect, PathDraw]] = []

    for element in elements:
        if isinstance(element, TextSpan):
            baseline = height - element.origin[1]
            spans.append((_flip_span(element, width, height), baseline))
        elif isinstance(element, ImagePlace):
            box = flip(element.bbox)
            if box.width >= 1 and box.height >= 1:
                image_boxes.append(box)
        elif isinstance(element, PathDraw):
            box = flip(element.bbox)
            if box.width < MIN_DRAWING_SIZE and box.height < MIN_DRAWING_SIZE:
                continue
            raw_drawings.append((box, element))

    page_area = max(width * height, 1.0)
    drawing_boxes = []
    for box, element in raw_drawings:
        if box.area > PAGE_BACKGROUND_AREA_FRAC * page_area:
            continue  # full-page background fill
        if element.fill and not element.stroke and _is_white(element.fill_color):
            continue  # invisible ink
        drawing_boxes.append(box)

    return PageLayout(
        page_index=page.index,
        width=width,
        height=height,
        text_blocks=_group_blocks(_group_lines(spans)),
        image_boxes=image_boxes,
        drawing_boxes=merge_boxes(drawing_boxes, DRAWING_MERGE_GAP),
    )


def _flip_span(span: TextSpan, width: float, height: float) -> TextSpan:
    x0, y0, x1, y1 = span.bbox
    flipped = (
        min(max(x0, 0.0), width),
        min(max(height - y1, 0.0), height),
        min(max(x1, 0.0), width),
        min(max(height - y0, 0.0), height),
    )
    return TextSpan(
        text=span.text,
        bbox=flipped,
        origin=span.origin,
        size=span.size,
        font=span.font,
        color=span.color,
    )


def _is_white(color: tuple[float, float, float]) -> bool:
    return all(c >= 0.98 for c in color)


def scan_pdf(data: bytes, document: Optional[PdfDocument] = None) -> list[PageLayout]:
    """Parse a PDF byte stream into one PageLayout per page.

    Raises MalformedPdf for unparseable input and EncryptedPdf for
    password-protected files.
    """
    doc = document or open_document(data)
    layouts = []
    for page in doc.pages:
        try:
            layouts.append(build_page_layout(doc, page))
        except Exception as exc:
            raise MalformedPdf(
                f"cannot interpret page {page.index}: {exc}"
            ) from exc
    return layouts

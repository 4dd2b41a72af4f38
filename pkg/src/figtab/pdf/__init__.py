from .captions import find_captions, match_caption_text, roman_to_int
from .document import EncryptedPdf, MalformedPdf, PdfDocument, open_document
from .layout import build_page_layout, scan_pdf
from .model import (
    CaptionMatch,
    FigureRegion,
    PageLayout,
    Rect,
    TextBlock,
    merge_boxes,
    pixel_size,
)
from .pipeline import DEFAULT_DPI, detect_figures, write_figure_outputs
from .regions import expand_region
from .render import RenderFailure, render_region

__all__ = [
    "CaptionMatch",
    "DEFAULT_DPI",
    "EncryptedPdf",
    "FigureRegion",
    "MalformedPdf",
    "PageLayout",
    "PdfDocument",
    "Rect",
    "RenderFailure",
    "TextBlock",
    "build_page_layout",
    "detect_figures",
    "expand_region",
    "find_captions",
    "match_caption_text",
    "merge_boxes",
    "open_document",
    "pixel_size",
    "render_region",
    "roman_to_int",
    "scan_pdf",
    "write_figure_outputs",
]

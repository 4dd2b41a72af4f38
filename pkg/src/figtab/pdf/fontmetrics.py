"""Glyph widths for the standard 14 fonts (AFM data, 1/1000 em units).

PDFs using built-in fonts carry no width arrays, so text extents have
to come from these tables. Only the ASCII range is tabulated; anything
else falls back to an average width, which is plenty for caption-block
bounds.
"""

from __future__ import annotations

_HELVETICA = (
    278, 278, 355, 556, 556, 889, 667, 191, 333, 333, 389, 584, 278, 333,
    278, 278, 556, 556, 556, 556, 556, 556, 556, 556, 556, 556, 278, 278,
    584, 584, 584, 556, 1015, 667, 667, 722, 722, 667, 611, 778, 722, 278,
    500, 667, 556, 833, 722, 778, 667, 778, 722, 667, 611, 722, 667, 944,
    667, 667, 611, 278, 278, 278, 469, 556, 333, 556, 556, 500, 556, 556,
    278, 556, 556, 222, 222, 500, 222, 833, 556, 556, 556, 556, 333, 500,
    278, 556, 500, 722, 500, 500, 500, 334, 260, 334, 584,
)

_HELVETICA_BOLD = (
    278, 333, 474, 556, 556, 889, 722, 238, 333, 333, 389, 584, 278, 333,
    278, 278, 556, 556, 556, 556, 556, 556, 556, 556, 556, 556, 333, 333,
    584, 584, 584, 611, 975, 722, 722, 722, 722, 667, 611, 778, 722, 278,
    556, 722, 611, 833, 722, 778, 667, 778, 722, 667, 611, 722, 667, 944,
    667, 667, 611, 333, 278, 333, 584, 556, 333, 556, 611, 556, 611, 556,
    333, 611, 611, 278, 278, 556, 278, 889, 611, 611, 611, 611, 389, 556,
    333, 611, 556, 778, 556, 556, 500, 389, 280, 389, 584,
)

_TIMES_ROMAN = (
    250, 333, 408, 500, 500, 833, 778, 180, 333, 333, 500, 564, 250, 333,
    250, 278, 500, 500, 500, 500, 500, 500, 500, 500, 500, 500, 278, 278,
    564, 564, 564, 444, 921, 722, 667, 667, 722, 611, 556, 722, 722, 333,
    389, 722, 611, 889, 722, 722, 556, 722, 667, 556, 611, 722, 722, 944,
    722, 722, 611, 333, 278, 333, 469, 500, 333, 444, 500, 444, 500, 444,
    333, 500, 500, 278, 278, 500, 278, 778, 500, 500, 500, 500, 333, 389,
    278, 500, 500, 722, 500, 500, 444, 480, 200, 480, 541,
)

# (widths for chars 32..126, ascent, descent, default width)
_METRICS: dict[str, tuple[tuple[int, ...] | None, float, float, int]] = {
    "Helvetica": (_HELVETICA, 718, -207, 556),
    "Helvetica-Oblique": (_HELVETICA, 718, -207, 556),
    "Helvetica-Bold": (_HELVETICA_BOLD, 718, -207, 611),
    "Helvetica-BoldOblique": (_HELVETICA_BOLD, 718, -207, 611),
    "Times-Roman": (_TIMES_ROMAN, 683, -217, 500),
    "Times-Italic": (_TIMES_ROMAN, 683, -217, 500),
    "Times-Bold": (_TIMES_ROMAN, 683, -217, 500),
    "Times-BoldItalic": (_TIMES_ROMAN, 683, -217, 500),
    "Courier": (None, 629, -157, 600),
    "Courier-Bold": (None, 629, -157, 600),
    "Courier-Oblique": (None, 629, -157, 600),
    "Courier-BoldOblique": (None, 629, -157, 600),
    "Symbol": (None, 692, -14, 500),
    "ZapfDingbats": (None, 820, -143, 500),
}

FALLBACK_WIDTH = 500
FALLBACK_ASCENT = 720
FALLBACK_DESCENT = -210


def base_font_name(name: str) -> str:
    """Strip a subset prefix like ``ABCDEF+Helvetica``."""
    if len(name) > 7 and name[6] == "+":
        return name[7:]
    return name


def builtin_char_width(font: str, code: int) -> int:
    metrics = _METRICS.get(base_font_name(font))
    if metrics is None:
        return FALLBACK_WIDTH
    widths, _, _, default = metrics
    if widths is None:
        return default
    if 32 <= code <= 126:
        return widths[code - 32]
    return default


def builtin_vertical_metrics(font: str) -> tuple[float, float]:
    metrics = _METRICS.get(base_font_name(font))
    if metrics is None:
        return FALLBACK_ASCENT / 1000.0, FALLBACK_DESCENT / 1000.0
    _, ascent, descent, _ = metrics
    return ascent / 1000.0, descent / 1000.0

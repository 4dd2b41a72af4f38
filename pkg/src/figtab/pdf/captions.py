"""Figure-caption detection in text blocks.

A block is a caption when it *starts* with a figure label: "Figure 3:",
"Fig. 2.", "figure IV)" and the common variations. Mid-sentence
mentions ("as shown in Figure 3") and words containing "fig"
("configure") never match. Labels are normalized to "Figure N".
"""

from __future__ import annotations

import re

from .model import CaptionMatch, PageLayout

CAPTION_RE = re.compile(
    r"""^\s*
    fig(?:ure)?\.?          # fig / fig. / figure / figure.
    \s+
    (?P<number>\d+[a-z]?|[ivxlcdm]+)   # 3, 3b, iv
    (?P<delim>[.:)])?
    (?=\s|$)
    """,
    re.IGNORECASE | re.VERBOSE,
)

_ROMAN_VALUES = {"i": 1, "v": 5, "x": 10, "l": 50, "c": 100, "d": 500, "m": 1000}


def roman_to_int(text: str) -> int:
    total = 0
    prev = 0
    for ch in reversed(text.lower()):
        value = _ROMAN_VALUES[ch]
        if value < prev:
            total -= value
        else:
            total += value
            prev = value
    return total


def normalize_label(number: str) -> str:
    digits = "".join(ch for ch in number if ch.isdigit())
    if digits:
        return f"Figure {int(digits)}"  # subfigure letters fold into the figure
    return f"Figure {roman_to_int(number)}"


def match_caption_text(text: str) -> str | None:
    """Return the normalized label if the text starts a figure caption."""
    m = CAPTION_RE.match(text)
    if not m:
        return None
    return normalize_label(m.group("number"))


def find_captions(layout: PageLayout) -> list[CaptionMatch]:
    """Caption matches for every block that starts with a figure label.

    Deterministic and order-preserving over layout.text_blocks.
    """
    matches = []
    for block in layout.text_blocks:
        label = match_caption_text(block.text)
        if label is not None:
            matches.append(
                CaptionMatch(
                    page_index=layout.page_index,
                    block=block.bbox,
                    label=label,
                    caption_text=block.text.strip(),
                )
            )
    return matches

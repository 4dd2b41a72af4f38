"""Numeric cell grammar.

Model replies carry numbers in many shapes: "1,234.5", "45%", "2.3e4",
"$120", "2.3 million", "2.3M". Charts with scaled axes are a known
failure mode when the magnitude word is dropped, so magnitude suffixes
multiply into the stored value and the applied factor is kept alongside.

Parsing is total: anything outside the grammar simply yields no numeric
value. The multiplication happens in decimal arithmetic so that e.g.
"2.3 million" is exactly 2300000.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional

_MAGNITUDES = {
    "k": 10**3,
    "thousand": 10**3,
    "thousands": 10**3,
    "m": 10**6,
    "million": 10**6,
    "millions": 10**6,
    "b": 10**9,
    "billion": 10**9,
    "billions": 10**9,
}

# A comma counts as a thousands separator only when followed by exactly
# three digits and then another group, a decimal point, or the end;
# anything else (European decimals like "1,5") stays non-numeric.
_NUMBER_RE = re.compile(
    r"""^
    (?P<currency>[$€£¥])?\s{0,2}
    (?P<sign>[+-])?
    (?P<mantissa>
        \d{1,3}(?:,\d{3})+(?:\.\d*)?      # comma-grouped
        | (?:\d+(?:\.\d*)? | \.\d+)       # plain decimal
          (?:[eE][+-]?\d+)?               # optional exponent
    )
    (?:\s?(?P<magnitude>[kKmMbB]|(?i:thousands?|millions?|billions?))\b)?
    \s{0,2}(?P<percent>%)?
    $""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class CellValue:
    """One parsed cell: original text plus optional numeric reading."""

    raw: str
    numeric: Optional[float] = None
    magnitude_applied: Optional[int] = None
    unit_hint: Optional[str] = None

    @property
    def is_numeric(self) -> bool:
        return self.numeric is not None


def parse_number(raw: str) -> CellValue:
    """Parse one cell of text; never raises.

    Returns a CellValue whose ``numeric`` is set iff the text fits the
    grammar. Magnitude words and suffixes (thousand/K, million/M,
    billion/B, any case, space optional) multiply into ``numeric`` and
    are reported via ``magnitude_applied``.
    """
    text = raw.strip()
    m = _NUMBER_RE.match(text)
    if not m:
        return CellValue(raw=raw)

    mantissa = Decimal(m.group("mantissa").replace(",", ""))
    if m.group("sign") == "-":
        mantissa = -mantissa

    magnitude: Optional[int] = None
    word = m.group("magnitude")
    if word:
        magnitude = _MAGNITUDES[word.lower()]
        value = mantissa * magnitude
    else:
        value = mantissa

    unit = "%" if m.group("percent") else m.group("currency")
    return CellValue(
        raw=raw,
        numeric=float(value),
        magnitude_applied=magnitude,
        unit_hint=unit,
    )

"""Tokenizer for PDF object syntax.

Covers the COS object grammar: numbers, booleans, null, names with #xx
escapes, literal and hex strings, arrays, dictionaries, and indirect
references (the ``N G R`` form). Streams are handled one level up by
the document parser since they need the xref to resolve /Length.
"""

from __future__ import annotations

from typing import Any, NamedTuple

WHITESPACE = b"\x00\t\n\x0c\r "
DELIMITERS = b"()<>[]{}/%"


class Ref(NamedTuple):
    num: int
    gen: int


class Name(str):
    """A PDF name object; distinct from string values."""

    __slots__ = ()


class Keyword(str):
    """A bare keyword token (operators, obj/endobj, true/false handled apart)."""

    __slots__ = ()


class PdfSyntaxError(ValueError):
    pass


def skip_whitespace(data: bytes, pos: int) -> int:
    n = len(data)
    while pos < n:
        b = data[pos]
        if b in WHITESPACE:
            pos += 1
        elif b == 0x25:  # % comment to end of line
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    return pos


def _at_regular(data: bytes, pos: int) -> bool:
    return pos < len(data) and data[pos] not in WHITESPACE and data[pos] not in DELIMITERS


def parse_name(data: bytes, pos: int) -> tuple[Name, int]:
    assert data[pos : pos + 1] == b"/"
    pos += 1
    out = bytearray()
    while _at_regular(data, pos):
        b = data[pos]
        if b == 0x23 and pos + 2 < len(data):  # #xx escape
            try:
                out.append(int(data[pos + 1 : pos + 3], 16))
                pos += 3
                continue
            except ValueError:
                pass
        out.append(b)
        pos += 1
    return Name(out.decode("latin-1")), pos


def parse_literal_string(data: bytes, pos: int) -> tuple[bytes, int]:
    assert data[pos : pos + 1] == b"("
    pos += 1
    out = bytearray()
    depth = 1
    n = len(data)
    while pos < n:
        b = data[pos]
        if b == 0x5C:  # backslash escape
            pos += 1
            if pos >= n:
                break
            e = data[pos]
            mapping = {0x6E: 0x0A, 0x72: 0x0D, 0x74: 0x09, 0x62: 0x08, 0x66: 0x0C}
            if e in mapping:
                out.append(mapping[e])
                pos += 1
            elif e in b"()\\":
                out.append(e)
                pos += 1
            elif e in b"\r\n":  # line continuation
                pos += 1
                if e == 0x0D and pos < n and data[pos] == 0x0A:
                    pos += 1
            elif 0x30 <= e <= 0x37:  # octal, up to 3 digits
                digits = bytearray()
                while pos < n and len(digits) < 3 and 0x30 <= data[pos] <= 0x37:
                    digits.append(data[pos])
                    pos += 1
                out.append(int(digits, 8) & 0xFF)
            else:
                out.append(e)
                pos += 1
        elif b == 0x28:
            depth += 1
            out.append(b)
            pos += 1
        elif b == 0x29:
            depth -= 1
            if depth == 0:
                return bytes(out), pos + 1
            out.append(b)
            pos += 1
        else:
            out.append(b)
            pos += 1
    raise PdfSyntaxError("unterminated literal string")


def parse_hex_string(data: bytes, pos: int) -> tuple[bytes, int]:
    assert data[pos : pos + 1] == b"<"
    end = data.find(b">", pos + 1)
    if end == -1:
        raise PdfSyntaxError("unterminated hex string")
    digits = bytes(c for c in data[pos + 1 : end] if c not in WHITESPACE)
    if len(digits) % 2:
        digits += b"0"
    try:
        return bytes.fromhex(digits.decode("ascii")), end + 1
    except ValueError as exc:
        raise PdfSyntaxError(f"bad hex string: {exc}") from exc


def parse_number(data: bytes, pos: int) -> tuple[Any, int]:
    start = pos
    n = len(data)
    if pos < n and data[pos] in b"+-":
        pos += 1
    seen_dot = False
    while pos < n and (data[pos : pos + 1].isdigit() or data[pos] == 0x2E):
        if data[pos] == 0x2E:
            if seen_dot:
                break
            seen_dot = True
        pos += 1
    token = data[start:pos]
    if token in (b"", b"+", b"-", b".", b"-.", b"+."):
        raise PdfSyntaxError(f"bad number at {start}")
    if seen_dot:
        return float(token), pos
    return int(token), pos


def parse_object(data: bytes, pos: int, allow_keyword: bool = False) -> tuple[Any, int]:
    """Parse one object starting at pos (whitespace tolerated)."""
    pos = skip_whitespace(data, pos)
    if pos >= len(data):
        raise PdfSyntaxError("unexpected end of data")
    b = data[pos]

    if b == 0x2F:  # /
        return parse_name(data, pos)
    if b == 0x28:  # (
        return parse_literal_string(data, pos)
    if b == 0x3C:  # < or <<
        if data[pos : pos + 2] == b"<<":
            return parse_dict(data, pos)
        return parse_hex_string(data, pos)
    if b == 0x5B:  # [
        return parse_array(data, pos)
    if b == 0x5D or b == 0x3E:
        raise PdfSyntaxError(f"unexpected delimiter at {pos}")

    if (0x30 <= b <= 0x39) or b in b"+-.":
        value, after = parse_number(data, pos)
        if isinstance(value, int) and value >= 0:
            ref, ref_end = _try_reference(data, after, value)
            if ref is not None:
                return ref, ref_end
        return value, after

    # bare keyword
    start = pos
    while _at_regular(data, pos):
        pos += 1
    word = data[start:pos]
    if word == b"true":
        return True, pos
    if word == b"false":
        return False, pos
    if word == b"null":
        return None, pos
    if not word:
        raise PdfSyntaxError(f"cannot parse object at {start}: {data[start:start+20]!r}")
    if allow_keyword:
        return Keyword(word.decode("latin-1")), pos
    raise PdfSyntaxError(f"unexpected keyword {word!r} at {start}")


def _try_reference(data: bytes, pos: int, num: int) -> tuple[Any, int]:
    """After an integer, look ahead for ``gen R``."""
    save = pos
    pos = skip_whitespace(data, pos)
    start = pos
    n = len(data)
    while pos < n and data[pos : pos + 1].isdigit():
        pos += 1
    if pos == start:
        return None, save
    gen = int(data[start:pos])
    pos = skip_whitespace(data, pos)
    if data[pos : pos + 1] == b"R" and not _at_regular(data, pos + 1):
        return Ref(num, gen), pos + 1
    return None, save


def parse_array(data: bytes, pos: int) -> tuple[list, int]:
    assert data[pos : pos + 1] == b"["
    pos += 1
    items = []
    while True:
        pos = skip_whitespace(data, pos)
        if pos >= len(data):
            raise PdfSyntaxError("unterminated array")
        if data[pos] == 0x5D:
            return items, pos + 1
        value, pos = parse_object(data, pos)
        items.append(value)


def parse_dict(data: bytes, pos: int) -> tuple[dict, int]:
    assert data[pos : pos + 2] == b"<<"
    pos += 2
    out: dict[str, Any] = {}
    while True:
        pos = skip_whitespace(data, pos)
        if pos >= len(data):
            raise PdfSyntaxError("unterminated dictionary")
        if data[pos : pos + 2] == b">>":
            return out, pos + 2
        key, pos = parse_object(data, pos)
        if not isinstance(key, Name):
            raise PdfSyntaxError(f"dictionary key is not a name: {key!r}")
        value, pos = parse_object(data, pos)
        out[str(key)] = value

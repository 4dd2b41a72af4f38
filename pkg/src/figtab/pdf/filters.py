"""Stream filter decoding: Flate (with PNG predictors), ASCII85,
ASCIIHex, RunLength. DCT (JPEG) streams are passed through raw for the
image decoder to hand to PIL."""

from __future__ import annotations

import base64
import zlib


class FilterError(ValueError):
    pass


def _apply_png_predictor(data: bytes, colors: int, bpc: int, columns: int) -> bytes:
    bytes_per_pixel = max(1, (colors * bpc) // 8)
    row_len = (columns * colors * bpc + 7) // 8
    out = bytearray()
    prev = bytearray(row_len)
    pos = 0
    while pos < len(data):
        tag = data[pos]
        row = bytearray(data[pos + 1 : pos + 1 + row_len])
        if len(row) < row_len:
            row.extend(b"\x00" * (row_len - len(row)))
        pos += 1 + row_len
        if tag == 0:
            pass
        elif tag == 1:  # Sub
            for i in range(bytes_per_pixel, row_len):
                row[i] = (row[i] + row[i - bytes_per_pixel]) & 0xFF
        elif tag == 2:  # Up
            for i in range(row_len):
                row[i] = (row[i] + prev[i]) & 0xFF
        elif tag == 3:  # Average
            for i in range(row_len):
                left = row[i - bytes_per_pixel] if i >= bytes_per_pixel else 0
                row[i] = (row[i] + (left + prev[i]) // 2) & 0xFF
        elif tag == 4:  # Paeth
            for i in range(row_len):
                left = row[i - bytes_per_pixel] if i >= bytes_per_pixel else 0
                up = prev[i]
                ul = prev[i - bytes_per_pixel] if i >= bytes_per_pixel else 0
                p = left + up - ul
                pa, pb, pc = abs(p - left), abs(p - up), abs(p - ul)
                if pa <= pb and pa <= pc:
                    pred = left
                elif pb <= pc:
                    pred = up
                else:
                    pred = ul
                row[i] = (row[i] + pred) & 0xFF
        else:
            raise FilterError(f"unknown PNG predictor tag {tag}")
        out.extend(row)
        prev = row
    return bytes(out)


def flate_decode(data: bytes, params: dict | None) -> bytes:
    try:
        raw = zlib.decompress(data)
    except zlib.error:
        # tolerate trailing garbage by decompressing incrementally
        try:
            d = zlib.decompressobj()
            raw = d.decompress(data)
        except zlib.error as exc:
            raise FilterError(f"flate: {exc}") from exc
    predictor = int((params or {}).get("Predictor", 1))
    if predictor <= 1:
        return raw
    if predictor >= 10:
        return _apply_png_predictor(
            raw,
            colors=int((params or {}).get("Colors", 1)),
            bpc=int((params or {}).get("BitsPerComponent", 8)),
            columns=int((params or {}).get("Columns", 1)),
        )
    raise FilterError(f"unsupported predictor {predictor}")


def ascii85_decode(data: bytes, params: dict | None) -> bytes:
    text = data.strip()
    if text.startswith(b"<~"):
        text = text[2:]
    if text.endswith(b"~>"):
        text = text[:-2]
    try:
        return base64.a85decode(text, adobe=False, ignorechars=b" \t\n\r\x0c\x00")
    except ValueError as exc:
        raise FilterError(f"ascii85: {exc}") from exc


def asciihex_decode(data: bytes, params: dict | None) -> bytes:
    text = data.split(b">")[0]
    digits = bytes(c for c in text if c not in b" \t\n\r\x0c\x00")
    if len(digits) % 2:
        digits += b"0"
    try:
        return bytes.fromhex(digits.decode("ascii"))
    except ValueError as exc:
        raise FilterError(f"asciihex: {exc}") from exc


def runlength_decode(data: bytes, params: dict | None) -> bytes:
    out = bytearray()
    pos = 0
    while pos < len(data):
        length = data[pos]
        pos += 1
        if length == 128:
            break
        if length < 128:
            out.extend(data[pos : pos + length + 1])
            pos += length + 1
        else:
            out.extend(data[pos : pos + 1] * (257 - length))
            pos += 1
    return bytes(out)


# DCTDecode/JPXDecode stay encoded; PIL opens them directly.
PASSTHROUGH = {"DCTDecode", "DCT", "JPXDecode"}

_DECODERS = {
    "FlateDecode": flate_decode,
    "Fl": flate_decode,
    "ASCII85Decode": ascii85_decode,
    "A85": ascii85_decode,
    "ASCIIHexDecode": asciihex_decode,
    "AHx": asciihex_decode,
    "RunLengthDecode": runlength_decode,
    "RL": runlength_decode,
}


def decode_stream(stream_dict: dict, raw: bytes, resolve) -> tuple[bytes, list[str]]:
    """Apply the stream's filter chain.

    Returns (data, remaining_filters): remaining is non-empty when the
    chain ends in a passthrough image codec like DCTDecode.
    """
    filters = resolve(stream_dict.get("Filter"))
    if filters is None:
        return raw, []
    if not isinstance(filters, list):
        filters = [filters]
    params_list = resolve(stream_dict.get("DecodeParms"))
    if params_list is None:
        params_list = [None] * len(filters)
    elif not isinstance(params_list, list):
        params_list = [params_list]
    while len(params_list) < len(filters):
        params_list.append(None)

    data = raw
    for i, name in enumerate(filters):
        name = str(resolve(name))
        if name in PASSTHROUGH:
            return data, [str(resolve(f)) for f in filters[i:]]
        decoder = _DECODERS.get(name)
        if decoder is None:
            raise FilterError(f"unsupported stream filter {name!r}")
        params = resolve(params_list[i])
        data = decoder(data, params if isinstance(params, dict) else None)
    return data, []

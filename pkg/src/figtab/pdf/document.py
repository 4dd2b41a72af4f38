"""PDF document structure: cross-reference parsing, object resolution,
and the page tree.

Handles classic xref tables (with /Prev chains and hybrid /XRefStm),
cross-reference streams, and objects packed into object streams. When
the xref machinery is broken, falls back to scanning the whole file for
``N G obj`` headers, which recovers most damaged files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Optional

from .filters import FilterError, decode_stream
from .lexer import (
    Keyword,
    Name,
    PdfSyntaxError,
    Ref,
    parse_dict,
    parse_object,
    skip_whitespace,
)


class MalformedPdf(ValueError):
    pass


class EncryptedPdf(ValueError):
    pass


@dataclass
class StreamObject:
    dict: dict
    raw: bytes  # still encoded

    def decoded(self, resolve) -> bytes:
        data, remaining = decode_stream(self.dict, self.raw, resolve)
        if remaining:
            raise FilterError(f"stream still encoded with {remaining}")
        return data


@dataclass
class Page:
    index: int
    mediabox: tuple[float, float, float, float]
    resources: dict
    contents: bytes
    rotate: int = 0

    @property
    def width(self) -> float:
        return self.mediabox[2] - self.mediabox[0]

    @property
    def height(self) -> float:
        return self.mediabox[3] - self.mediabox[1]


_OBJ_HEADER = re.compile(rb"(\d+)\s+(\d+)\s+obj\b")


class PdfDocument:
    """Parsed document handle. Immutable after construction; reading
    pages concurrently is safe."""

    def __init__(self, data: bytes) -> None:
        self.data = data
        self._offsets: dict[int, int] = {}  # object number -> byte offset
        self._in_objstm: dict[int, tuple[int, int]] = {}  # num -> (stream num, idx)
        self._cache: dict[int, Any] = {}
        self._objstm_cache: dict[int, list] = {}
        self.trailer: dict = {}

        if not data.lstrip()[:5].startswith(b"%PDF-"):
            raise MalformedPdf("missing %PDF header")
        try:
            self._load_xref()
        except (PdfSyntaxError, MalformedPdf, ValueError, KeyError):
            self._offsets.clear()
            self._in_objstm.clear()
            self._rebuild_by_scan()
        if not self.trailer:
            self._recover_trailer()
        if "Encrypt" in self.trailer:
            raise EncryptedPdf("document is encrypted")
        self._pages = self._collect_pages()

    # -- xref machinery -------------------------------------------------

    def _load_xref(self) -> None:
        anchor = self.data.rfind(b"startxref")
        if anchor == -1:
            raise MalformedPdf("no startxref")
        pos = skip_whitespace(self.data, anchor + len(b"startxref"))
        offset, _ = parse_object(self.data, pos)
        seen: set[int] = set()
        while isinstance(offset, int) and offset not in seen and 0 <= offset < len(self.data):
            seen.add(offset)
            offset = self._load_xref_section(offset)

    def _load_xref_section(self, offset: int) -> Optional[int]:
        pos = skip_whitespace(self.data, offset)
        if self.data[pos : pos + 4] == b"xref":
            trailer = self._parse_xref_table(pos + 4)
        else:
            trailer = self._parse_xref_stream(pos)
        if not self.trailer:
            self.trailer = dict(trailer)
        else:
            for key, value in trailer.items():
                self.trailer.setdefault(key, value)
        if "XRefStm" in trailer:  # hybrid file: also read the stream section
            try:
                self._parse_xref_stream(int(trailer["XRefStm"]))
            except (PdfSyntaxError, ValueError):
                pass
        prev = trailer.get("Prev")
        return int(prev) if isinstance(prev, (int, float)) else None

    def _parse_xref_table(self, pos: int) -> dict:
        data = self.data
        while True:
            pos = skip_whitespace(data, pos)
            if data[pos : pos + 7] == b"trailer":
                pos = skip_whitespace(data, pos + 7)
                trailer, _ = parse_dict(data, pos)
                return trailer
            start, pos = parse_object(data, pos)
            count, pos = parse_object(data, pos)
            if not isinstance(start, int) or not isinstance(count, int):
                raise MalformedPdf("bad xref subsection header")
            pos = skip_whitespace(data, pos)
            for i in range(count):
                entry = data[pos : pos + 20]
                if len(entry) < 18:
                    raise MalformedPdf("truncated xref entry")
                kind = entry[17:18]
                num = start + i
                if kind == b"n" and num not in self._offsets and num not in self._in_objstm:
                    self._offsets[num] = int(entry[0:10])
                pos += 20
                # tolerate 19-byte entries (single-byte EOL)
                if data[pos - 1 : pos] not in b"\r\n \x00":
                    pos -= 1
                    pos = skip_whitespace(data, pos)

    def _parse_xref_stream(self, offset: int) -> dict:
        obj = self._parse_object_at(offset, allow_stream=True)
        if not isinstance(obj, StreamObject):
            raise MalformedPdf("xref stream expected")
        info = obj.dict
        data = obj.decoded(self.resolve)
        widths = [int(w) for w in info["W"]]
        size = int(self.resolve(info["Size"]))
        index = info.get("Index", [0, size])
        index = [int(self.resolve(v)) for v in index]
        row_len = sum(widths)

        pos = 0
        for pair in range(0, len(index), 2):
            start, count = index[pair], index[pair + 1]
            for i in range(count):
                if pos + row_len > len(data):
                    break
                fields = []
                for w in widths:
                    fields.append(int.from_bytes(data[pos : pos + w], "big") if w else None)
                    pos += w
                kind = fields[0] if widths[0] else 1
                num = start + i
                if num in self._offsets or num in self._in_objstm:
                    continue
                if kind == 1:
                    self._offsets[num] = fields[1]
                elif kind == 2:
                    self._in_objstm[num] = (fields[1], fields[2] or 0)
        return info

    def _rebuild_by_scan(self) -> None:
        # later definitions win: incremental updates append to the file
        for match in _OBJ_HEADER.finditer(self.data):
            self._offsets[int(match.group(1))] = match.start()
        # expand object streams found during the scan
        for num, offset in list(self._offsets.items()):
            try:
                obj = self._parse_object_at(offset, allow_stream=True)
            except (PdfSyntaxError, ValueError):
                continue
            if isinstance(obj, StreamObject) and obj.dict.get("Type") == Name("ObjStm"):
                try:
                    self._index_objstm(num, obj)
                except (PdfSyntaxError, FilterError, ValueError):
                    continue
        self._scan_trailers()

    def _scan_trailers(self) -> None:
        """Recover trailer keys (Root, Encrypt) when the xref is unusable."""
        pos = len(self.data)
        while True:
            pos = self.data.rfind(b"trailer", 0, pos)
            if pos == -1:
                break
            try:
                start = skip_whitespace(self.data, pos + len(b"trailer"))
                trailer, _ = parse_dict(self.data, start)
            except (PdfSyntaxError, ValueError):
                continue
            for key, value in trailer.items():
                self.trailer.setdefault(key, value)
        # xref-stream files keep these keys in the stream dict instead
        for offset in self._offsets.values():
            try:
                obj = self._parse_object_at(offset)
            except (PdfSyntaxError, ValueError):
                continue
            if isinstance(obj, StreamObject) and obj.dict.get("Type") == Name("XRef"):
                for key, value in obj.dict.items():
                    self.trailer.setdefault(key, value)

    def _index_objstm(self, stream_num: int, obj: StreamObject) -> None:
        count = int(self.resolve(obj.dict["N"]))
        data = obj.decoded(self.resolve)
        pos = 0
        for i in range(count):
            num, pos = parse_object(data, pos)
            _, pos = parse_object(data, pos)
            if num not in self._offsets:
                self._in_objstm[int(num)] = (stream_num, i)

    def _recover_trailer(self) -> None:
        for num in sorted(self._offsets):
            try:
                obj = self.get_object(num)
            except (PdfSyntaxError, ValueError):
                continue
            if isinstance(obj, dict) and obj.get("Type") == Name("Catalog"):
                self.trailer = {"Root": Ref(num, 0)}
                return
        raise MalformedPdf("no document catalog found")

    # -- object access ---------------------------------------------------

    def _parse_object_at(self, offset: int, allow_stream: bool = True):
        data = self.data
        pos = skip_whitespace(data, offset)
        match = _OBJ_HEADER.match(data, pos)
        if not match:
            raise PdfSyntaxError(f"no object header at {offset}")
        pos = match.end()
        value, pos = parse_object(data, pos)
        pos = skip_whitespace(data, pos)
        if allow_stream and isinstance(value, dict) and data[pos : pos + 6] == b"stream":
            pos += 6
            if data[pos : pos + 2] == b"\r\n":
                pos += 2
            elif data[pos : pos + 1] in (b"\n", b"\r"):
                pos += 1
            length = self.resolve(value.get("Length"))
            raw = None
            if isinstance(length, (int, float)):
                end = pos + int(length)
                tail = data[end : end + 20].lstrip()
                if tail.startswith(b"endstream"):
                    raw = data[pos:end]
            if raw is None:  # unreliable /Length: locate endstream directly
                end = data.find(b"endstream", pos)
                if end == -1:
                    raise PdfSyntaxError("unterminated stream")
                raw = data[pos:end].rstrip(b"\r\n")
            return StreamObject(value, raw)
        return value

    def get_object(self, num: int) -> Any:
        if num in self._cache:
            return self._cache[num]
        value: Any = None
        if num in self._offsets:
            value = self._parse_object_at(self._offsets[num])
        elif num in self._in_objstm:
            stream_num, idx = self._in_objstm[num]
            value = self._objstm_item(stream_num, idx)
        self._cache[num] = value
        return value

    def _objstm_item(self, stream_num: int, idx: int) -> Any:
        if stream_num not in self._objstm_cache:
            obj = self.get_object(stream_num)
            if not isinstance(obj, StreamObject):
                raise MalformedPdf(f"object stream {stream_num} missing")
            count = int(self.resolve(obj.dict["N"]))
            first = int(self.resolve(obj.dict["First"]))
            data = obj.decoded(self.resolve)
            pairs = []
            pos = 0
            for _ in range(count):
                onum, pos = parse_object(data, pos)
                ooff, pos = parse_object(data, pos)
                pairs.append((int(onum), int(ooff)))
            items = []
            for _, ooff in pairs:
                value, _ = parse_object(data, first + ooff)
                items.append(value)
            self._objstm_cache[stream_num] = items
        items = self._objstm_cache[stream_num]
        if idx >= len(items):
            raise MalformedPdf("object stream index out of range")
        return items[idx]

    def resolve(self, value: Any, depth: int = 0) -> Any:
        while isinstance(value, Ref):
            if depth > 32:
                raise MalformedPdf("reference loop")
            value = self.get_object(value.num)
            depth += 1
        return value

    # -- page tree --------------------------------------------------------

    def _collect_pages(self) -> list[Page]:
        root = self.resolve(self.trailer.get("Root"))
        if not isinstance(root, dict):
            raise MalformedPdf("missing document catalog")
        pages_node = self.resolve(root.get("Pages"))
        if not isinstance(pages_node, dict):
            raise MalformedPdf("missing page tree")

        collected: list[Page] = []

        def walk(node: dict, inherited: dict, depth: int) -> None:
            if depth > 64:
                raise MalformedPdf("page tree too deep")
            attrs = dict(inherited)
            for key in ("MediaBox", "Resources", "Rotate"):
                if key in node:
                    attrs[key] = node[key]
            node_type = str(self.resolve(node.get("Type", "")))
            kids = self.resolve(node.get("Kids"))
            if node_type == "Pages" or (kids is not None and node_type != "Page"):
                for kid in kids or []:
                    kid_node = self.resolve(kid)
                    if isinstance(kid_node, dict):
                        walk(kid_node, attrs, depth + 1)
                return
            mediabox = [float(self.resolve(v)) for v in self.resolve(
                attrs.get("MediaBox", [0, 0, 612, 792])
            )]
            resources = self.resolve(attrs.get("Resources")) or {}
            rotate = int(self.resolve(attrs.get("Rotate", 0)) or 0)
            collected.append(
                Page(
                    index=len(collected),
                    mediabox=(mediabox[0], mediabox[1], mediabox[2], mediabox[3]),
                    resources=resources if isinstance(resources, dict) else {},
                    contents=self._page_contents(node),
                    rotate=rotate % 360,
                )
            )

        walk(pages_node, {}, 0)
        return collected

    def _page_contents(self, node: dict) -> bytes:
        contents = self.resolve(node.get("Contents"))
        if contents is None:
            return b""
        if not isinstance(contents, list):
            contents = [contents]
        chunks = []
        for item in contents:
            obj = self.resolve(item)
            if isinstance(obj, StreamObject):
                try:
                    chunks.append(obj.decoded(self.resolve))
                except FilterError as exc:
                    raise MalformedPdf(f"bad content stream: {exc}") from exc
        return b"\n".join(chunks)

    @property
    def pages(self) -> list[Page]:
        return self._pages

    def __len__(self) -> int:
        return len(self._pages)


def open_document(data: bytes) -> PdfDocument:
    try:
        return PdfDocument(data)
    except (EncryptedPdf, MalformedPdf):
        raise
    except (PdfSyntaxError, FilterError, ValueError, KeyError, IndexError) as exc:
        raise MalformedPdf(f"cannot parse PDF: {exc}") from exc

"""Content-stream interpreter.

Walks a page's operators and produces drawing elements (text spans,
image placements, painted paths) with bounds in PDF user space (origin
bottom left). The same element list feeds both layout analysis and the
rasterizer, so paths keep their flattened outlines and colors, and
images keep their stream handles.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .document import PdfDocument, StreamObject
from .fontmetrics import (
    base_font_name,
    builtin_char_width,
    builtin_vertical_metrics,
)
from .lexer import Keyword, Name, PdfSyntaxError, parse_object, skip_whitespace

Matrix = tuple[float, float, float, float, float, float]
IDENTITY: Matrix = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)


def mat_multiply(m: Matrix, n: Matrix) -> Matrix:
    """Row-vector composition: apply m first, then n."""
    a1, b1, c1, d1, e1, f1 = m
    a2, b2, c2, d2, e2, f2 = n
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
        e1 * a2 + f1 * c2 + e2,
        e1 * b2 + f1 * d2 + f2,
    )


def mat_apply(m: Matrix, x: float, y: float) -> tuple[float, float]:
    a, b, c, d, e, f = m
    return (a * x + c * y + e, b * x + d * y + f)


def _corner_bbox(m: Matrix, x0, y0, x1, y1) -> tuple[float, float, float, float]:
    pts = [mat_apply(m, x, y) for x, y in ((x0, y0), (x1, y0), (x0, y1), (x1, y1))]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return min(xs), min(ys), max(xs), max(ys)


@dataclass
class TextSpan:
    text: str
    bbox: tuple[float, float, float, float]
    origin: tuple[float, float]
    size: float  # effective (device) font size
    font: str
    color: tuple[float, float, float]


@dataclass
class ImagePlace:
    bbox: tuple[float, float, float, float]
    ctm: Matrix
    stream: Optional[StreamObject]
    resolve: Optional[object] = None  # resolver for the stream's dict


@dataclass
class PathDraw:
    subpaths: list[list[tuple[float, float]]]
    bbox: tuple[float, float, float, float]
    fill: bool
    stroke: bool
    fill_color: tuple[float, float, float]
    stroke_color: tuple[float, float, float]
    line_width: float
    evenodd: bool = False


Element = object  # TextSpan | ImagePlace | PathDraw


@dataclass
class _GState:
    ctm: Matrix = IDENTITY
    fill: tuple[float, float, float] = (0.0, 0.0, 0.0)
    stroke: tuple[float, float, float] = (0.0, 0.0, 0.0)
    line_width: float = 1.0
    fill_components: int = 1
    stroke_components: int = 1
    clip: Optional[tuple[float, float, float, float]] = None
    # text parameters live in the graphics state and persist across BT/ET
    font: Optional["_Font"] = None
    size: float = 0.0
    char_spacing: float = 0.0
    word_spacing: float = 0.0
    hscale: float = 1.0
    leading: float = 0.0
    rise: float = 0.0

    def copy(self) -> "_GState":
        return _GState(
            self.ctm, self.fill, self.stroke, self.line_width,
            self.fill_components, self.stroke_components, self.clip,
            self.font, self.size, self.char_spacing, self.word_spacing,
            self.hscale, self.leading, self.rise,
        )


class _Font:
    def __init__(self, doc: PdfDocument, font_dict: dict) -> None:
        self.base = base_font_name(str(doc.resolve(font_dict.get("BaseFont", "")) or ""))
        self.widths: Optional[list[float]] = None
        self.first_char = int(doc.resolve(font_dict.get("FirstChar", 0)) or 0)
        widths = doc.resolve(font_dict.get("Widths"))
        if isinstance(widths, list):
            self.widths = [float(doc.resolve(w) or 0) for w in widths]
        self.ascent, self.descent = builtin_vertical_metrics(self.base)
        descriptor = doc.resolve(font_dict.get("FontDescriptor"))
        if isinstance(descriptor, dict):
            asc = doc.resolve(descriptor.get("Ascent"))
            desc = doc.resolve(descriptor.get("Descent"))
            if isinstance(asc, (int, float)) and asc:
                self.ascent = float(asc) / 1000.0
            if isinstance(desc, (int, float)) and desc:
                self.descent = float(desc) / 1000.0

    def char_width(self, code: int) -> float:
        if self.widths is not None:
            idx = code - self.first_char
            if 0 <= idx < len(self.widths) and self.widths[idx] > 0:
                return self.widths[idx] / 1000.0
        return builtin_char_width(self.base, code) / 1000.0


def _decode_text(raw: bytes) -> str:
    if raw[:2] in (b"\xfe\xff",):
        try:
            return raw.decode("utf-16-be", errors="replace")
        except UnicodeDecodeError:
            pass
    try:
        return raw.decode("cp1252")
    except UnicodeDecodeError:
        return raw.decode("latin-1", errors="replace")


class _TextObject:
    """Text matrices, reset by each BT."""

    def __init__(self) -> None:
        self.tm: Matrix = IDENTITY
        self.tlm: Matrix = IDENTITY


_INLINE_END = re.compile(rb"[\x00\t\n\x0c\r ]EI(?=[\x00\t\n\x0c\r ()<>\[\]{}/%]|$)")


class ContentInterpreter:
    """Executes one page's content; collect() returns paint-ordered elements."""

    def __init__(self, doc: PdfDocument, max_form_depth: int = 12) -> None:
        self.doc = doc
        self.max_form_depth = max_form_depth

    def collect(self, content: bytes, resources: dict) -> list[Element]:
        self.elements: list[Element] = []
        state = _GState()
        self._run(content, resources, state, depth=0)
        return self.elements

    # -- main loop --------------------------------------------------------

    def _run(self, content: bytes, resources: dict, state: _GState, depth: int) -> None:
        doc = self.doc
        stack: list = []
        gstack: list[_GState] = []
        text: Optional[_TextObject] = None
        path: list[list[tuple[float, float]]] = []
        current: list[tuple[float, float]] = []
        start_point: Optional[tuple[float, float]] = None
        clip_pending: Optional[str] = None
        fonts = doc.resolve(resources.get("Font")) or {}
        xobjects = doc.resolve(resources.get("XObject")) or {}

        pos = 0
        n = len(content)
        while pos < n:
            pos = skip_whitespace(content, pos)
            if pos >= n:
                break
            try:
                token, pos = parse_object(content, pos, allow_keyword=True)
            except PdfSyntaxError as exc:
                raise PdfSyntaxError(f"content stream: {exc}") from exc
            if not isinstance(token, Keyword):
                stack.append(token)
                continue

            op = str(token)

            # -- graphics state
            if op == "q":
                gstack.append(state.copy())
            elif op == "Q":
                if gstack:
                    state = gstack.pop()
            elif op == "cm":
                m = self._matrix(stack)
                state.ctm = mat_multiply(m, state.ctm)
            elif op == "w":
                if stack:
                    state.line_width = _num(stack[-1])
            elif op == "gs":
                pass  # ExtGState: nothing tracked affects bounds

            # -- color
            elif op == "g":
                state.fill = _gray(stack)
                state.fill_components = 1
            elif op == "G":
                state.stroke = _gray(stack)
                state.stroke_components = 1
            elif op == "rg":
                state.fill = _rgb(stack)
                state.fill_components = 3
            elif op == "RG":
                state.stroke = _rgb(stack)
                state.stroke_components = 3
            elif op == "k":
                state.fill = _cmyk(stack)
                state.fill_components = 4
            elif op == "K":
                state.stroke = _cmyk(stack)
                state.stroke_components = 4
            elif op in ("cs", "CS"):
                comps = _colorspace_components(doc, resources, stack[-1] if stack else None)
                if op == "cs":
                    state.fill_components = comps
                else:
                    state.stroke_components = comps
            elif op in ("sc", "scn", "SC", "SCN"):
                nums = [v for v in stack if isinstance(v, (int, float))]
                color = _components_to_rgb(nums)
                if op.islower():
                    state.fill = color
                else:
                    state.stroke = color

            # -- path construction
            elif op == "m":
                if current:
                    path.append(current)
                x, y = _num(stack[-2]), _num(stack[-1])
                current = [mat_apply(state.ctm, x, y)]
                start_point = current[0]
            elif op == "l":
                x, y = _num(stack[-2]), _num(stack[-1])
                current.append(mat_apply(state.ctm, x, y))
            elif op in ("c", "v", "y"):
                current.extend(self._bezier(stack, op, current, state.ctm))
            elif op == "h":
                if current and start_point:
                    current.append(start_point)
            elif op == "re":
                if current:
                    path.append(current)
                    current = []
                x, y, w, h = (_num(v) for v in stack[-4:])
                quad = [
                    mat_apply(state.ctm, x, y),
                    mat_apply(state.ctm, x + w, y),
                    mat_apply(state.ctm, x + w, y + h),
                    mat_apply(state.ctm, x, y + h),
                ]
                quad.append(quad[0])
                path.append(quad)

            # -- path painting
            elif op in ("f", "F", "f*", "b", "b*", "B", "B*", "S", "s", "n"):
                if current:
                    if op in ("b", "b*", "s") and start_point:
                        current.append(start_point)
                    path.append(current)
                    current = []
                if op != "n" and path:
                    fill = op in ("f", "F", "f*", "b", "b*", "B", "B*")
                    stroke = op in ("S", "s", "b", "b*", "B", "B*")
                    self._emit_path(path, state, fill, stroke, evenodd="*" in op)
                if clip_pending and path:
                    bbox = _path_bbox(path, 0.0)
                    state.clip = _intersect(state.clip, bbox)
                clip_pending = None
                path = []
                start_point = None
            elif op in ("W", "W*"):
                clip_pending = op

            # -- text
            elif op == "BT":
                text = _TextObject()
            elif op == "ET":
                text = None
            elif op == "Tf":
                name = str(stack[-2]) if len(stack) >= 2 else ""
                state.size = _num(stack[-1]) if stack else 0.0
                font_dict = doc.resolve(fonts.get(name))
                state.font = _Font(doc, font_dict) if isinstance(font_dict, dict) else None
            elif op == "Td" and text is not None:
                tx, ty = _num(stack[-2]), _num(stack[-1])
                text.tlm = mat_multiply((1, 0, 0, 1, tx, ty), text.tlm)
                text.tm = text.tlm
            elif op == "TD" and text is not None:
                tx, ty = _num(stack[-2]), _num(stack[-1])
                state.leading = -ty
                text.tlm = mat_multiply((1, 0, 0, 1, tx, ty), text.tlm)
                text.tm = text.tlm
            elif op == "Tm" and text is not None:
                text.tlm = self._matrix(stack)
                text.tm = text.tlm
            elif op == "T*" and text is not None:
                text.tlm = mat_multiply((1, 0, 0, 1, 0, -state.leading), text.tlm)
                text.tm = text.tlm
            elif op == "TL":
                state.leading = _num(stack[-1])
            elif op == "Tc":
                state.char_spacing = _num(stack[-1])
            elif op == "Tw":
                state.word_spacing = _num(stack[-1])
            elif op == "Tz":
                state.hscale = _num(stack[-1]) / 100.0
            elif op == "Ts":
                state.rise = _num(stack[-1])
            elif op == "Tr":
                pass  # render mode: bounds are the same either way
            elif op == "Tj" and text is not None:
                if stack and isinstance(stack[-1], bytes):
                    self._show_text(stack[-1], text, state)
            elif op == "'" and text is not None:
                text.tlm = mat_multiply((1, 0, 0, 1, 0, -state.leading), text.tlm)
                text.tm = text.tlm
                if stack and isinstance(stack[-1], bytes):
                    self._show_text(stack[-1], text, state)
            elif op == '"' and text is not None:
                if len(stack) >= 3:
                    state.word_spacing = _num(stack[-3])
                    state.char_spacing = _num(stack[-2])
                text.tlm = mat_multiply((1, 0, 0, 1, 0, -state.leading), text.tlm)
                text.tm = text.tlm
                if stack and isinstance(stack[-1], bytes):
                    self._show_text(stack[-1], text, state)
            elif op == "TJ" and text is not None:
                if stack and isinstance(stack[-1], list):
                    for item in stack[-1]:
                        if isinstance(item, bytes):
                            self._show_text(item, text, state)
                        elif isinstance(item, (int, float)):
                            shift = -item / 1000.0 * state.size * state.hscale
                            text.tm = mat_multiply((1, 0, 0, 1, shift, 0), text.tm)

            # -- xobjects and inline images
            elif op == "Do":
                name = str(stack[-1]) if stack else ""
                self._do_xobject(name, xobjects, state, depth)
            elif op == "BI":
                pos = self._inline_image(content, pos, state)

            stack.clear()

    # -- helpers ----------------------------------------------------------

    def _matrix(self, stack: list) -> Matrix:
        vals = [(_num(v)) for v in stack[-6:]]
        while len(vals) < 6:
            vals.insert(0, 0.0)
        return (vals[0], vals[1], vals[2], vals[3], vals[4], vals[5])

    def _bezier(self, stack, op, current, ctm) -> list[tuple[float, float]]:
        if not current:
            return []
        p0 = current[-1]
        if op == "c":
            c1 = mat_apply(ctm, _num(stack[-6]), _num(stack[-5]))
            c2 = mat_apply(ctm, _num(stack[-4]), _num(stack[-3]))
            p3 = mat_apply(ctm, _num(stack[-2]), _num(stack[-1]))
        elif op == "v":
            c1 = p0
            c2 = mat_apply(ctm, _num(stack[-4]), _num(stack[-3]))
            p3 = mat_apply(ctm, _num(stack[-2]), _num(stack[-1]))
        else:  # y
            c1 = mat_apply(ctm, _num(stack[-4]), _num(stack[-3]))
            p3 = mat_apply(ctm, _num(stack[-2]), _num(stack[-1]))
            c2 = p3
        points = []
        steps = 12
        for i in range(1, steps + 1):
            t = i / steps
            mt = 1 - t
            x = (
                mt**3 * p0[0] + 3 * mt**2 * t * c1[0]
                + 3 * mt * t**2 * c2[0] + t**3 * p3[0]
            )
            y = (
                mt**3 * p0[1] + 3 * mt**2 * t * c1[1]
                + 3 * mt * t**2 * c2[1] + t**3 * p3[1]
            )
            points.append((x, y))
        return points

    def _emit_path(self, path, state: _GState, fill: bool, stroke: bool, evenodd: bool) -> None:
        expand = state.line_width / 2.0 if stroke else 0.0
        bbox = _path_bbox(path, expand)
        if state.clip is not None:
            bbox = _intersect_or_none(state.clip, bbox)
            if bbox is None:
                return
        self.elements.append(
            PathDraw(
                subpaths=[list(sp) for sp in path if len(sp) >= 2],
                bbox=bbox,
                fill=fill,
                stroke=stroke,
                fill_color=state.fill,
                stroke_color=state.stroke,
                line_width=max(state.line_width, 0.1),
                evenodd=evenodd,
            )
        )

    def _show_text(self, raw: bytes, text: _TextObject, state: _GState) -> None:
        if state.font is None and state.size == 0:
            return
        font = state.font
        width = 0.0
        for code in raw:
            w = font.char_width(code) if font else 0.5
            width += w * state.size + state.char_spacing
            if code == 32:
                width += state.word_spacing
        width *= state.hscale

        ascent = font.ascent if font else 0.72
        descent = font.descent if font else -0.21
        combined = mat_multiply(text.tm, state.ctm)
        bbox = _corner_bbox(
            combined,
            0.0,
            descent * state.size + state.rise,
            width,
            ascent * state.size + state.rise,
        )
        if state.clip is not None:
            clipped = _intersect_or_none(state.clip, bbox)
            if clipped is None:
                self._advance(text, width)
                return
        origin = mat_apply(combined, 0.0, state.rise)
        # effective vertical scale of the combined matrix
        scale = (combined[2] ** 2 + combined[3] ** 2) ** 0.5
        content = _decode_text(raw)
        if content.strip():
            self.elements.append(
                TextSpan(
                    text=content,
                    bbox=bbox,
                    origin=origin,
                    size=state.size * scale,
                    font=font.base if font else "",
                    color=state.fill,
                )
            )
        self._advance(text, width)

    def _advance(self, text: _TextObject, width: float) -> None:
        text.tm = mat_multiply((1, 0, 0, 1, width, 0), text.tm)

    def _do_xobject(self, name: str, xobjects: dict, state: _GState, depth: int) -> None:
        doc = self.doc
        obj = doc.resolve(xobjects.get(name))
        if not isinstance(obj, StreamObject):
            return
        subtype = str(doc.resolve(obj.dict.get("Subtype", "")) or "")
        if subtype == "Image":
            bbox = _corner_bbox(state.ctm, 0.0, 0.0, 1.0, 1.0)
            if state.clip is not None:
                clipped = _intersect_or_none(state.clip, bbox)
                if clipped is None:
                    return
                bbox = clipped
            self.elements.append(
                ImagePlace(bbox=bbox, ctm=state.ctm, stream=obj, resolve=doc.resolve)
            )
        elif subtype == "Form" and depth < self.max_form_depth:
            inner = state.copy()
            matrix = doc.resolve(obj.dict.get("Matrix"))
            if isinstance(matrix, list) and len(matrix) == 6:
                form_m = tuple(float(doc.resolve(v)) for v in matrix)
                inner.ctm = mat_multiply(form_m, inner.ctm)
            resources = doc.resolve(obj.dict.get("Resources")) or {}
            try:
                data = obj.decoded(doc.resolve)
            except Exception:
                return
            self._run(data, resources if isinstance(resources, dict) else {}, inner, depth + 1)

    def _inline_image(self, content: bytes, pos: int, state: _GState) -> int:
        # parse the parameter dict up to ID
        while pos < len(content):
            pos = skip_whitespace(content, pos)
            try:
                token, pos = parse_object(content, pos, allow_keyword=True)
            except PdfSyntaxError:
                break
            if isinstance(token, Keyword) and str(token) == "ID":
                pos += 1  # single whitespace after ID
                match = _INLINE_END.search(content, pos)
                end = match.end() if match else len(content)
                bbox = _corner_bbox(state.ctm, 0.0, 0.0, 1.0, 1.0)
                self.elements.append(
                    ImagePlace(bbox=bbox, ctm=state.ctm, stream=None)
                )
                return end
        return pos


def _num(value) -> float:
    return float(value) if isinstance(value, (int, float)) else 0.0


def _gray(stack) -> tuple[float, float, float]:
    v = _num(stack[-1]) if stack else 0.0
    return (v, v, v)


def _rgb(stack) -> tuple[float, float, float]:
    if len(stack) < 3:
        return (0.0, 0.0, 0.0)
    return (_num(stack[-3]), _num(stack[-2]), _num(stack[-1]))


def _cmyk(stack) -> tuple[float, float, float]:
    if len(stack) < 4:
        return (0.0, 0.0, 0.0)
    c, m, y, k = (_num(v) for v in stack[-4:])
    return (
        max(0.0, 1.0 - min(1.0, c + k)),
        max(0.0, 1.0 - min(1.0, m + k)),
        max(0.0, 1.0 - min(1.0, y + k)),
    )


def _components_to_rgb(nums: list) -> tuple[float, float, float]:
    if len(nums) >= 4:
        return _cmyk(nums)
    if len(nums) == 3:
        return _rgb(nums)
    if len(nums) == 1:
        return _gray(nums)
    return (0.0, 0.0, 0.0)


def _colorspace_components(doc, resources, name) -> int:
    mapping = {"DeviceGray": 1, "DeviceRGB": 3, "DeviceCMYK": 4, "G": 1, "RGB": 3, "CMYK": 4}
    return mapping.get(str(name), 3)


def _path_bbox(path, expand: float) -> tuple[float, float, float, float]:
    xs = [p[0] for sp in path for p in sp]
    ys = [p[1] for sp in path for p in sp]
    if not xs:
        return (0.0, 0.0, 0.0, 0.0)
    return (min(xs) - expand, min(ys) - expand, max(xs) + expand, max(ys) + expand)


def _intersect(clip, bbox):
    if clip is None:
        return bbox
    return (
        max(clip[0], bbox[0]),
        max(clip[1], bbox[1]),
        min(clip[2], bbox[2]),
        min(clip[3], bbox[3]),
    )


def _intersect_or_none(clip, bbox):
    x0 = max(clip[0], bbox[0])
    y0 = max(clip[1], bbox[1])
    x1 = min(clip[2], bbox[2])
    y1 = min(clip[3], bbox[3])
    if x0 >= x1 or y0 >= y1:
        return None
    return (x0, y0, x1, y1)

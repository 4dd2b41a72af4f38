"""Rasterize a page region to an RGB image.

This is a utility renderer, not a full PDF imaging model: filled and
stroked paths, embedded raster images (Flate/DCT, gray/RGB/CMYK/indexed)
and text drawn with a bundled sans font. That covers what figure crops
need; exotic content degrades to placeholders rather than failing the
whole region.
"""

from __future__ import annotations

import io
from functools import lru_cache
from typing import Optional

from PIL import Image, ImageDraw, ImageFont

from .content import ContentInterpreter, ImagePlace, PathDraw, TextSpan
from .document import PdfDocument, StreamObject
from .filters import FilterError, decode_stream
from .model import Rect, pixel_size


class RenderFailure(ValueError):
    pass


@lru_cache(maxsize=32)
def _font_at(size: int) -> ImageFont.FreeTypeFont | ImageFont.ImageFont:
    try:
        import matplotlib

        path = matplotlib.get_data_path() + "/fonts/ttf/DejaVuSans.ttf"
        return ImageFont.truetype(path, size=max(size, 1))
    except Exception:
        return ImageFont.load_default()


def _to_rgb255(color: tuple[float, float, float]) -> tuple[int, int, int]:
    return tuple(min(255, max(0, round(c * 255))) for c in color)


def decode_image(stream: StreamObject, resolve) -> Optional[Image.Image]:
    """Decode an image XObject to PIL, or None when unsupported."""
    info = stream.dict
    try:
        data, remaining = decode_stream(info, stream.raw, resolve)
    except FilterError:
        return None
    if remaining:  # DCT/JPX: let PIL read the codestream
        try:
            return Image.open(io.BytesIO(data)).convert("RGB")
        except Exception:
            return None

    width = int(resolve(info.get("Width", 0)) or 0)
    height = int(resolve(info.get("Height", 0)) or 0)
    bpc = int(resolve(info.get("BitsPerComponent", 8)) or 8)
    colorspace = resolve(info.get("ColorSpace"))
    if width <= 0 or height <= 0:
        return None

    if isinstance(colorspace, list) and colorspace and str(resolve(colorspace[0])) == "Indexed":
        return _decode_indexed(colorspace, data, width, height, bpc, resolve)

    name = str(colorspace) if colorspace is not None else "DeviceGray"
    try:
        if name in ("DeviceRGB", "CalRGB"):
            return Image.frombytes("RGB", (width, height), data[: width * height * 3])
        if name in ("DeviceGray", "CalGray"):
            if bpc == 1:
                row = (width + 7) // 8
                img = Image.frombytes("1", (width, height), data[: row * height])
                return img.convert("RGB")
            return Image.frombytes("L", (width, height), data[: width * height]).convert("RGB")
        if name == "DeviceCMYK":
            img = Image.frombytes("CMYK", (width, height), data[: width * height * 4])
            return img.convert("RGB")
    except ValueError:
        return None
    return None


def _decode_indexed(colorspace, data, width, height, bpc, resolve) -> Optional[Image.Image]:
    try:
        base = str(resolve(colorspace[1]))
        lookup = resolve(colorspace[3])
        if isinstance(lookup, StreamObject):
            table = lookup.decoded(resolve)
        else:
            table = bytes(lookup) if isinstance(lookup, bytes) else bytes(str(lookup), "latin-1")
        if base not in ("DeviceRGB", "CalRGB") or bpc != 8:
            return None
        img = Image.frombytes("P", (width, height), data[: width * height])
        img.putpalette(table[: 256 * 3])
        return img.convert("RGB")
    except Exception:
        return None


def render_region(
    document: PdfDocument,
    region: Rect,
    page_index: int,
    dpi: int = 144,
    elements: Optional[list] = None,
) -> Image.Image:
    """Render the clipped page content of ``region`` (top-left coords)."""
    if not 0 <= page_index < len(document.pages):
        raise RenderFailure(f"page {page_index} out of range")
    page = document.pages[page_index]
    if elements is None:
        try:
            elements = ContentInterpreter(document).collect(page.contents, page.resources)
        except Exception as exc:
            raise RenderFailure(f"corrupt content stream: {exc}") from exc

    width_px, height_px = pixel_size(region, dpi)
    scale = dpi / 72.0
    page_h = page.height
    canvas = Image.new("RGB", (width_px, height_px), (255, 255, 255))
    draw = ImageDraw.Draw(canvas)

    def to_px(x: float, y_pdf: float) -> tuple[float, float]:
        return ((x - region.x0) * scale, ((page_h - y_pdf) - region.y0) * scale)

    for element in elements:
        if isinstance(element, PathDraw):
            _draw_path(draw, element, to_px, scale)
        elif isinstance(element, ImagePlace):
            _draw_image(canvas, element, to_px)
        elif isinstance(element, TextSpan):
            _draw_text(draw, element, to_px, scale)
    return canvas


def _draw_path(draw: ImageDraw.ImageDraw, el: PathDraw, to_px, scale: float) -> None:
    for subpath in el.subpaths:
        points = [to_px(x, y) for x, y in subpath]
        if el.fill and len(points) >= 3:
            draw.polygon(points, fill=_to_rgb255(el.fill_color))
        if el.stroke and len(points) >= 2:
            draw.line(
                points,
                fill=_to_rgb255(el.stroke_color),
                width=max(1, round(el.line_width * scale)),
            )


def _draw_image(canvas: Image.Image, el: ImagePlace, to_px) -> None:
    x0, y0, x1, y1 = el.bbox
    left, top = to_px(x0, y1)  # top of the box is the higher pdf y
    right, bottom = to_px(x1, y0)
    w = max(1, round(right - left))
    h = max(1, round(bottom - top))
    if el.stream is not None and el.resolve is not None:
        img = decode_image(el.stream, el.resolve)
    else:
        img = None
    if img is None:
        img = Image.new("RGB", (8, 8), (210, 210, 210))  # unsupported image
    img = img.resize((w, h), Image.Resampling.BILINEAR)
    a, b, c, d, _, _ = el.ctm
    if d < 0:
        img = img.transpose(Image.Transpose.FLIP_TOP_BOTTOM)
    if a < 0:
        img = img.transpose(Image.Transpose.FLIP_LEFT_RIGHT)
    canvas.paste(img, (round(left), round(top)))


def _draw_text(draw: ImageDraw.ImageDraw, el: TextSpan, to_px, scale: float) -> None:
    px_size = max(1, round(el.size * scale))
    font = _font_at(px_size)
    x, baseline_y = to_px(*el.origin)
    try:
        ascent, _ = font.getmetrics()
    except AttributeError:
        ascent = px_size
    draw.text((x, baseline_y - ascent), el.text, fill=_to_rgb255(el.color), font=font)

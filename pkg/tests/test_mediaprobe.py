import io

import pytest
from PIL import Image

from odl.engine import jpeg_dimensions, png_dimensions, probe_dimensions


def _encoded(fmt: str, width: int, height: int, **save_args) -> bytes:
    buf = io.BytesIO()
    Image.new("RGB", (width, height), (10, 20, 30)).save(buf, fmt, **save_args)
    return buf.getvalue()


@pytest.mark.parametrize("size", [(16, 16), (1, 1), (353, 500), (1024, 3)])
def test_png_ihdr(size):
    data = _encoded("PNG", *size)
    assert png_dimensions(data) == size
    assert probe_dimensions(data) == size


@pytest.mark.parametrize("size", [(16, 16), (64, 48), (353, 500)])
def test_jpeg_sof0(size):
    data = _encoded("JPEG", *size, quality=85)
    assert jpeg_dimensions(data) == size
    assert probe_dimensions(data) == size


def test_jpeg_progressive_sof2():
    data = _encoded("JPEG", 40, 30, progressive=True, quality=70)
    assert jpeg_dimensions(data) == (40, 30)


def test_jpeg_with_exif_style_app_segments():
    # APP segments before SOF must be skipped by length.
    data = _encoded("JPEG", 20, 10, quality=85, exif=b"Exif\x00\x00II*\x00\x08\x00\x00\x00")
    assert jpeg_dimensions(data) == (20, 10)


@pytest.mark.parametrize(
    "payload",
    [b"", b"\x89PNG", b"\xff\xd8", b"GIF89a...", b"\x89PNG\r\n\x1a\n" + b"\x00" * 16, b"plain text"],
)
def test_unrecognized_payloads(payload):
    assert probe_dimensions(payload) is None


def test_truncated_jpeg_returns_none():
    data = _encoded("JPEG", 64, 48, quality=85)
    sof = data.find(b"\xff\xc0")
    assert sof > 0
    assert jpeg_dimensions(data[: sof + 3]) is None

"""Image dimensions from file headers, without decoding pixel data.

PNG: width/height are the first 8 bytes of the IHDR chunk payload.
JPEG: width/height come from the first SOF0/SOF1/SOF2 frame header.
"""

from __future__ import annotations

import struct

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_JPEG_SOF_MARKERS = (0xC0, 0xC1, 0xC2)
# Standalone markers that carry no length word.
_JPEG_BARE_MARKERS = frozenset({0x01, *range(0xD0, 0xD8), 0xD8, 0xD9})


def png_dimensions(data: bytes) -> tuple[int, int] | None:
    if len(data) < 24 or not data.startswith(PNG_MAGIC):
        return None
    length, chunk_type = struct.unpack(">I4s", data[8:16])
    if chunk_type != b"IHDR" or length < 8:
        return None
    width, height = struct.unpack(">II", data[16:24])
    if width <= 0 or height <= 0:
        return None
    return width, height


def jpeg_dimensions(data: bytes) -> tuple[int, int] | None:
    if len(data) < 4 or data[0:2] != b"\xff\xd8":
        return None
    pos = 2
    while pos + 4 <= len(data):
        if data[pos] != 0xFF:
            return None
        marker = data[pos + 1]
        if marker == 0xFF:  # fill byte
            pos += 1
            continue
        if marker in _JPEG_BARE_MARKERS:
            pos += 2
            continue
        if pos + 4 > len(data):
            return None
        (length,) = struct.unpack(">H", data[pos + 2 : pos + 4])
        if length < 2:
            return None
        if marker in _JPEG_SOF_MARKERS:
            if pos + 9 > len(data):
                return None
            _, height, width = struct.unpack(">BHH", data[pos + 4 : pos + 9])
            if width <= 0 or height <= 0:
                return None
            return width, height
        if marker == 0xDA:  # entropy-coded data follows; no frame header seen
            return None
        pos += 2 + length
    return None


def probe_dimensions(data: bytes) -> tuple[int, int] | None:
    """(width, height) of a PNG or JPEG payload, or None when unrecognized."""
    if data.startswith(PNG_MAGIC):
        return png_dimensions(data)
    if data.startswith(b"\xff\xd8"):
        return jpeg_dimensions(data)
    return None

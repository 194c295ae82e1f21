"""Frame file I/O: binary PPM (P6) always, PNG when Pillow is importable."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from dsrsim.frame import Frame

FRAME_SUFFIXES = (".ppm", ".png")


class FrameFormatError(ValueError):
    """Raised when a frame file is missing, truncated or in an unsupported format."""


def _ppm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FrameFormatError("truncated PPM header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def decode_ppm(data: bytes) -> Frame:
    tokens, offset = _ppm_tokens(data, 4)
    magic, w, h, maxval = tokens
    if magic != b"P6":
        raise FrameFormatError(f"unsupported PPM magic {magic!r}, expected P6")
    try:
        width, height, maxv = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise FrameFormatError(f"malformed PPM header: {exc}") from None
    if maxv != 255:
        raise FrameFormatError(f"only 8-bit PPM supported, maxval={maxv}")
    if width <= 0 or height <= 0:
        raise FrameFormatError(f"bad PPM dimensions {width}x{height}")
    need = width * height * 3
    raster = data[offset : offset + need]
    if len(raster) != need:
        raise FrameFormatError(f"PPM raster truncated: {len(raster)} of {need} bytes")
    rgb = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)
    return Frame.from_rgb(rgb)


def encode_ppm(frame: Frame) -> bytes:
    header = f"P6\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(frame.pixels[..., :3]).tobytes()


def encode_pgm(gray: np.ndarray) -> bytes:
    gray = np.ascontiguousarray(gray, dtype=np.uint8)
    h, w = gray.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + gray.tobytes()


def read_frame(path) -> Frame:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FrameFormatError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        if path.suffix.lower() == ".png":
            return _read_png(path)
        return decode_ppm(data)
    except FrameFormatError as exc:
        raise FrameFormatError(f"{path}: {exc}") from None


def _read_png(path: Path) -> Frame:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            rgba = np.asarray(im.convert("RGBA"))
    except (UnidentifiedImageError, OSError) as exc:
        raise FrameFormatError(f"cannot decode PNG ({exc})") from None
    return Frame.from_rgb(rgba)


def write_frame(frame: Frame, path) -> Path:
    path = Path(path)
    if path.suffix.lower() == ".png":
        from PIL import Image

        Image.fromarray(np.ascontiguousarray(frame.pixels[..., :3]), "RGB").save(path)
    else:
        path.write_bytes(encode_ppm(frame))
    return path


def write_gray(gray: np.ndarray, path) -> Path:
    """Write a single-channel uint8 image as PGM, or PNG by suffix."""
    path = Path(path)
    if path.suffix.lower() == ".png":
        from PIL import Image

        Image.fromarray(np.ascontiguousarray(gray, dtype=np.uint8), "L").save(path)
    else:
        path.write_bytes(encode_pgm(gray))
    return path


_NUMBER = re.compile(r"(\d+)")


def list_frames(directory) -> list[Path]:
    """Numbered frame files in a directory, ordered by their frame number."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FrameFormatError(f"{directory}: not a directory")
    found = []
    for p in directory.iterdir():
        if p.suffix.lower() in FRAME_SUFFIXES and p.is_file():
            m = _NUMBER.findall(p.stem)
            found.append((int(m[-1]) if m else -1, p.name, p))
    found.sort()
    return [p for _, _, p in found]


def read_sequence(directory) -> tuple[list[Frame], str]:
    paths = list_frames(directory)
    if not paths:
        raise FrameFormatError(f"{directory}: no .ppm or .png frames found")
    suffix = paths[0].suffix.lower()
    return [read_frame(p) for p in paths], suffix

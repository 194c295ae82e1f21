"""Bundled synthetic frame sequences used for calibration and acceptance runs."""

from __future__ import annotations

import numpy as np

from dsrsim.frame import Frame

MIXED_SIZE = (256, 256)
MIXED_FRAMES = 30


def constant_sequence(count: int = 10, width: int = 64, height: int = 64, rgb=(90, 140, 200)) -> list[Frame]:
    px = np.empty((height, width, 4), dtype=np.uint8)
    px[..., :3] = rgb
    px[..., 3] = 255
    frame = Frame(width, height, px)
    return [frame] * count


def checkerboard(width: int, height: int, cell: int = 1, lo: int = 0, hi: int = 255) -> np.ndarray:
    y, x = np.indices((height, width))
    on = ((x // cell) + (y // cell)) % 2 == 1
    return np.where(on, hi, lo).astype(np.uint8)


def checkerboard_sequence(count: int = 10, width: int = 64, height: int = 64) -> list[Frame]:
    """1-pixel checkerboard alternating 0 and 255 on all three channels."""
    g = checkerboard(width, height)
    frame = Frame.from_rgb(np.stack([g, g, g], axis=-1))
    return [frame] * count


def gradient_background(width: int, height: int) -> np.ndarray:
    y, x = np.indices((height, width), dtype=np.float64)
    r = 32 + 192 * x / max(width - 1, 1)
    g = 32 + 192 * y / max(height - 1, 1)
    b = 128 + 48 * (x - y) / max(width + height - 2, 1)
    return np.stack([r, g, b], axis=-1).round().astype(np.uint8)


def mixed_sequence(
    count: int = MIXED_FRAMES,
    width: int = MIXED_SIZE[0],
    height: int = MIXED_SIZE[1],
    sprite: int = 24,
    cell: int = 4,
    start=(40, 72),
    velocity=(2, 1),
) -> list[Frame]:
    """Smooth RGB gradient with a checkerboard sprite moving whole pixels each frame.

    The sprite's checker pattern is fixed to the sprite, so it translates with it.
    """
    bg = gradient_background(width, height)
    pattern = checkerboard(sprite, sprite, cell, 48, 208)
    frames = []
    for i in range(count):
        img = bg.copy()
        x0 = start[0] + velocity[0] * i
        y0 = start[1] + velocity[1] * i
        xs = slice(max(x0, 0), min(x0 + sprite, width))
        ys = slice(max(y0, 0), min(y0 + sprite, height))
        patch = pattern[ys.start - y0 : ys.stop - y0, xs.start - x0 : xs.stop - x0]
        img[ys, xs] = patch[..., None]
        frames.append(Frame.from_rgb(img))
    return frames

"""Frames, tile grids and luma extraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TILE_SIZE = 16
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class Color:
    r: int
    g: int
    b: int
    a: int = 255

    def __post_init__(self):
        for name in ("r", "g", "b", "a"):
            v = getattr(self, name)
            if not 0 <= v <= 255:
                raise ValueError(f"channel {name}={v} outside [0, 255]")

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b, self.a], dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class Frame:
    """An RGBA raster. ``pixels`` has shape (height, width, 4), dtype uint8."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"frame dimensions must be positive, got {self.width}x{self.height}")
        px = np.asarray(self.pixels)
        if px.shape != (self.height, self.width, 4):
            raise ValueError(
                f"pixel array shape {px.shape} does not match {self.height}x{self.width}x4"
            )
        px = px.astype(np.uint8, copy=True)
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @classmethod
    def filled(cls, width: int, height: int, color: Color) -> "Frame":
        px = np.broadcast_to(color.as_array(), (height, width, 4))
        return cls(width, height, px)

    @classmethod
    def from_rgb(cls, rgb: np.ndarray) -> "Frame":
        rgb = np.asarray(rgb)
        h, w = rgb.shape[:2]
        px = np.empty((h, w, 4), dtype=np.uint8)
        px[..., :3] = rgb[..., :3]
        px[..., 3] = rgb[..., 3] if rgb.shape[2] == 4 else 255
        return cls(w, h, px)

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def color_at(self, x: int, y: int) -> Color:
        return Color(*(int(c) for c in self.pixels[y, x]))


@dataclass(frozen=True)
class TileGrid:
    tile_size: int
    cols: int
    rows: int
    frame_width: int
    frame_height: int

    @property
    def tile_count(self) -> int:
        return self.cols * self.rows

    def origin(self, tile_id: int) -> tuple[int, int]:
        if not 0 <= tile_id < self.tile_count:
            raise IndexError(f"tile_id {tile_id} outside [0, {self.tile_count})")
        row, col = divmod(tile_id, self.cols)
        return col * self.tile_size, row * self.tile_size

    def origins(self):
        for tile_id in range(self.tile_count):
            yield (tile_id, *self.origin(tile_id))

    def matches(self, frame: Frame) -> bool:
        return frame.width == self.frame_width and frame.height == self.frame_height


@dataclass(frozen=True, eq=False)
class TileView:
    tile_id: int
    origin_x: int
    origin_y: int
    luma: np.ndarray


def make_grid(frame_width: int, frame_height: int, tile_size: int = TILE_SIZE) -> TileGrid:
    """Cover a frame with square tiles, rounding partial edge tiles up."""
    if frame_width <= 0 or frame_height <= 0 or tile_size <= 0:
        raise ValueError(
            f"grid arguments must be positive: {frame_width}, {frame_height}, {tile_size}"
        )
    cols = -(-frame_width // tile_size)
    rows = -(-frame_height // tile_size)
    return TileGrid(tile_size, cols, rows, frame_width, frame_height)


def luma(rgba: np.ndarray) -> np.ndarray:
    """Rec. 601 luma of an (..., 3|4) array, real valued in [0, 255].

    Written relative to green so that gray pixels map to exactly their level.
    """
    rgb = np.asarray(rgba, dtype=np.float64)
    wr, _, wb = LUMA_WEIGHTS
    g = rgb[..., 1]
    return g + wr * (rgb[..., 0] - g) + wb * (rgb[..., 2] - g)


def _check(frame: Frame, grid: TileGrid, tile_id: int) -> tuple[int, int]:
    if not grid.matches(frame):
        raise ValueError(
            f"frame {frame.width}x{frame.height} does not match grid "
            f"{grid.frame_width}x{grid.frame_height}"
        )
    return grid.origin(tile_id)


def tile_pixels(frame: Frame, grid: TileGrid, tile_id: int) -> np.ndarray:
    """RGBA window of one tile; out-of-frame pixels replicate the nearest edge pixel."""
    x0, y0 = _check(frame, grid, tile_id)
    ts = grid.tile_size
    ys = np.minimum(np.arange(y0, y0 + ts), frame.height - 1)
    xs = np.minimum(np.arange(x0, x0 + ts), frame.width - 1)
    return frame.pixels[np.ix_(ys, xs)]


def extract_tile(frame: Frame, grid: TileGrid, tile_id: int) -> TileView:
    x0, y0 = _check(frame, grid, tile_id)
    return TileView(tile_id, x0, y0, luma(tile_pixels(frame, grid, tile_id)))


def paste_tile(dest: np.ndarray, grid: TileGrid, tile_id: int, tile: np.ndarray) -> None:
    """Write a tile into a (H, W, 4) buffer, cropping the part outside the frame."""
    x0, y0 = grid.origin(tile_id)
    h = min(grid.tile_size, grid.frame_height - y0)
    w = min(grid.tile_size, grid.frame_width - x0)
    dest[y0 : y0 + h, x0 : x0 + w] = tile[:h, :w]

"""A minimal tile-based rasterizer that shades superfragments at the tile's sampling rate.

Coverage is tested at superfragment centers with edge functions and the
top-left fill rule. Attributes are interpolated affinely (no perspective).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from dsrsim.controller import (
    ControllerParams,
    SamplingRate,
    SamplingRateTable,
    update_table,
)
from dsrsim.fau import dct2d_rowcol, max_coefficient
from dsrsim.frame import TILE_SIZE, Color, Frame, TileGrid, luma, make_grid, paste_tile
from dsrsim.metrics import FrameReport, SequenceReport, aggregate, mse, psnr

BLACK = Color(0, 0, 0, 255)
CHECKER_DARK = 0.25


@dataclass(frozen=True)
class Vertex:
    x: float
    y: float
    z: float
    color: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    uv: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not 0.0 <= self.z <= 1.0:
            raise ValueError(f"vertex depth {self.z} outside [0, 1]")

    def moved(self, dx: float, dy: float) -> "Vertex":
        return Vertex(self.x + dx, self.y + dy, self.z, self.color, self.uv)


@dataclass(frozen=True)
class Shader:
    kind: str = "FLAT"
    cell_size: float = 8.0

    def __post_init__(self):
        if self.kind not in ("FLAT", "GOURAUD", "CHECKER"):
            raise ValueError(f"unknown shader kind {self.kind!r}")
        if self.kind == "CHECKER" and not self.cell_size > 0:
            raise ValueError("checker cell size must be positive")

    def __str__(self):
        return f"CHECKER:{self.cell_size:g}" if self.kind == "CHECKER" else self.kind


@dataclass(frozen=True)
class Triangle:
    v0: Vertex
    v1: Vertex
    v2: Vertex
    shader: Shader = Shader()

    @property
    def signed_area(self) -> float:
        return edge(self.v0.x, self.v0.y, self.v1.x, self.v1.y, self.v2.x, self.v2.y)

    def bounds(self) -> tuple[float, float, float, float]:
        xs = (self.v0.x, self.v1.x, self.v2.x)
        ys = (self.v0.y, self.v1.y, self.v2.y)
        return min(xs), min(ys), max(xs), max(ys)

    def moved(self, dx: float, dy: float) -> "Triangle":
        return Triangle(self.v0.moved(dx, dy), self.v1.moved(dx, dy), self.v2.moved(dx, dy), self.shader)


def edge(ax, ay, bx, by, px, py):
    """Edge function of directed edge a->b at p; positive inside a clockwise (y-down) triangle."""
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax)


def is_top_left(ax: float, ay: float, bx: float, by: float) -> bool:
    dx, dy = bx - ax, by - ay
    return (dy == 0 and dx > 0) or dy < 0


@dataclass
class Superfragment:
    block_x: int
    block_y: int
    n: int
    sample_x: float
    sample_y: float
    covered: bool
    weights: tuple[float, float, float] = (0.0, 0.0, 0.0)
    depth: float = 1.0
    color: tuple[float, float, float, float] | None = None


@dataclass
class Superquad:
    setup: "TriangleSetup"
    fragments: tuple[Superfragment, Superfragment, Superfragment, Superfragment]

    @property
    def triangle(self) -> Triangle:
        return self.setup.tri

    @property
    def coverage(self) -> tuple[bool, bool, bool, bool]:
        return tuple(f.covered for f in self.fragments)


@dataclass
class TileBuffers:
    size: int = TILE_SIZE
    depth: np.ndarray = None
    color: np.ndarray = None
    color_init_mask: np.ndarray = None

    def __post_init__(self):
        s = self.size
        if self.depth is None:
            self.depth = np.ones((s, s))
        if self.color is None:
            self.color = np.zeros((s, s, 4))
        if self.color_init_mask is None:
            self.color_init_mask = np.zeros((s, s), dtype=bool)


@dataclass
class Counters:
    shader_invocations: int = 0
    depth_tests: int = 0
    depth_ops: int = 0
    color_ops: int = 0
    superquads: int = 0
    tile_invocations: list[int] = field(default_factory=list)

    def merge(self, other: "Counters") -> "Counters":
        """Sum of two counter sets; per-tile invocations are concatenated in order."""
        return Counters(
            self.shader_invocations + other.shader_invocations,
            self.depth_tests + other.depth_tests,
            self.depth_ops + other.depth_ops,
            self.color_ops + other.color_ops,
            self.superquads + other.superquads,
            self.tile_invocations + other.tile_invocations,
        )


@dataclass(frozen=True)
class TriangleSetup:
    """Triangle vertices reordered to positive area, plus fill-rule flags per edge."""

    tri: Triangle
    verts: tuple[Vertex, Vertex, Vertex]
    area: float
    top_left: tuple[bool, bool, bool]


def setup_triangle(tri: Triangle) -> TriangleSetup | None:
    a, b, c = tri.v0, tri.v1, tri.v2
    area = tri.signed_area
    if area == 0 or not math.isfinite(area):
        return None
    if area < 0:
        b, c = c, b
        area = -area
    # weight i belongs to the edge opposite vertex i
    tl = (
        is_top_left(b.x, b.y, c.x, c.y),
        is_top_left(c.x, c.y, a.x, a.y),
        is_top_left(a.x, a.y, b.x, b.y),
    )
    return TriangleSetup(tri, (a, b, c), area, tl)


def _weights(s: TriangleSetup, px, py):
    a, b, c = s.verts
    w0 = edge(b.x, b.y, c.x, c.y, px, py)
    w1 = edge(c.x, c.y, a.x, a.y, px, py)
    w2 = edge(a.x, a.y, b.x, b.y, px, py)
    return w0, w1, w2


def _inside(s: TriangleSetup, w0, w1, w2):
    t0, t1, t2 = s.top_left
    return (
        ((w0 > 0) | ((w0 == 0) & t0))
        & ((w1 > 0) | ((w1 == 0) & t1))
        & ((w2 > 0) | ((w2 == 0) & t2))
    )


def rasterize_tile(
    triangles: Sequence[Triangle],
    origin_x: int,
    origin_y: int,
    rate: SamplingRate,
    tile_size: int = TILE_SIZE,
) -> Iterator[Superquad]:
    """Superquads for each triangle, in submission order, raster order within a triangle."""
    n = rate.n
    side = tile_size // n
    # superfragment centers in pixel coordinates, indexed [row, col]
    centers = np.arange(side) * n + n / 2.0
    sx = origin_x + centers[None, :].repeat(side, axis=0)
    sy = origin_y + centers[:, None].repeat(side, axis=1)
    for tri in triangles:
        s = setup_triangle(tri)
        if s is None:
            continue
        x0, y0, x1, y1 = tri.bounds()
        if x1 < origin_x or y1 < origin_y or x0 > origin_x + tile_size or y0 > origin_y + tile_size:
            continue
        w0, w1, w2 = _weights(s, sx, sy)
        inside = _inside(s, w0, w1, w2)
        if not inside.any():
            continue
        for qy in range(0, side, 2):
            for qx in range(0, side, 2):
                cells = ((qy, qx), (qy, qx + 1), (qy + 1, qx), (qy + 1, qx + 1))
                if not any(inside[r, c] for r, c in cells):
                    continue
                frags = tuple(
                    Superfragment(
                        block_x=c * n,
                        block_y=r * n,
                        n=n,
                        sample_x=float(sx[r, c]),
                        sample_y=float(sy[r, c]),
                        covered=bool(inside[r, c]),
                        weights=(float(w0[r, c]), float(w1[r, c]), float(w2[r, c])),
                    )
                    for r, c in cells
                )
                yield Superquad(s, frags)


def interpolate_depth(setup: TriangleSetup, weights) -> float:
    a, b, c = setup.verts
    w0, w1, w2 = weights
    return (w0 * a.z + w1 * b.z + w2 * c.z) / setup.area


def shade(setup: TriangleSetup, weights) -> tuple[float, float, float, float]:
    """Evaluate the triangle's shader at a sample with unnormalized barycentric weights."""
    kind = setup.tri.shader.kind
    if kind == "FLAT":
        return tuple(setup.tri.v0.color)
    a, b, c = setup.verts
    w0, w1, w2 = weights
    area = setup.area
    rgba = tuple((w0 * a.color[i] + w1 * b.color[i] + w2 * c.color[i]) / area for i in range(4))
    if kind == "GOURAUD":
        return rgba
    u = (w0 * a.uv[0] + w1 * b.uv[0] + w2 * c.uv[0]) / area
    v = (w0 * a.uv[1] + w1 * b.uv[1] + w2 * c.uv[1]) / area
    cell = setup.tri.shader.cell_size
    if (math.floor(u / cell) + math.floor(v / cell)) % 2:
        return (rgba[0] * CHECKER_DARK, rgba[1] * CHECKER_DARK, rgba[2] * CHECKER_DARK, rgba[3])
    return rgba


def depth_test_and_shade(
    quad: Superquad, buffers: TileBuffers, counters: Counters, blend: bool = False
) -> TileBuffers:
    """Depth test (strict less) and shade each covered superfragment of a superquad.

    One depth entry and one color entry, the block's top-left, stand for the
    whole N x N block.
    """
    setup = quad.setup
    counters.superquads += 1
    for frag in quad.fragments:
        if not frag.covered:
            continue
        frag.depth = interpolate_depth(setup, frag.weights)
        by, bx = frag.block_y, frag.block_x
        counters.depth_tests += 1
        if not frag.depth < buffers.depth[by, bx]:
            continue
        src = shade(setup, frag.weights)
        counters.shader_invocations += 1
        buffers.depth[by, bx] = frag.depth
        counters.depth_ops += 1
        if blend:
            dst = buffers.color[by, bx] if buffers.color_init_mask[by, bx] else None
            src = _over(src, dst)
            counters.color_ops += 2
        else:
            counters.color_ops += 1
        frag.color = src
        buffers.color[by, bx] = src
        buffers.color_init_mask[by, bx] = True
    return buffers


def _over(src, dst):
    if dst is None:
        return tuple(src)
    sa = src[3]
    rgb = [sa * src[i] + (1.0 - sa) * dst[i] for i in range(3)]
    return (*rgb, sa + (1.0 - sa) * dst[3])


def quantize(rgba: np.ndarray) -> np.ndarray:
    return np.floor(np.clip(rgba, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def resolve_tile(buffers: TileBuffers, rate: SamplingRate, clear_color: Color = BLACK) -> np.ndarray:
    """Replicate each superfragment's color over its block; untouched blocks get clear_color."""
    n = rate.n
    reps = quantize(buffers.color[::n, ::n])
    mask = buffers.color_init_mask[::n, ::n]
    out = np.where(mask[..., None], reps, clear_color.as_array())
    return out.repeat(n, axis=0).repeat(n, axis=1)


def render_tile(
    scene: Sequence[Triangle],
    origin_x: int,
    origin_y: int,
    rate: SamplingRate,
    clear_color: Color = BLACK,
    blend: bool = False,
    tile_size: int = TILE_SIZE,
) -> tuple[np.ndarray, Counters]:
    buffers = TileBuffers(tile_size)
    counters = Counters()
    for quad in rasterize_tile(scene, origin_x, origin_y, rate, tile_size):
        depth_test_and_shade(quad, buffers, counters, blend)
    return resolve_tile(buffers, rate, clear_color), counters


def render_frame(
    scene: Sequence[Triangle],
    grid: TileGrid,
    srt: SamplingRateTable,
    params: ControllerParams,
    clear_color: Color = BLACK,
    blend: bool = False,
) -> tuple[Frame, np.ndarray, Counters]:
    """Render every tile at its SRT rate and analyze each resolved tile.

    The caller advances the SRT with ``update_table`` using the returned MaxC.
    """
    if srt.tile_count != grid.tile_count:
        raise ValueError(f"SRT has {srt.tile_count} entries, grid has {grid.tile_count} tiles")
    pixels = np.empty((grid.frame_height, grid.frame_width, 4), dtype=np.uint8)
    max_c = np.empty(grid.tile_count)
    total = Counters()
    for tile_id, x0, y0 in grid.origins():
        tile, counters = render_tile(scene, x0, y0, srt.rate(tile_id), clear_color, blend, grid.tile_size)
        paste_tile(pixels, grid, tile_id, tile)
        coeffs, _ = dct2d_rowcol(luma(tile))
        max_c[tile_id] = max_coefficient(coeffs, params.d)
        counters.tile_invocations = [counters.shader_invocations]
        total = total.merge(counters)
    return Frame(grid.frame_width, grid.frame_height, pixels), max_c, total


@dataclass
class PipelineOutcome:
    output_frames: list[Frame]
    reference_frames: list[Frame]
    report: SequenceReport
    state_trace: list[np.ndarray] = field(default_factory=list)
    tile_invocations: list[list[int]] = field(default_factory=list)


def run_scene(
    frames: Sequence[Sequence[Triangle]],
    width: int,
    height: int,
    params: ControllerParams,
    clear_color: Color = BLACK,
    blend: bool = False,
) -> PipelineOutcome:
    """Render an animated scene with DSR and, per frame, at full rate as the baseline."""
    grid = make_grid(width, height, TILE_SIZE)
    srt = SamplingRateTable.initial(grid.tile_count)
    full = SamplingRateTable.initial(grid.tile_count)
    outputs, refs, reports, trace, per_tile = [], [], [], [], []
    for index, scene in enumerate(frames):
        trace.append(srt.states.copy())
        out, max_c, counters = render_frame(scene, grid, srt, params, clear_color, blend)
        ref, _, base = render_frame(scene, grid, full, params, clear_color, blend)
        err = mse(out, ref)
        reports.append(
            FrameReport(
                frame_index=index,
                mse=err,
                psnr_db=psnr(err),
                shader_invocations=counters.shader_invocations,
                baseline_invocations=base.shader_invocations,
                depth_ops=counters.depth_ops,
                color_ops=counters.color_ops,
                rate_histogram=srt.histogram(),
            )
        )
        outputs.append(out)
        refs.append(ref)
        per_tile.append(counters.tile_invocations)
        srt = update_table(srt, max_c, params)
    return PipelineOutcome(outputs, refs, aggregate(reports), trace, per_tile)


__all__ = [
    "Vertex", "Shader", "Triangle", "Superfragment", "Superquad", "TileBuffers", "Counters",
    "rasterize_tile", "depth_test_and_shade", "resolve_tile", "render_tile", "render_frame",
    "run_scene", "PipelineOutcome",
]

"""Apply DSR to pre-rendered frame sequences.

Reduced-rate rendering is simulated by point sampling the reference frame at
one pixel per N x N block and replicating it over the block. The replicated
tile is what gets analyzed, so the SRT for frame f+1 depends on what frame f
actually showed.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from dsrsim.controller import (
    ControllerParams,
    SamplingRate,
    SamplingRateTable,
    update_table,
)
from dsrsim.fau import dct2d_rowcol, max_coefficient
from dsrsim.frame import TILE_SIZE, Frame, TileGrid, luma, make_grid
from dsrsim.metrics import FrameReport, SequenceReport, aggregate, json_db, mse, psnr

WORKERS_ENV = "DSRSIM_WORKERS"


@dataclass(frozen=True)
class ReplayConfig:
    params: ControllerParams
    tile_size: int = TILE_SIZE
    emit_frames: bool = True
    emit_rate_maps: bool = False

    def __post_init__(self):
        if self.tile_size != TILE_SIZE:
            raise ValueError(f"tile_size must be {TILE_SIZE}")

    def to_dict(self) -> dict:
        return {"t": self.params.t, "d": self.params.d, "tile_size": self.tile_size}


@dataclass
class ReplayOutcome:
    output_frames: list[Frame]
    report: SequenceReport
    srt_trace: list[dict[str, int]]
    state_trace: list[np.ndarray] = field(default_factory=list)
    grid: TileGrid | None = None


def simulate_tile(reference_tile: np.ndarray, rate: SamplingRate) -> np.ndarray:
    """Replicate the pixel at offset (n//2, n//2) of each n x n block across the block."""
    n = rate.n
    if n == 1:
        return np.array(reference_tile, copy=True)
    off = n // 2
    samples = reference_tile[off::n, off::n]
    return samples.repeat(n, axis=0).repeat(n, axis=1)


def split_tiles(frame: Frame, grid: TileGrid) -> np.ndarray:
    """All tiles as a (tile_count, ts, ts, 4) stack, edge-clamped at partial tiles."""
    ts = grid.tile_size
    ys = np.minimum(np.arange(grid.rows * ts), frame.height - 1)
    xs = np.minimum(np.arange(grid.cols * ts), frame.width - 1)
    padded = frame.pixels[np.ix_(ys, xs)]
    return (
        padded.reshape(grid.rows, ts, grid.cols, ts, 4)
        .transpose(0, 2, 1, 3, 4)
        .reshape(grid.tile_count, ts, ts, 4)
    )


def join_tiles(tiles: np.ndarray, grid: TileGrid) -> Frame:
    ts = grid.tile_size
    padded = (
        tiles.reshape(grid.rows, grid.cols, ts, ts, 4)
        .transpose(0, 2, 1, 3, 4)
        .reshape(grid.rows * ts, grid.cols * ts, 4)
    )
    return Frame(grid.frame_width, grid.frame_height, padded[: grid.frame_height, : grid.frame_width])


def simulate_sequence(frames: Sequence[Frame], config: ReplayConfig) -> ReplayOutcome:
    if not frames:
        raise ValueError("need at least one frame")
    w, h = frames[0].width, frames[0].height
    for i, f in enumerate(frames):
        if (f.width, f.height) != (w, h):
            raise ValueError(f"frame {i} is {f.width}x{f.height}, expected {w}x{h}")
    grid = make_grid(w, h, config.tile_size)
    params = config.params
    srt = SamplingRateTable.initial(grid.tile_count)
    baseline = grid.tile_count * config.tile_size ** 2
    outputs, reports, hist_trace, state_trace = [], [], [], []
    for index, ref in enumerate(frames):
        ref_tiles = split_tiles(ref, grid)
        out_tiles = np.empty_like(ref_tiles)
        max_c = np.empty(grid.tile_count)
        sides = srt.rate_sides()
        for tile_id in range(grid.tile_count):
            rate = SamplingRate(int(sides[tile_id]))
            tile = simulate_tile(ref_tiles[tile_id], rate)
            out_tiles[tile_id] = tile
            coeffs, _ = dct2d_rowcol(luma(tile))
            max_c[tile_id] = max_coefficient(coeffs, params.d)
        out = join_tiles(out_tiles, grid)
        err = mse(out, ref)
        hist = srt.histogram()
        reports.append(
            FrameReport(
                frame_index=index,
                mse=err,
                psnr_db=psnr(err),
                shader_invocations=int(np.sum((config.tile_size // sides) ** 2)),
                baseline_invocations=baseline,
                rate_histogram=hist,
            )
        )
        hist_trace.append(hist)
        state_trace.append(srt.states.copy())
        if config.emit_frames:
            outputs.append(out)
        srt = update_table(srt, max_c, params)
    return ReplayOutcome(outputs, aggregate(reports), hist_trace, state_trace, grid)


@dataclass(frozen=True)
class SweepPoint:
    t: float
    d: int
    mean_psnr_db: float
    invocation_ratio: float
    invocations: int


@dataclass
class CalibrationResult:
    t: float
    d: int
    mean_psnr_db: float
    invocation_ratio: float
    met_floor: bool
    psnr_floor: float
    sweep: list[SweepPoint]

    @property
    def savings(self) -> float:
        return 1.0 - self.invocation_ratio

    def to_dict(self) -> dict:
        return {
            "selected": {
                "t": self.t,
                "d": self.d,
                "mean_psnr_db": json_db(self.mean_psnr_db),
                "invocation_ratio": self.invocation_ratio,
                "savings": self.savings,
                "met_floor": self.met_floor,
            },
            "psnr_floor": json_db(self.psnr_floor),
            "sweep": [
                {
                    "t": p.t,
                    "d": p.d,
                    "mean_psnr_db": json_db(p.mean_psnr_db),
                    "invocation_ratio": p.invocation_ratio,
                    "savings": 1.0 - p.invocation_ratio,
                }
                for p in self.sweep
            ],
        }


def _evaluate(args) -> SweepPoint:
    frames, t, d = args
    rep = simulate_sequence(frames, ReplayConfig(ControllerParams(t, d), emit_frames=False)).report
    return SweepPoint(t, d, rep.mean_psnr_db, rep.invocation_ratio, rep.total_invocations)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def sweep_grid(frames, t_grid, d_grid, workers: int | None = None) -> list[SweepPoint]:
    """Evaluate every (t, d) pair; order is t-major regardless of worker count."""
    tasks = [(frames, float(t), int(d)) for t in t_grid for d in d_grid]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_evaluate, tasks))
    return [_evaluate(task) for task in tasks]


def select_point(sweep: Sequence[SweepPoint], psnr_floor: float) -> tuple[SweepPoint, bool]:
    """Most savings among points meeting the floor; ties go to lower t, then lower d.

    With no point meeting the floor, the best-quality point is returned instead,
    ties broken by savings and then the same t, d order.
    """
    ok = [p for p in sweep if p.mean_psnr_db >= psnr_floor]
    if ok:
        return min(ok, key=lambda p: (p.invocations, p.t, p.d)), True
    return min(sweep, key=lambda p: (-p.mean_psnr_db, p.invocations, p.t, p.d)), False


def calibrate_parameters(
    frames: Sequence[Frame],
    psnr_floor: float,
    t_grid: Sequence[float],
    d_grid: Sequence[int],
    workers: int | None = None,
) -> CalibrationResult:
    if not t_grid or not d_grid:
        raise ValueError("t_grid and d_grid must be non-empty")
    if len(frames) < 2:
        raise ValueError("calibration needs at least two frames")
    sweep = sweep_grid(list(frames), t_grid, d_grid, workers)
    best, met = select_point(sweep, psnr_floor)
    return CalibrationResult(best.t, best.d, best.mean_psnr_db, best.invocation_ratio, met, psnr_floor, sweep)

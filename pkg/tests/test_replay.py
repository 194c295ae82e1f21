import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_frame
from dsrsim.controller import ControllerParams, SamplingRate, TileState
from dsrsim.corpus import checkerboard_sequence, constant_sequence, mixed_sequence
from dsrsim.frame import Frame
from dsrsim.replay import (
    ReplayConfig,
    calibrate_parameters,
    join_tiles,
    simulate_sequence,
    simulate_tile,
    split_tiles,
)
from dsrsim.frame import make_grid
from oracles import nearest_resample
from test_fau import CHECKER_MAXC


def cfg(t, d):
    return ReplayConfig(ControllerParams(t, d))


def test_simulate_tile_identity(rng):
    tile = rng.integers(0, 256, (16, 16, 4), dtype=np.uint8)
    assert np.array_equal(simulate_tile(tile, SamplingRate(1)), tile)


def test_simulate_tile_constant():
    tile = np.full((16, 16, 4), 77, dtype=np.uint8)
    assert np.array_equal(simulate_tile(tile, SamplingRate(4)), tile)


@pytest.mark.parametrize("n", [2, 4])
def test_simulate_tile_matches_nearest_resample(n):
    ramp = np.linspace(0, 255, 16).round().astype(np.uint8)
    tile = np.zeros((16, 16, 4), dtype=np.uint8)
    tile[..., :3] = ramp[None, :, None]
    tile[..., 3] = 255
    assert np.array_equal(simulate_tile(tile, SamplingRate(n)), nearest_resample(tile, n))


def test_simulate_tile_offsets(rng):
    tile = rng.integers(0, 256, (16, 16, 4), dtype=np.uint8)
    assert np.all(simulate_tile(tile, SamplingRate(2))[:2, :2] == tile[1, 1])
    assert np.all(simulate_tile(tile, SamplingRate(4))[4:8, 8:12] == tile[6, 10])


def test_split_join_round_trip(rng):
    f = random_frame(rng, 35, 20)
    g = make_grid(35, 20)
    assert join_tiles(split_tiles(f, g), g) == f


def test_constant_sequence_converges():
    out = simulate_sequence(constant_sequence(10), cfg(5.0, 1))
    n_tiles = out.grid.tile_count
    assert out.srt_trace[4]["SIXTEENTH"] == n_tiles
    for k, rep in enumerate(out.report.frames):
        want = [256, 256, 64, 64][k] if k < 4 else 16
        assert rep.shader_invocations == want * n_tiles
    assert out.report.invocation_ratio == 736 / 2560
    assert math.isinf(out.report.mean_psnr_db)
    assert all(a == b for a, b in zip(out.output_frames, constant_sequence(10)))


def test_checkerboard_stays_full():
    frames = checkerboard_sequence(10)
    out = simulate_sequence(frames, cfg(CHECKER_MAXC - 1.0, 2))
    assert all(h["FULL"] == out.grid.tile_count for h in out.srt_trace)
    assert all(a == b for a, b in zip(out.output_frames, frames))
    assert math.isinf(out.report.mean_psnr_db)


def test_pattern_appears_then_recovers(rng):
    base = constant_sequence(8, 48, 48)
    px = np.array(base[0].pixels)
    px[16:32, 16:32, :3] = rng.integers(0, 256, (16, 16, 3))
    burst = Frame(48, 48, px)
    frames = base[:5] + [burst] * 3
    out = simulate_sequence(frames, cfg(5.0, 1))
    center = 4  # tile (1, 1) of a 3x3 grid
    assert TileState(int(out.state_trace[5][center])) is TileState.SIXTEENTH
    assert out.output_frames[5] != burst
    assert math.isfinite(out.report.frames[5].psnr_db)
    assert TileState(int(out.state_trace[6][center])) is TileState.FULL
    assert out.output_frames[6] == burst


def test_mismatched_frames(rng):
    with pytest.raises(ValueError):
        simulate_sequence([random_frame(rng, 16, 16), random_frame(rng, 32, 16)], cfg(1, 1))
    with pytest.raises(ValueError):
        simulate_sequence([], cfg(1, 1))


def test_zero_threshold_is_conservative(rng):
    frames = [random_frame(rng, 40, 24) for _ in range(4)]
    out = simulate_sequence(frames, cfg(0.0, 0))
    assert all(h["FULL"] == out.grid.tile_count for h in out.srt_trace)
    assert all(a == b for a, b in zip(out.output_frames, frames))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 400), st.integers(0, 8))
def test_invariants(seed, t, d):
    rng = np.random.default_rng(seed)
    base = random_frame(rng, 32, 32)
    flat = Frame.filled(32, 32, base.color_at(0, 0))
    frames = [flat, flat, base, flat, flat, base]
    a = simulate_sequence(frames, cfg(t, d))
    b = simulate_sequence(frames, cfg(t, d))
    assert 1 / 16 <= a.report.invocation_ratio <= 1
    assert a.output_frames[0] == frames[0]
    assert a.report.to_json() == b.report.to_json()
    assert all(x == y for x, y in zip(a.output_frames, b.output_frames))
    assert all(np.array_equal(x, y) for x, y in zip(a.state_trace, b.state_trace))


def test_calibrate_constant():
    res = calibrate_parameters(constant_sequence(8, 32, 32), math.inf, [0.0, 1.0, 10.0], [0, 1, 2])
    assert res.met_floor
    assert (res.t, res.d) == (1.0, 1)
    assert res.invocation_ratio == (2 * 256 + 2 * 64 + 4 * 16) / (8 * 256)


def test_calibrate_checkerboard_infinite_floor():
    res = calibrate_parameters(checkerboard_sequence(6, 32, 32), math.inf, [100.0, 2000.0, 5000.0], [0, 2])
    assert res.met_floor and math.isinf(res.mean_psnr_db)
    assert res.invocation_ratio == 1.0
    assert (res.t, res.d) == (100.0, 0)


def test_calibrate_unreachable_floor_flags():
    frames = mixed_sequence(6, 64, 64, sprite=12, start=(10, 20))
    res = calibrate_parameters(frames, math.inf, [50.0, 500.0], [2])
    assert not res.met_floor
    best = max(res.sweep, key=lambda p: p.mean_psnr_db)
    assert res.mean_psnr_db == best.mean_psnr_db


def test_calibrate_matches_exhaustive_reevaluation():
    frames = mixed_sequence(8, 64, 64, sprite=12, start=(10, 20))
    t_grid, d_grid, floor = [0.0, 8.0, 64.0, 256.0], [1, 3, 6], 38.0
    res = calibrate_parameters(frames, floor, t_grid, d_grid)
    rows = []
    for t in t_grid:
        for d in d_grid:
            r = simulate_sequence(frames, cfg(t, d)).report
            rows.append((r.total_invocations, t, d, r.mean_psnr_db))
    feasible = sorted(row for row in rows if row[3] >= floor)
    assert feasible, "grid should contain a feasible point"
    assert (res.t, res.d) == feasible[0][1:3]
    assert res.met_floor


def test_calibrate_argument_errors():
    frames = constant_sequence(3, 16, 16)
    with pytest.raises(ValueError):
        calibrate_parameters(frames, 30.0, [], [1])
    with pytest.raises(ValueError):
        calibrate_parameters(frames[:1], 30.0, [1.0], [1])


def test_parallel_sweep_same_order():
    from dsrsim.replay import sweep_grid

    frames = mixed_sequence(4, 32, 32, sprite=8, start=(4, 4))
    serial = sweep_grid(frames, [0.0, 50.0], [1, 4], workers=1)
    parallel = sweep_grid(frames, [0.0, 50.0], [1, 4], workers=2)
    assert serial == parallel

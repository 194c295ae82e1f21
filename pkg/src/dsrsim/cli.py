"""Command line front end.

    dsrsim replay    FRAMES_DIR OUT_DIR [--threshold-t T] [--diagonals-d D]
    dsrsim pipeline  SCENE_FILE OUT_DIR [--threshold-t T] [--diagonals-d D]
    dsrsim calibrate FRAMES_DIR OUT_DIR [--psnr-floor DB] [--t-grid ...] [--d-grid ...]
    dsrsim corpus    OUT_DIR [--kind mixed|constant|checkerboard]

Every run writes ``report.json`` and a ``manifest.txt`` listing all files it
emitted; the manifest is written last. Set DSRSIM_WORKERS to sweep the
calibration grid in parallel processes.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from dsrsim import corpus
from dsrsim.controller import ControllerParams, SamplingRateTable, rate_map
from dsrsim.frame import Color, make_grid
from dsrsim.io import FrameFormatError, read_sequence, write_frame, write_gray
from dsrsim.metrics import json_db
from dsrsim.replay import ReplayConfig, calibrate_parameters, simulate_sequence

log = logging.getLogger("dsrsim")

# calibrate on the bundled mixed corpus with a 45 dB floor over the default grids
DEFAULT_T = 128.0
DEFAULT_D = 3
DEFAULT_PSNR_FLOOR = 45.0
DEFAULT_T_GRID = (0.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0)
DEFAULT_D_GRID = (1, 2, 3, 4, 6, 8)
DEFAULTS_SOURCE = "calibrate on bundled mixed corpus, psnr_floor=45 dB"

MODES = ("replay", "pipeline", "calibrate")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str
    input: Path
    output: Path
    t: float = DEFAULT_T
    d: int = DEFAULT_D
    tile_size: int = 16
    emit_frames: bool = True
    emit_rate_maps: bool = False
    emit_figures: bool = True
    t_grid: tuple[float, ...] = DEFAULT_T_GRID
    d_grid: tuple[int, ...] = DEFAULT_D_GRID
    psnr_floor: float = DEFAULT_PSNR_FLOOR
    blend: bool = False
    clear_color: tuple[int, int, int] = (0, 0, 0)
    frame_format: str | None = None
    params_explicit: bool = False

    def validate(self) -> None:
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.tile_size != 16:
            raise UsageError("tile size is fixed at 16")
        if not (self.t >= 0 and math.isfinite(self.t)):
            raise UsageError(f"--threshold-t must be a finite value >= 0, got {self.t}")
        if not 0 <= self.d <= 31:
            raise UsageError(f"--diagonals-d must be in [0, 31], got {self.d}")
        if self.mode == "calibrate":
            if not self.t_grid or not self.d_grid:
                raise UsageError("calibrate needs non-empty --t-grid and --d-grid")
            if any(t < 0 or not math.isfinite(t) for t in self.t_grid):
                raise UsageError("--t-grid values must be finite and >= 0")
            if any(not 0 <= d <= 31 for d in self.d_grid):
                raise UsageError("--d-grid values must be in [0, 31]")
            if math.isnan(self.psnr_floor):
                raise UsageError("--psnr-floor must be a number or inf")
        if self.frame_format not in (None, "ppm", "png"):
            raise UsageError(f"unsupported frame format {self.frame_format!r}")
        if any(not 0 <= c <= 255 for c in self.clear_color):
            raise UsageError("--clear-color channels must be in [0, 255]")

    def to_dict(self) -> dict:
        d = {"mode": self.mode, "input": str(self.input), "tile_size": self.tile_size}
        if self.mode == "calibrate":
            d.update(
                t_grid=list(self.t_grid),
                d_grid=list(self.d_grid),
                psnr_floor=json_db(self.psnr_floor),
            )
        else:
            d.update(t=self.t, d=self.d)
            d["params_source"] = "command line" if self.params_explicit else DEFAULTS_SOURCE
        if self.mode == "pipeline":
            d.update(blend=self.blend, clear_color=list(self.clear_color))
        return d


class Emitter:
    """Tracks files written under the output directory for the manifest."""

    def __init__(self, root: Path):
        self.root = root
        self.files: list[Path] = []
        root.mkdir(parents=True, exist_ok=True)

    def path(self, rel: str) -> Path:
        p = self.root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def text(self, rel: str, content: str) -> Path:
        p = self.path(rel)
        p.write_text(content)
        return self.add(p)

    def add(self, p: Path) -> Path:
        self.files.append(p)
        return p

    def manifest(self) -> Path:
        lines = []
        for p in self.files:
            digest = hashlib.sha256(p.read_bytes()).hexdigest()
            lines.append(f"{digest}  {p.relative_to(self.root).as_posix()}\n")
        p = self.root / "manifest.txt"
        p.write_text("".join(lines))
        return p


def _write_report(em: Emitter, report, config: RunConfig, extra: dict | None = None) -> dict:
    doc = report.to_dict(config.to_dict())
    if extra:
        doc.update(extra)
    em.text("report.json", json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")
    em.text("frames.csv", report.to_csv())
    return doc


def _figures(em: Emitter, report, title: str) -> None:
    from dsrsim import plots

    em.add(plots.plot_sequence(report, em.path("figures/sequence.png"), title))
    em.add(plots.plot_rate_histogram(report, em.path("figures/rate_histogram.png")))


def _emit_rate_maps(em: Emitter, state_trace, grid, suffix: str) -> None:
    gray_suffix = ".png" if suffix == ".png" else ".pgm"
    for i, states in enumerate(state_trace, 1):
        srt = SamplingRateTable(states)
        img = rate_map(srt, grid.cols, grid.rows, grid.tile_size)[: grid.frame_height, : grid.frame_width]
        em.add(write_gray(img, em.path(f"rate_maps/rate_{i:04d}{gray_suffix}")))
        em.text(f"srt/srt_{i:04d}.csv", srt.to_csv())


def run_replay(config: RunConfig) -> dict:
    frames, suffix = read_sequence(config.input)
    suffix = f".{config.frame_format}" if config.frame_format else suffix
    rc = ReplayConfig(ControllerParams(config.t, config.d), config.tile_size, config.emit_frames, config.emit_rate_maps)
    outcome = simulate_sequence(frames, rc)
    em = Emitter(config.output)
    for i, frame in enumerate(outcome.output_frames, 1):
        em.add(write_frame(frame, em.path(f"frames/frame_{i:04d}{suffix}")))
    if config.emit_rate_maps:
        _emit_rate_maps(em, outcome.state_trace, outcome.grid, suffix)
    doc = _write_report(em, outcome.report, config)
    if config.emit_figures:
        _figures(em, outcome.report, f"replay t={config.t:g} d={config.d}")
    em.manifest()
    return doc


def run_pipeline(config: RunConfig) -> dict:
    from dsrsim.pipeline import run_scene
    from dsrsim.scene import read_scene

    scene = read_scene(config.input)
    clear = Color(*config.clear_color)
    outcome = run_scene(scene.frames(), scene.width, scene.height, ControllerParams(config.t, config.d), clear, config.blend)
    suffix = f".{config.frame_format or 'ppm'}"
    em = Emitter(config.output)
    if config.emit_frames:
        for i, frame in enumerate(outcome.output_frames, 1):
            em.add(write_frame(frame, em.path(f"frames/frame_{i:04d}{suffix}")))
    if config.emit_rate_maps:
        _emit_rate_maps(em, outcome.state_trace, make_grid(scene.width, scene.height), suffix)
    doc = _write_report(em, outcome.report, config)
    if config.emit_figures:
        _figures(em, outcome.report, f"pipeline t={config.t:g} d={config.d}")
    em.manifest()
    return doc


def run_calibrate(config: RunConfig) -> dict:
    frames, _ = read_sequence(config.input)
    result = calibrate_parameters(frames, config.psnr_floor, config.t_grid, config.d_grid)
    em = Emitter(config.output)
    doc = {"config": config.to_dict(), **result.to_dict()}
    em.text("report.json", json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")
    rows = ["t,d,mean_psnr_db,invocation_ratio,savings"]
    rows += [f"{p.t!r},{p.d},{json_db(p.mean_psnr_db)},{p.invocation_ratio!r},{1 - p.invocation_ratio!r}" for p in result.sweep]
    em.text("sweep.csv", "\n".join(rows) + "\n")
    if config.emit_figures:
        from dsrsim import plots

        em.add(plots.plot_sweep(result, em.path("figures/sweep.png")))
    em.manifest()
    status = "meets" if result.met_floor else "MISSES"
    print(
        f"t={result.t:g} d={result.d} mean_psnr={json_db(result.mean_psnr_db)} dB "
        f"savings={result.savings:.4f} ({status} floor {json_db(config.psnr_floor)} dB)"
    )
    return doc


RUNNERS = {"replay": run_replay, "pipeline": run_pipeline, "calibrate": run_calibrate}


def run(config: RunConfig) -> int:
    config.validate()
    try:
        RUNNERS[config.mode](config)
    except FrameFormatError as exc:
        log.error("%s", exc)
        return 1
    except ValueError as exc:
        # scene parse errors and dimension mismatches carry the file name already
        log.error("%s: %s", config.input, exc)
        return 1
    return 0


def _floats(values):
    return tuple(float(v) for v in values)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dsrsim", description="Dynamic sampling rate simulator for tile-based GPUs")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="mode", required=True)

    def common(p, params=True):
        p.add_argument("input", type=Path)
        p.add_argument("output", type=Path)
        if params:
            p.add_argument("--threshold-t", type=float, default=None, help=f"MaxC threshold (default {DEFAULT_T:g})")
            p.add_argument("--diagonals-d", type=int, default=None, help=f"excluded low-frequency diagonals (default {DEFAULT_D})")
            p.add_argument("--no-frames", action="store_true", help="do not write output frames")
            p.add_argument("--rate-maps", action="store_true", help="write per-frame rate maps and SRT snapshots")
            p.add_argument("--format", choices=("ppm", "png"), default=None, help="output frame format")
        p.add_argument("--no-figures", action="store_true", help="skip matplotlib figures")

    common(sub.add_parser("replay", help="apply DSR to a directory of frames"))
    pp = sub.add_parser("pipeline", help="render an animated scene file with DSR")
    common(pp)
    pp.add_argument("--blend", action="store_true", help="source-over blending instead of opaque writes")
    pp.add_argument("--clear-color", type=int, nargs=3, default=(0, 0, 0), metavar=("R", "G", "B"))
    cp = sub.add_parser("calibrate", help="sweep (t, d) for maximum savings above a PSNR floor")
    common(cp, params=False)
    cp.add_argument("--psnr-floor", type=float, default=DEFAULT_PSNR_FLOOR, help="dB, 'inf' allowed")
    cp.add_argument("--t-grid", type=float, nargs="+", default=DEFAULT_T_GRID)
    cp.add_argument("--d-grid", type=int, nargs="+", default=DEFAULT_D_GRID)

    gp = sub.add_parser("corpus", help="write a bundled synthetic frame sequence")
    gp.add_argument("output", type=Path)
    gp.add_argument("--kind", choices=("mixed", "constant", "checkerboard"), default="mixed")
    gp.add_argument("--frames", type=int, default=None)
    gp.add_argument("--format", choices=("ppm", "png"), default="ppm")
    return ap


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(mode=args.mode, input=args.input, output=args.output, emit_figures=not args.no_figures)
    if args.mode == "calibrate":
        cfg.psnr_floor = args.psnr_floor
        cfg.t_grid = _floats(args.t_grid)
        cfg.d_grid = tuple(args.d_grid)
        return cfg
    cfg.params_explicit = args.threshold_t is not None or args.diagonals_d is not None
    cfg.t = DEFAULT_T if args.threshold_t is None else args.threshold_t
    cfg.d = DEFAULT_D if args.diagonals_d is None else args.diagonals_d
    cfg.emit_frames = not args.no_frames
    cfg.emit_rate_maps = args.rate_maps
    cfg.frame_format = args.format
    if args.mode == "pipeline":
        cfg.blend = args.blend
        cfg.clear_color = tuple(args.clear_color)
    return cfg


def write_corpus(output: Path, kind: str = "mixed", count: int | None = None, fmt: str = "ppm") -> list[Path]:
    makers = {
        "mixed": corpus.mixed_sequence,
        "constant": corpus.constant_sequence,
        "checkerboard": corpus.checkerboard_sequence,
    }
    frames = makers[kind]() if count is None else makers[kind](count)
    output.mkdir(parents=True, exist_ok=True)
    return [write_frame(f, output / f"frame_{i:04d}.{fmt}") for i, f in enumerate(frames, 1)]


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="dsrsim: %(message)s")
    if args.mode == "corpus":
        if args.frames is not None and args.frames < 1:
            ap.error("--frames must be >= 1")
        paths = write_corpus(args.output, args.kind, args.frames, args.format)
        print(f"wrote {len(paths)} frames to {args.output}")
        return 0
    cfg = _config_from_args(args)
    try:
        cfg.validate()
    except UsageError as exc:
        ap.error(str(exc))
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

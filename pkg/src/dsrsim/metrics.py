"""Image quality and shading-cost accounting."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from dsrsim.frame import Frame

PEAK = 255.0
INF_TOKEN = "inf"


def mse(a: Frame, b: Frame) -> float:
    """Mean squared 8-bit error over pixels and RGB channels; alpha is ignored."""
    if (a.width, a.height) != (b.width, b.height):
        raise ValueError(f"frame sizes differ: {a.width}x{a.height} vs {b.width}x{b.height}")
    diff = a.pixels[..., :3].astype(np.int64) - b.pixels[..., :3].astype(np.int64)
    return float(np.mean(diff * diff))


def psnr(mse_value: float) -> float:
    if mse_value < 0:
        raise ValueError(f"mse must be non-negative, got {mse_value}")
    if mse_value == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / mse_value)


@dataclass
class FrameReport:
    frame_index: int
    mse: float
    psnr_db: float
    shader_invocations: int
    baseline_invocations: int
    depth_ops: int = 0
    color_ops: int = 0
    rate_histogram: dict[str, int] = field(default_factory=dict)

    @property
    def invocation_ratio(self) -> float:
        return self.shader_invocations / self.baseline_invocations if self.baseline_invocations else 1.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["psnr_db"] = json_db(self.psnr_db)
        d["invocation_ratio"] = self.invocation_ratio
        return d


@dataclass
class SequenceReport:
    frames: list[FrameReport]
    mean_psnr_db: float
    invocation_ratio: float
    total_invocations: int
    total_baseline_invocations: int

    @property
    def savings(self) -> float:
        return 1.0 - self.invocation_ratio

    def summary(self) -> dict:
        return {
            "mean_psnr_db": json_db(self.mean_psnr_db),
            "invocation_ratio": self.invocation_ratio,
            "savings": self.savings,
            "shader_invocations": self.total_invocations,
            "baseline_invocations": self.total_baseline_invocations,
            "frames": len(self.frames),
        }

    def to_dict(self, config: dict | None = None) -> dict:
        return {
            "config": config or {},
            "per_frame": [f.to_dict() for f in self.frames],
            "summary": self.summary(),
        }

    def to_json(self, config: dict | None = None) -> str:
        return json.dumps(self.to_dict(config), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        states = list(self.frames[0].rate_histogram) if self.frames else []
        head = [
            "frame_index", "mse", "psnr_db", "shader_invocations",
            "baseline_invocations", "invocation_ratio", "depth_ops", "color_ops",
        ] + states
        lines = [",".join(head)]
        for f in self.frames:
            row = [
                f.frame_index, repr(f.mse), json_db(f.psnr_db), f.shader_invocations,
                f.baseline_invocations, repr(f.invocation_ratio), f.depth_ops, f.color_ops,
            ] + [f.rate_histogram.get(s, 0) for s in states]
            lines.append(",".join(str(v) for v in row))
        return "\n".join(lines) + "\n"


def json_db(value: float):
    return INF_TOKEN if math.isinf(value) else value


def mean_psnr(values) -> float:
    """Mean over finite per-frame PSNRs; infinite only when every frame is exact."""
    finite = [v for v in values if not math.isinf(v)]
    return math.fsum(finite) / len(finite) if finite else math.inf


def aggregate(reports: list[FrameReport]) -> SequenceReport:
    if not reports:
        raise ValueError("cannot aggregate an empty report list")
    inv = sum(r.shader_invocations for r in reports)
    base = sum(r.baseline_invocations for r in reports)
    ratio = inv / base if base else 1.0
    return SequenceReport(
        frames=list(reports),
        mean_psnr_db=mean_psnr(r.psnr_db for r in reports),
        invocation_ratio=ratio,
        total_invocations=inv,
        total_baseline_invocations=base,
    )

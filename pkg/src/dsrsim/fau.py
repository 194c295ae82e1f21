"""Frequency analysis of a tile: kernel-matrix 2D DCT and the MaxC detail score.

The row-column path mirrors the hardware unit: two identical passes through a
single scratch buffer, each pass computing ``(K @ src).T``. Applying it twice
gives ``K @ X @ K.T``. Lane scheduling only shows up in the op count.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

DEFAULT_LANES = 4


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    n: int
    k: np.ndarray


@dataclass(frozen=True)
class FauOpCount:
    multiply_accumulates: int
    passes: int = 2
    lanes: int = DEFAULT_LANES
    rows_per_lane: int = 4

    def __add__(self, other: "FauOpCount") -> "FauOpCount":
        return FauOpCount(
            self.multiply_accumulates + other.multiply_accumulates,
            self.passes + other.passes,
            self.lanes,
            self.rows_per_lane,
        )


def alpha(p: int, n: int) -> float:
    return 1.0 / math.sqrt(n) if p == 0 else math.sqrt(2.0 / n)


def build_kernel(n: int = 16) -> KernelMatrix:
    if n < 1:
        raise ValueError(f"transform size must be >= 1, got {n}")
    p = np.arange(n, dtype=np.float64)[:, None]
    q = np.arange(n, dtype=np.float64)[None, :]
    k = math.sqrt(2.0 / n) * np.cos((2 * q + 1) * math.pi * p / (2 * n))
    k[0, :] = 1.0 / math.sqrt(n)
    k.flags.writeable = False
    return KernelMatrix(n, k)


_DEFAULT_KERNEL = build_kernel(16)


def lane_schedule(n: int, lanes: int = DEFAULT_LANES) -> list[range]:
    """Lines handled by each compute unit in one pass; each unit takes a contiguous block."""
    per_lane = -(-n // lanes)
    return [range(i * per_lane, min(n, (i + 1) * per_lane)) for i in range(lanes)]


def fau_pass(src: np.ndarray, kernel: KernelMatrix, dst: np.ndarray, lanes: int = DEFAULT_LANES) -> int:
    """One pass through the DCT buffer: ``dst = (K @ src).T``. Returns MACs issued.

    Unit ``u`` transforms source column ``j`` for each ``j`` in its block and
    stores the result as row ``j`` of the buffer.
    """
    k = kernel.k
    for block in lane_schedule(kernel.n, lanes):
        if len(block):
            cols = slice(block.start, block.stop)
            dst[cols, :] = (k @ src[:, cols]).T
    return kernel.n ** 3


def _as_tile(tile_luma, n: int) -> np.ndarray:
    x = np.asarray(tile_luma, dtype=np.float64)
    if x.shape != (n, n):
        raise ValueError(f"tile must be {n}x{n}, got shape {x.shape}")
    return x


def dct2d_rowcol(
    tile_luma, kernel: KernelMatrix | None = None, lanes: int = DEFAULT_LANES
) -> tuple[np.ndarray, FauOpCount]:
    kernel = kernel or _DEFAULT_KERNEL
    x = _as_tile(tile_luma, kernel.n)
    buf = np.empty_like(x)
    macs = fau_pass(x, kernel, buf, lanes)
    aux = buf.copy()  # the hardware reads and writes the same buffer; copy keeps reads clean
    macs += fau_pass(aux, kernel, buf, lanes)
    ops = FauOpCount(macs, 2, lanes, -(-kernel.n // lanes))
    return buf, ops


def dct2d_naive(tile_luma, n: int = 16) -> np.ndarray:
    """Literal double cosine sum; kept loop-based so it shares nothing with the kernel path."""
    x = _as_tile(tile_luma, n)
    cos = [[math.cos((2 * m + 1) * math.pi * p / (2 * n)) for m in range(n)] for p in range(n)]
    rows = x.tolist()
    # inner[m][q]: sum over columns of row m against the q-th cosine
    inner = [[sum(rows[m][j] * cos[q][j] for j in range(n)) for q in range(n)] for m in range(n)]
    out = np.zeros((n, n))
    for p in range(n):
        for q in range(n):
            total = 0.0
            for m in range(n):
                total += cos[p][m] * inner[m][q]
            out[p, q] = alpha(p, n) * alpha(q, n) * total
    return out


@functools.lru_cache(maxsize=None)
def _diagonal_index(n: int) -> np.ndarray:
    p, q = np.indices((n, n))
    return p + q


def max_coefficient(coeffs, d: int) -> float:
    """Largest |c[p][q]| over anti-diagonals p + q >= d; 0 if none remain."""
    c = np.asarray(coeffs, dtype=np.float64)
    n = c.shape[0]
    if not 0 <= d <= 2 * n - 1:
        raise ValueError(f"excluded diagonal count must be in [0, {2 * n - 1}], got {d}")
    kept = np.abs(c[_diagonal_index(n) >= d])
    return float(kept.max()) if kept.size else 0.0


def coefficients_csv(coeffs) -> str:
    """Row-major dump, one matrix row per line."""
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in np.asarray(coeffs))

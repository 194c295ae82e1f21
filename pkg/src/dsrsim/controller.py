"""Per-tile sampling rate FSM and the Sampling Rate Table (SRT)."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

STATE_BITS = 3


class TileState(enum.IntEnum):
    FULL = 0
    DOWN1_CANDIDATE = 1
    QUARTER = 2
    DOWN2_CANDIDATE = 3
    SIXTEENTH = 4


@dataclass(frozen=True)
class SamplingRate:
    """One sample per n x n pixel block."""

    n: int

    def __post_init__(self):
        if self.n not in (1, 2, 4):
            raise ValueError(f"sampling grid side must be 1, 2 or 4, got {self.n}")

    def superfragments(self, tile_size: int = 16) -> int:
        return (tile_size // self.n) ** 2

    def __str__(self):
        return f"1/{self.n}x{self.n}"


_RATE_N = np.array([1, 1, 2, 2, 4], dtype=np.int64)


@dataclass(frozen=True)
class ControllerParams:
    t: float
    d: int

    def __post_init__(self):
        if not self.t >= 0:
            raise ValueError(f"threshold t must be >= 0, got {self.t}")
        if not 0 <= self.d <= 31:
            raise ValueError(f"excluded diagonals d must be in [0, 31], got {self.d}")


def rate_of(state: TileState) -> SamplingRate:
    return SamplingRate(int(_RATE_N[int(state)]))


def next_state(current: TileState, max_c: float, params: ControllerParams) -> TileState:
    if max_c > params.t:
        return TileState.FULL
    return TileState(min(int(current) + 1, TileState.SIXTEENTH))


def encode_state(state: TileState) -> int:
    return int(state) & ((1 << STATE_BITS) - 1)


def decode_state(bits: int) -> TileState:
    return TileState(bits & ((1 << STATE_BITS) - 1))


def srt_storage(tile_count: int) -> tuple[int, float]:
    """SRT footprint as (bits, kilobytes)."""
    if tile_count < 1:
        raise ValueError(f"tile_count must be >= 1, got {tile_count}")
    bits = STATE_BITS * tile_count
    return bits, bits / 8 / 1024


@dataclass(frozen=True, eq=False)
class SamplingRateTable:
    states: np.ndarray

    def __post_init__(self):
        s = np.array(self.states, dtype=np.uint8)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("SRT needs a non-empty 1-D state array")
        if s.max() > TileState.SIXTEENTH:
            raise ValueError("SRT holds an invalid state code")
        s.flags.writeable = False
        object.__setattr__(self, "states", s)

    @classmethod
    def initial(cls, tile_count: int) -> "SamplingRateTable":
        return cls(np.full(tile_count, TileState.FULL, dtype=np.uint8))

    @property
    def tile_count(self) -> int:
        return int(self.states.size)

    @property
    def storage_bits(self) -> int:
        return STATE_BITS * self.tile_count

    def state(self, tile_id: int) -> TileState:
        return TileState(int(self.states[tile_id]))

    def rate(self, tile_id: int) -> SamplingRate:
        return rate_of(self.state(tile_id))

    def rate_sides(self) -> np.ndarray:
        return _RATE_N[self.states]

    def histogram(self) -> dict[str, int]:
        counts = np.bincount(self.states, minlength=len(TileState))
        return {s.name: int(counts[s]) for s in TileState}

    def to_csv(self) -> str:
        lines = ["tile_id,state,n\n"]
        for i, (s, n) in enumerate(zip(self.states, self.rate_sides())):
            lines.append(f"{i},{TileState(int(s)).name},{int(n)}\n")
        return "".join(lines)

    def __eq__(self, other):
        if not isinstance(other, SamplingRateTable):
            return NotImplemented
        return bool(np.array_equal(self.states, other.states))


def update_table(
    srt: SamplingRateTable, max_c_per_tile, params: ControllerParams
) -> SamplingRateTable:
    """Next frame's SRT. The input table is left untouched (double buffering)."""
    max_c = np.asarray(max_c_per_tile, dtype=np.float64)
    if max_c.shape != (srt.tile_count,):
        raise ValueError(f"expected {srt.tile_count} MaxC values, got shape {max_c.shape}")
    stepped = np.minimum(srt.states.astype(np.int64) + 1, int(TileState.SIXTEENTH))
    nxt = np.where(max_c > params.t, int(TileState.FULL), stepped)
    return SamplingRateTable(nxt.astype(np.uint8))


def rate_map(srt: SamplingRateTable, cols: int, rows: int, tile_size: int = 1) -> np.ndarray:
    """Grayscale image of the table: 255 at full rate, darker as the rate drops."""
    gray = (255 // srt.rate_sides()).astype(np.uint8).reshape(rows, cols)
    if tile_size > 1:
        gray = np.kron(gray, np.ones((tile_size, tile_size), dtype=np.uint8))
    return gray

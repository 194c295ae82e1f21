"""Dynamic sampling rate simulator for tile-based GPUs."""

from dsrsim.frame import Color, Frame, TileGrid, TileView, extract_tile, make_grid
from dsrsim.fau import (
    FauOpCount,
    KernelMatrix,
    build_kernel,
    dct2d_naive,
    dct2d_rowcol,
    max_coefficient,
)
from dsrsim.controller import (
    ControllerParams,
    SamplingRate,
    SamplingRateTable,
    TileState,
    next_state,
    rate_of,
    srt_storage,
    update_table,
)
from dsrsim.metrics import FrameReport, SequenceReport, aggregate, mse, psnr

__version__ = "0.1.0"

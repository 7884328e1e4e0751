"""
Tile-level operations: one pass of the grid over one block of the weight matrix.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from gradinterleave.core.matrix import check_shape
from gradinterleave.errors import ConfigurationError, DimensionError
from gradinterleave.models.core_models import DataflowMode
from gradinterleave.models.report_models import AccessCounters, CycleReport
from gradinterleave.sysarray.passes import interleaved_pass, output_stationary_pass, stationary_pass


class TileJob(BaseModel):
    """
    Operand slices for one tile of W: tile_rows output neurons (y) by tile_cols
    input neurons (x), over a batch of B samples.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mode: DataflowMode
    tile_rows: int = Field(..., ge=1)
    tile_cols: int = Field(..., ge=1)
    batch: int = Field(..., ge=1)
    w: np.ndarray | None = None
    delta: np.ndarray | None = None
    a_prev: np.ndarray | None = None
    psum_in: np.ndarray | None = None
    lr: float | int | None = None

    @model_validator(mode="after")
    def _check_slices(self) -> "TileJob":
        if self.w is not None:
            check_shape(self.w, self.tile_rows, self.tile_cols, "w tile")
        if self.delta is not None:
            check_shape(self.delta, self.tile_rows, self.batch, "delta tile")
        if self.a_prev is not None:
            check_shape(self.a_prev, self.tile_cols, self.batch, "a_prev tile")
        if self.psum_in is not None:
            check_shape(self.psum_in, self.tile_cols, self.batch, "partial-sum tile")
        return self


def _require(job: TileJob, mode: DataflowMode, *operands: str) -> None:
    if job.mode != mode:
        raise ConfigurationError(f"tile job is {job.mode.value}, expected {mode.value}")
    missing = [name for name in operands if getattr(job, name) is None]
    if missing:
        raise DimensionError(f"{mode.value} tile is missing operand slices: {', '.join(missing)}")


def run_tile_ws(job: TileJob) -> tuple[np.ndarray, CycleReport, AccessCounters]:
    """
    Activation-gradient tile with W resident: partial_grad_a[x][n] = sum over
    the tile's y of w[y][x] * delta[y][n] (plus any incoming partial sums).
    Returns:
        tuple: tile_cols x B partial result, cycle report, access counters.
    """
    _require(job, DataflowMode.WS, "w", "delta")
    result = stationary_pass(job.w, job.delta, job.psum_in)
    counters = AccessCounters(
        reads_weight=result.traffic.stationary,
        reads_delta=result.traffic.west,
        reads_partial=result.traffic.partial,
        writes_result=result.traffic.result,
    )
    return result.output, result.cycles, counters


def run_tile_os(job: TileJob) -> tuple[np.ndarray, CycleReport, AccessCounters]:
    """
    Weight-gradient tile with G^T resident, accumulated in place over the batch.
    Returns:
        tuple: tile_cols x tile_rows block of G^T, cycle report, access counters.
    """
    _require(job, DataflowMode.OS, "delta", "a_prev")
    result = output_stationary_pass(job.delta, job.a_prev)
    counters = AccessCounters(
        reads_delta=result.traffic.west,
        reads_activation=result.traffic.north,
        writes_grad=result.traffic.result,
    )
    return result.output, result.cycles, counters


def run_tile_interleaved(
    job: TileJob,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, CycleReport, AccessCounters]:
    """
    Both gradients of one tile on the same PEs, followed by the in-place update.
    G^T never leaves the array; it is returned for inspection only.
    Returns:
        tuple: partial grad_a (tile_cols x B), w_next tile, grad_w_t tile,
            cycle report, access counters.
    Raises:
        ConfigurationError: If the job carries no learning rate.
    """
    if job.mode == DataflowMode.INTERLEAVED and job.lr is None:
        raise ConfigurationError("interleaved tile requires a learning rate")
    _require(job, DataflowMode.INTERLEAVED, "w", "delta", "a_prev")
    result = interleaved_pass(job.w, job.delta, job.a_prev, job.lr, job.psum_in)
    counters = AccessCounters(
        reads_weight=result.traffic.stationary,
        reads_delta=result.traffic.west,
        reads_activation=result.traffic.north,
        reads_partial=result.traffic.partial,
        writes_result=result.traffic.result,
        writes_weight=result.traffic.write_back,
    )
    return result.output, result.extra["w_next"], result.extra["grad_w_t"], result.cycles, counters

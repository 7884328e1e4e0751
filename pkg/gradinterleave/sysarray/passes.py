"""
Cycle-stepped tile passes of the three kernels the grid supports.

Each pass reports its phases and the words that crossed each array edge; the
callers in tiles.py name those edges after the operands they carry.
"""

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from gradinterleave.models.report_models import CycleReport
from gradinterleave.sysarray.pe_grid import PEGrid, edge_feed


class EdgeTraffic(BaseModel):
    """
    Word counts per array edge for one pass, incremented as words cross.
    """
    stationary: int = 0
    west: int = 0
    north: int = 0
    partial: int = 0
    result: int = 0
    write_back: int = 0


class PassResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    output: np.ndarray
    cycles: CycleReport
    traffic: EdgeTraffic
    extra: dict[str, np.ndarray] = Field(default_factory=dict)


def _dtype(*operands: np.ndarray | None):
    return np.result_type(*[op for op in operands if op is not None])


def _collect_bottom(grid: PEGrid, sample: np.ndarray, out: np.ndarray, mask: np.ndarray) -> int:
    """
    Copy bottom-row pipe_south values into out[x][sample] where mask holds.
    """
    cols = np.nonzero(mask)[0]
    out[cols, sample[cols]] = grid.pipe_south[-1, cols]
    return len(cols)


def stationary_pass(stationary: np.ndarray, stream: np.ndarray, psum_in: np.ndarray | None = None) -> PassResult:
    """
    One operand resident, the other streamed from the west, partial sums south.

    out[h][t] = psum_in[h][t] + sum over k of stationary[k][h] * stream[k][t],
    accumulated top row first.
    Args:
        stationary (np.ndarray): K x H block loaded into the PEs.
        stream (np.ndarray): K x T block entering the west edge, row k on lane k.
        psum_in (np.ndarray, optional): H x T partial sums from a previous
            row-tile, entering the north edge.
    Returns:
        PassResult: H x T output with load/compute/drain phases.
    """
    k, h = stationary.shape
    t = stream.shape[1]
    dtype = _dtype(stationary, stream, psum_in)
    grid = PEGrid(k, h, dtype)
    traffic = EdgeTraffic()

    load = grid.load_stationary(stationary)
    traffic.stationary += k * h

    out = np.zeros((h, t), dtype=dtype)
    lanes = np.arange(h)
    span = t + (h - 1) + (k - 1)
    for cycle in range(span):
        west_edge, _, fresh = edge_feed(stream, cycle)
        traffic.west += int(fresh.sum())
        if psum_in is not None:
            north_edge, _, fresh_psum = edge_feed(psum_in, cycle)
            traffic.partial += int(fresh_psum.sum())
        else:
            north_edge = np.zeros(h, dtype=dtype)
        west_in, north_in = grid.shift(west_edge, north_edge)
        grid.pipe_west = west_in
        grid.pipe_south = north_in + west_in * grid.w_stationary
        sample = cycle - lanes - (k - 1)
        traffic.result += _collect_bottom(grid, sample, out, (sample >= 0) & (sample < t))

    cycles = CycleReport(load_cycles=load, compute_cycles=t, drain_cycles=(h - 1) + (k - 1))
    logger.debug("stationary pass {}x{} T={}: {} cycles", k, h, t, cycles.total_cycles)
    return PassResult(output=out, cycles=cycles, traffic=traffic)


def output_stationary_pass(west: np.ndarray, north: np.ndarray) -> PassResult:
    """
    Outputs resident; both operands stream in, west along rows and north along columns.

    PE(x, y) accumulates sum over k of west[y][k] * north[x][k] in ascending k,
    then the tile is shifted out one row per cycle.
    Args:
        west (np.ndarray): V x K block, row v enters lane v of the west edge.
        north (np.ndarray): H x K block, row h enters column h of the north edge.
    Returns:
        PassResult: H x V output (out[x][y]).
    """
    v, depth = west.shape
    h = north.shape[0]
    dtype = _dtype(west, north)
    grid = PEGrid(v, h, dtype)
    traffic = EdgeTraffic()

    span = depth + (h - 1) + (v - 1)
    for cycle in range(span):
        west_edge, _, fresh_west = edge_feed(west, cycle)
        north_edge, _, fresh_north = edge_feed(north, cycle)
        traffic.west += int(fresh_west.sum())
        traffic.north += int(fresh_north.sum())
        west_in, north_in = grid.shift(west_edge, north_edge)
        grid.g_accum += west_in * north_in
        grid.pipe_west = west_in
        grid.pipe_south = north_in

    out = grid.g_accum.T.copy()
    traffic.result += v * h
    cycles = CycleReport(compute_cycles=depth, drain_cycles=(h - 1) + (v - 1), unload_cycles=v)
    logger.debug("output-stationary pass {}x{} K={}: {} cycles", v, h, depth, cycles.total_cycles)
    return PassResult(output=out, cycles=cycles, traffic=traffic)


def interleaved_pass(
    weights: np.ndarray,
    delta: np.ndarray,
    a_prev: np.ndarray,
    lr: float | int,
    psum_in: np.ndarray | None = None,
) -> PassResult:
    """
    Weight-stationary and output-stationary work alternating cycle by cycle.

    delta[y][n] enters lane y of the west edge and is held for two cycles, so
    each word is read once and used twice. The vertical links alternate: on
    even local cycles they carry a[x][n] and the PE accumulates delta * a into
    g_accum; on odd local cycles they carry the running result and the PE adds
    delta * w. After the last sample the PE updates its weight in place,
    w <- w - lr * g_accum.
    Args:
        weights (np.ndarray): Tile of W, rows y x cols x.
        delta (np.ndarray): Matching rows of delta, rows y x B.
        a_prev (np.ndarray): Matching rows of a_prev, cols x x B.
        lr (float | int): Learning rate applied in the update cycle.
        psum_in (np.ndarray, optional): cols x B partial W^T delta from the
            previous row-tile.
    Returns:
        PassResult: cols x B partial W^T delta; extra holds w_next (rows x cols)
            and grad_w_t (cols x rows).
    """
    k, h = weights.shape
    batch = delta.shape[1]
    dtype = _dtype(weights, delta, a_prev, psum_in)
    grid = PEGrid(k, h, dtype)
    traffic = EdgeTraffic()

    load = grid.load_stationary(weights)
    traffic.stationary += k * h

    out = np.zeros((h, batch), dtype=dtype)
    lanes = np.arange(h)
    span = 2 * batch + (h - 1) + (k - 1)
    for cycle in range(span):
        west_edge, _, fresh_delta = edge_feed(delta, cycle, stretch=2)
        traffic.west += int(fresh_delta.sum())

        a_edge, a_valid, _ = edge_feed(a_prev, cycle, stretch=2)
        even_lane = a_valid & ((cycle - lanes) % 2 == 0)
        odd_lane = a_valid & ~even_lane
        traffic.north += int(even_lane.sum())
        if psum_in is not None:
            psum_edge, _, _ = edge_feed(psum_in, cycle, stretch=2)
            traffic.partial += int(odd_lane.sum())
        else:
            psum_edge = np.zeros(h, dtype=dtype)
        north_edge = np.where(even_lane, a_edge, np.where(odd_lane, psum_edge, 0)).astype(dtype, copy=False)

        west_in, north_in = grid.shift(west_edge, north_edge)
        tau = grid.local_time(cycle)
        active = (tau >= 0) & (tau < 2 * batch)
        even = active & (tau % 2 == 0)
        odd = active & (tau % 2 == 1)

        grid.g_accum += np.where(even, west_in * north_in, 0).astype(dtype, copy=False)
        grid.pipe_south = np.where(
            even, north_in, np.where(odd, north_in + west_in * grid.w_stationary, 0)
        ).astype(dtype, copy=False)
        grid.pipe_west = west_in

        bottom_tau = cycle - lanes - (k - 1)
        bottom_odd = (bottom_tau >= 0) & (bottom_tau < 2 * batch) & (bottom_tau % 2 == 1)
        traffic.result += _collect_bottom(grid, bottom_tau // 2, out, bottom_odd)

    grid.w_stationary = grid.w_stationary - lr * grid.g_accum
    traffic.write_back += k * h

    cycles = CycleReport(
        load_cycles=load,
        compute_cycles=2 * batch,
        drain_cycles=(h - 1) + (k - 1),
        update_cycles=1,
    )
    logger.debug("interleaved pass {}x{} B={}: {} cycles", k, h, batch, cycles.total_cycles)
    return PassResult(
        output=out,
        cycles=cycles,
        traffic=traffic,
        extra={"w_next": grid.w_stationary, "grad_w_t": grid.g_accum.T.copy()},
    )

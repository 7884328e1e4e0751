"""
Layer-level driver: splits a layer into array-sized tiles, runs them serially
and aggregates results, cycles and counters.
"""

import math

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from gradinterleave.core.matrix import check_shape, frozen
from gradinterleave.errors import ConfigurationError, DimensionError
from gradinterleave.models.core_models import ArrayGeometry, DataflowMode, LayerShape
from gradinterleave.models.report_models import AccessCounters, CycleReport, PassCost
from gradinterleave.models.train_models import TrainStepInputs, TrainStepOutputs
from gradinterleave.sysarray.passes import output_stationary_pass, stationary_pass
from gradinterleave.sysarray.tiles import TileJob, run_tile_interleaved, run_tile_os, run_tile_ws


class LayerRun(BaseModel):
    """
    Outputs of a simulated layer step with its aggregate and per-pass costs.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    outputs: TrainStepOutputs
    cycles: CycleReport
    accesses: AccessCounters
    passes: dict[str, PassCost] = Field(default_factory=dict)


def tile_spans(extent: int, size: int) -> list[tuple[int, int]]:
    """
    Split [0, extent) into consecutive (start, stop) spans of at most size.
    """
    return [(start, min(start + size, extent)) for start in range(0, extent, size)]


def elementwise_cycles(elements: int, geom: ArrayGeometry) -> int:
    return math.ceil(elements / geom.pe_count)


def hadamard_pass(grad_a: np.ndarray, fprime_z_prev: np.ndarray, geom: ArrayGeometry) -> tuple[np.ndarray, PassCost]:
    """
    delta_prev = grad_a (Hadamard) f'(z_prev) on the elementwise engine:
    read grad_a, read f', write delta_prev.
    """
    check_shape(fprime_z_prev, *grad_a.shape, "fprime_z_prev")
    words = grad_a.size
    cost = PassCost(
        cycles=CycleReport(compute_cycles=elementwise_cycles(words, geom)),
        accesses=AccessCounters(reads_partial=words, reads_activation=words, writes_result=words),
    )
    return frozen(grad_a * fprime_z_prev), cost


def update_pass(w: np.ndarray, grad_w_t: np.ndarray, lr: float | int, geom: ArrayGeometry) -> tuple[np.ndarray, PassCost]:
    """
    Separate SGD pass: read G, read W, write W for every weight element.
    """
    check_shape(grad_w_t, w.shape[1], w.shape[0], "grad_w_t")
    words = w.size
    cost = PassCost(
        cycles=CycleReport(update_cycles=elementwise_cycles(words, geom)),
        accesses=AccessCounters(reads_grad=words, reads_weight=words, writes_weight=words),
    )
    return frozen(w - lr * grad_w_t.T), cost


def _backward_delta_ws(inputs: TrainStepInputs, geom: ArrayGeometry) -> tuple[np.ndarray, PassCost]:
    n_out, m_in = inputs.w.shape
    batch = inputs.delta.shape[1]
    grad_a = np.zeros((m_in, batch), dtype=np.result_type(inputs.w, inputs.delta))
    cost = PassCost()
    for x0, x1 in tile_spans(m_in, geom.p):
        partial = None
        for y0, y1 in tile_spans(n_out, geom.q):
            job = TileJob(
                mode=DataflowMode.WS,
                tile_rows=y1 - y0,
                tile_cols=x1 - x0,
                batch=batch,
                w=inputs.w[y0:y1, x0:x1],
                delta=inputs.delta[y0:y1],
                psum_in=partial,
            )
            partial, cycles, counters = run_tile_ws(job)
            cost += PassCost(cycles=cycles, accesses=counters)
        grad_a[x0:x1] = partial
    return frozen(grad_a), cost


def _backward_gradw_os(inputs: TrainStepInputs, geom: ArrayGeometry) -> tuple[np.ndarray, PassCost]:
    n_out, m_in = inputs.w.shape
    batch = inputs.delta.shape[1]
    grad_w_t = np.zeros((m_in, n_out), dtype=np.result_type(inputs.a_prev, inputs.delta))
    cost = PassCost()
    for x0, x1 in tile_spans(m_in, geom.p):
        for y0, y1 in tile_spans(n_out, geom.q):
            job = TileJob(
                mode=DataflowMode.OS,
                tile_rows=y1 - y0,
                tile_cols=x1 - x0,
                batch=batch,
                delta=inputs.delta[y0:y1],
                a_prev=inputs.a_prev[x0:x1],
            )
            block, cycles, counters = run_tile_os(job)
            grad_w_t[x0:x1, y0:y1] = block
            cost += PassCost(cycles=cycles, accesses=counters)
    return frozen(grad_w_t), cost


def _fused_backward(inputs: TrainStepInputs, geom: ArrayGeometry) -> tuple[np.ndarray, np.ndarray, np.ndarray, PassCost]:
    n_out, m_in = inputs.w.shape
    batch = inputs.delta.shape[1]
    grad_a = np.zeros((m_in, batch), dtype=np.result_type(inputs.w, inputs.delta))
    grad_w_t = np.zeros((m_in, n_out), dtype=np.result_type(inputs.a_prev, inputs.delta))
    w_next = np.zeros((n_out, m_in), dtype=np.result_type(inputs.w, inputs.a_prev, inputs.delta, inputs.lr))
    cost = PassCost()
    for x0, x1 in tile_spans(m_in, geom.p):
        partial = None
        for y0, y1 in tile_spans(n_out, geom.q):
            job = TileJob(
                mode=DataflowMode.INTERLEAVED,
                tile_rows=y1 - y0,
                tile_cols=x1 - x0,
                batch=batch,
                w=inputs.w[y0:y1, x0:x1],
                delta=inputs.delta[y0:y1],
                a_prev=inputs.a_prev[x0:x1],
                psum_in=partial,
                lr=inputs.lr,
            )
            partial, w_tile, g_tile, cycles, counters = run_tile_interleaved(job)
            w_next[y0:y1, x0:x1] = w_tile
            grad_w_t[x0:x1, y0:y1] = g_tile
            cost += PassCost(cycles=cycles, accesses=counters)
        grad_a[x0:x1] = partial
    return frozen(grad_a), frozen(grad_w_t), frozen(w_next), cost


def run_forward(geom: ArrayGeometry, mode: DataflowMode, w: np.ndarray, a_prev: np.ndarray) -> tuple[np.ndarray, PassCost]:
    """
    Forward product z = W a_prev on the grid in one of the traditional dataflows.

    WS keeps W resident (reduction over input neurons runs down the columns),
    OS keeps z resident, IS keeps a_prev resident and streams the rows of W.
    Raises:
        DimensionError: If W.cols differs from a_prev.rows.
        ConfigurationError: For the interleaved mode, which has no forward kernel.
    """
    if w.shape[1] != a_prev.shape[0]:
        raise DimensionError(f"forward needs W.cols == a_prev.rows, got {w.shape} and {a_prev.shape}")
    n_out, m_in = w.shape
    batch = a_prev.shape[1]
    z = np.zeros((n_out, batch), dtype=np.result_type(w, a_prev))
    cost = PassCost()
    if mode == DataflowMode.WS:
        for y0, y1 in tile_spans(n_out, geom.p):
            partial = None
            for x0, x1 in tile_spans(m_in, geom.q):
                result = stationary_pass(w[y0:y1, x0:x1].T, a_prev[x0:x1], partial)
                partial = result.output
                cost += PassCost(cycles=result.cycles, accesses=AccessCounters(
                    reads_weight=result.traffic.stationary,
                    reads_activation=result.traffic.west,
                    reads_partial=result.traffic.partial,
                    writes_result=result.traffic.result,
                ))
            z[y0:y1] = partial
    elif mode == DataflowMode.OS:
        for y0, y1 in tile_spans(n_out, geom.q):
            for n0, n1 in tile_spans(batch, geom.p):
                result = output_stationary_pass(w[y0:y1], a_prev[:, n0:n1].T)
                z[y0:y1, n0:n1] = result.output.T
                cost += PassCost(cycles=result.cycles, accesses=AccessCounters(
                    reads_weight=result.traffic.west,
                    reads_activation=result.traffic.north,
                    writes_result=result.traffic.result,
                ))
    elif mode == DataflowMode.IS:
        for n0, n1 in tile_spans(batch, geom.p):
            partial = None
            for x0, x1 in tile_spans(m_in, geom.q):
                result = stationary_pass(a_prev[x0:x1, n0:n1], w[:, x0:x1].T, partial)
                partial = result.output
                cost += PassCost(cycles=result.cycles, accesses=AccessCounters(
                    reads_activation=result.traffic.stationary,
                    reads_weight=result.traffic.west,
                    reads_partial=result.traffic.partial,
                    writes_result=result.traffic.result,
                ))
            z[:, n0:n1] = partial.T
    else:
        raise ConfigurationError("the forward pass has no interleaved kernel; use a traditional dataflow")
    return frozen(z), cost


def run_layer(
    shape: LayerShape,
    geom: ArrayGeometry,
    mode: DataflowMode,
    inputs: TrainStepInputs,
) -> LayerRun:
    """
    Simulate one layer step in the given mode.

    WS runs the activation-gradient pass and the Hadamard pass; OS runs the
    weight-gradient pass and the separate update pass, so WS + OS is the full
    traditional step. IS runs the forward product (the forward-only
    baseline). INTERLEAVED runs the fused tiles and the Hadamard pass.
    Raises:
        DimensionError: If the inputs do not have the given shape.
        ConfigurationError: If a learning rate is needed and missing.
    """
    if inputs.shape != shape:
        raise DimensionError(f"inputs have shape {inputs.shape}, expected {shape}")
    passes: dict[str, PassCost] = {}
    if mode == DataflowMode.WS:
        grad_a, passes["backward_delta"] = _backward_delta_ws(inputs, geom)
        delta_prev, passes["hadamard"] = hadamard_pass(grad_a, inputs.fprime_z_prev, geom)
        outputs = TrainStepOutputs(grad_a=grad_a, delta_prev=delta_prev)
    elif mode == DataflowMode.OS:
        if inputs.lr is None:
            raise ConfigurationError("the update pass requires a learning rate")
        grad_w_t, passes["backward_gradw"] = _backward_gradw_os(inputs, geom)
        w_next, passes["update"] = update_pass(inputs.w, grad_w_t, inputs.lr, geom)
        outputs = TrainStepOutputs(grad_w_t=grad_w_t, w_next=w_next)
    elif mode == DataflowMode.IS:
        z, passes["forward"] = run_forward(geom, DataflowMode.IS, inputs.w, inputs.a_prev)
        outputs = TrainStepOutputs(z=z)
    else:
        if inputs.lr is None:
            raise ConfigurationError("interleaved mode requires a learning rate")
        grad_a, grad_w_t, w_next, passes["fused_backward"] = _fused_backward(inputs, geom)
        delta_prev, passes["hadamard"] = hadamard_pass(grad_a, inputs.fprime_z_prev, geom)
        outputs = TrainStepOutputs(grad_a=grad_a, delta_prev=delta_prev, grad_w_t=grad_w_t, w_next=w_next)

    total = PassCost()
    for cost in passes.values():
        total += cost
    logger.info(
        "simulated {} layer {}x{} B={} on {}x{}: {} cycles, {} accesses",
        mode.value, shape.n_out, shape.m_in, shape.batch, geom.p, geom.q,
        total.cycles.total_cycles, total.accesses.total,
    )
    return LayerRun(outputs=outputs, cycles=total.cycles, accesses=total.accesses, passes=passes)


def run_separate(shape: LayerShape, geom: ArrayGeometry, inputs: TrainStepInputs) -> LayerRun:
    """
    The full traditional step: the WS run followed by the OS run.
    """
    ws_run = run_layer(shape, geom, DataflowMode.WS, inputs)
    os_run = run_layer(shape, geom, DataflowMode.OS, inputs)
    outputs = TrainStepOutputs(
        grad_a=ws_run.outputs.grad_a,
        delta_prev=ws_run.outputs.delta_prev,
        grad_w_t=os_run.outputs.grad_w_t,
        w_next=os_run.outputs.w_next,
    )
    return LayerRun(
        outputs=outputs,
        cycles=ws_run.cycles + os_run.cycles,
        accesses=ws_run.accesses + os_run.accesses,
        passes={**ws_run.passes, **os_run.passes},
    )

"""
Closed-form cycle and SRAM-access model for every dataflow and step.

The formulas mirror the simulator's cycle model exactly:

    stationary tile (WS/IS):  k (load) + T (stream) + (h-1)+(k-1) (fill/drain)
    output-stationary tile:   K (stream) + (h-1)+(v-1) (fill/drain) + v (unload)
    interleaved tile:         k (load) + 2B (two phases per sample)
                              + (h-1)+(k-1) (drain) + 1 (in-PE update)
    elementwise pass:         ceil(elements / (P*Q))

where k/v are tile rows (at most Q) and h tile columns (at most P). Sums run
over the at most four tile-size classes, so the forms also hold for dimensions
the array size does not divide.
"""

import math

from loguru import logger
from pydantic import BaseModel, ConfigDict, computed_field

from gradinterleave.errors import ConfigurationError
from gradinterleave.models.core_models import ArrayGeometry, DataflowMode, LayerShape, StepKind
from gradinterleave.models.report_models import AccessCounters, CostEstimate, CycleReport


class Saving(BaseModel):
    """
    A savings term in both readings: the literal floor expression and the
    per-word count the simulator's counters verify.
    """
    model_config = ConfigDict(frozen=True)

    name: str
    floor_expression: int
    first_principles: int

    @computed_field
    @property
    def discrepancy(self) -> bool:
        return self.floor_expression != self.first_principles


def _tiles(extent: int, size: int) -> int:
    return math.ceil(extent / size)


def _fill_drain(rows: int, row_size: int, cols: int, col_size: int) -> int:
    """
    Sum over all tiles of (h-1) + (k-1).
    """
    row_tiles, col_tiles = _tiles(rows, row_size), _tiles(cols, col_size)
    return row_tiles * (cols - col_tiles) + col_tiles * (rows - row_tiles)


def _stationary_kernel(k_extent: int, h_extent: int, stream: int, geom: ArrayGeometry) -> tuple[CycleReport, dict, list]:
    """
    Resident K x H operand (K down the Q rows, H across the P columns),
    T-long stream from the west.
    """
    row_tiles, col_tiles = _tiles(k_extent, geom.q), _tiles(h_extent, geom.p)
    tiles = row_tiles * col_tiles
    cycles = CycleReport(
        load_cycles=k_extent * col_tiles,
        compute_cycles=stream * tiles,
        drain_cycles=_fill_drain(k_extent, geom.q, h_extent, geom.p),
    )
    edges = {
        "stationary": k_extent * h_extent,
        "west": k_extent * stream * col_tiles,
        "partial": h_extent * stream * (row_tiles - 1),
        "result": h_extent * stream * row_tiles,
    }
    trace = [("tiles", tiles), ("row_tiles", row_tiles), ("col_tiles", col_tiles)]
    return cycles, edges, trace


def _output_stationary_kernel(v_extent: int, h_extent: int, depth: int, geom: ArrayGeometry) -> tuple[CycleReport, dict, list]:
    """
    Resident V x H outputs (V down the Q rows, H across the P columns), reduction depth K.
    """
    row_tiles, col_tiles = _tiles(v_extent, geom.q), _tiles(h_extent, geom.p)
    tiles = row_tiles * col_tiles
    cycles = CycleReport(
        compute_cycles=depth * tiles,
        drain_cycles=_fill_drain(v_extent, geom.q, h_extent, geom.p),
        unload_cycles=v_extent * col_tiles,
    )
    edges = {
        "west": v_extent * depth * col_tiles,
        "north": h_extent * depth * row_tiles,
        "result": v_extent * h_extent,
    }
    trace = [("tiles", tiles), ("row_tiles", row_tiles), ("col_tiles", col_tiles)]
    return cycles, edges, trace


def _elementwise(elements: int, geom: ArrayGeometry) -> int:
    return math.ceil(elements / geom.pe_count)


def _forward(shape: LayerShape, geom: ArrayGeometry, mode: DataflowMode) -> CostEstimate:
    n_out, m_in, batch = shape.n_out, shape.m_in, shape.batch
    if mode == DataflowMode.WS:
        cycles, edges, trace = _stationary_kernel(m_in, n_out, batch, geom)
        accesses = AccessCounters(
            reads_weight=edges["stationary"],
            reads_activation=edges["west"],
            reads_partial=edges["partial"],
            writes_result=edges["result"],
        )
    elif mode == DataflowMode.OS:
        cycles, edges, trace = _output_stationary_kernel(n_out, batch, m_in, geom)
        accesses = AccessCounters(
            reads_weight=edges["west"],
            reads_activation=edges["north"],
            writes_result=edges["result"],
        )
    else:
        cycles, edges, trace = _stationary_kernel(m_in, batch, n_out, geom)
        accesses = AccessCounters(
            reads_activation=edges["stationary"],
            reads_weight=edges["west"],
            reads_partial=edges["partial"],
            writes_result=edges["result"],
        )
    return CostEstimate(cycles=cycles, accesses=accesses, formula_trace=[(f"forward_{mode.value}", 1), *trace])


def best_forward_mode(shape: LayerShape, geom: ArrayGeometry) -> DataflowMode:
    """
    Traditional dataflow with the fewest forward cycles; ties go to the earlier
    of WS, OS, IS.
    """
    return min(DataflowMode.baselines(), key=lambda mode: _forward(shape, geom, mode).cycles.total_cycles)


def _backward_delta(shape: LayerShape, geom: ArrayGeometry) -> CostEstimate:
    cycles, edges, trace = _stationary_kernel(shape.n_out, shape.m_in, shape.batch, geom)
    accesses = AccessCounters(
        reads_weight=edges["stationary"],
        reads_delta=edges["west"],
        reads_partial=edges["partial"],
        writes_result=edges["result"],
    )
    return CostEstimate(cycles=cycles, accesses=accesses, formula_trace=trace)


def _backward_gradw(shape: LayerShape, geom: ArrayGeometry) -> CostEstimate:
    cycles, edges, trace = _output_stationary_kernel(shape.n_out, shape.m_in, shape.batch, geom)
    accesses = AccessCounters(
        reads_delta=edges["west"],
        reads_activation=edges["north"],
        writes_grad=edges["result"],
    )
    return CostEstimate(cycles=cycles, accesses=accesses, formula_trace=trace)


def _fused_backward(shape: LayerShape, geom: ArrayGeometry) -> CostEstimate:
    n_out, m_in, batch = shape.n_out, shape.m_in, shape.batch
    row_tiles, col_tiles = _tiles(n_out, geom.q), _tiles(m_in, geom.p)
    tiles = row_tiles * col_tiles
    cycles = CycleReport(
        load_cycles=n_out * col_tiles,
        compute_cycles=2 * batch * tiles,
        drain_cycles=_fill_drain(n_out, geom.q, m_in, geom.p),
        update_cycles=tiles,
    )
    accesses = AccessCounters(
        reads_weight=n_out * m_in,
        reads_delta=n_out * batch * col_tiles,
        reads_activation=m_in * batch * row_tiles,
        reads_partial=m_in * batch * (row_tiles - 1),
        writes_result=m_in * batch * row_tiles,
        writes_weight=n_out * m_in,
    )
    delta_term = delta_reuse_saving(shape, geom)
    inplace_term = inplace_update_saving(shape, geom)
    trace = [
        ("tiles", tiles),
        ("row_tiles", row_tiles),
        ("col_tiles", col_tiles),
        ("phases_per_sample", 2),
        ("floor_delta_reuse", delta_term.floor_expression),
        ("delta_reuse_words", delta_term.first_principles),
        ("floor_inplace_update", inplace_term.floor_expression),
        ("inplace_update_words", inplace_term.first_principles),
    ]
    return CostEstimate(cycles=cycles, accesses=accesses, formula_trace=trace)


def _update(shape: LayerShape, geom: ArrayGeometry) -> CostEstimate:
    words = shape.weight_elements
    return CostEstimate(
        cycles=CycleReport(update_cycles=_elementwise(words, geom)),
        accesses=AccessCounters(reads_grad=words, reads_weight=words, writes_weight=words),
        formula_trace=[("update_words", words), ("accesses_per_element", 3)],
    )


def _hadamard(shape: LayerShape, geom: ArrayGeometry) -> CostEstimate:
    words = shape.m_in * shape.batch
    return CostEstimate(
        cycles=CycleReport(compute_cycles=_elementwise(words, geom)),
        accesses=AccessCounters(reads_partial=words, reads_activation=words, writes_result=words),
        formula_trace=[("hadamard_words", words)],
    )


def _activation(shape: LayerShape, geom: ArrayGeometry) -> CostEstimate:
    words = shape.n_out * shape.batch
    return CostEstimate(
        cycles=CycleReport(compute_cycles=_elementwise(words, geom)),
        accesses=AccessCounters(reads_partial=words, writes_result=words),
        formula_trace=[("activation_words", words)],
    )


def estimate(shape: LayerShape, geom: ArrayGeometry, mode: DataflowMode, step_kind: StepKind) -> CostEstimate:
    """
    Closed-form cost of one step of one layer.

    forward accepts every mode; INTERLEAVED replicates the best traditional
    forward. backward_delta runs weight-stationary and backward_gradw
    output-stationary; update is the separate pass of the traditional flow.
    fused_backward is the interleaved step. activation and hadamard are
    mode-independent elementwise passes.
    Raises:
        ConfigurationError: For a mode that cannot run the step.
    """
    if step_kind == StepKind.FORWARD:
        if mode == DataflowMode.INTERLEAVED:
            best = best_forward_mode(shape, geom)
            result = _forward(shape, geom, best)
            return result.model_copy(update={"formula_trace": [("replicates_baseline", 1), *result.formula_trace]})
        return _forward(shape, geom, mode)
    if step_kind in (StepKind.ACTIVATION, StepKind.HADAMARD):
        return _activation(shape, geom) if step_kind == StepKind.ACTIVATION else _hadamard(shape, geom)

    allowed = {
        StepKind.BACKWARD_DELTA: (DataflowMode.WS, _backward_delta),
        StepKind.BACKWARD_GRADW: (DataflowMode.OS, _backward_gradw),
        StepKind.FUSED_BACKWARD: (DataflowMode.INTERLEAVED, _fused_backward),
    }
    if step_kind == StepKind.UPDATE:
        if mode == DataflowMode.INTERLEAVED:
            raise ConfigurationError("the interleaved update happens in-PE inside fused_backward")
        return _update(shape, geom)
    required, builder = allowed[step_kind]
    if mode != required:
        raise ConfigurationError(f"{step_kind.value} requires mode {required.value}, got {mode.value}")
    return builder(shape, geom)


def estimate_layer(shape: LayerShape, geom: ArrayGeometry, mode: DataflowMode) -> CostEstimate:
    """
    Closed-form mirror of sysarray.run_layer's pass composition.
    """
    steps = {
        DataflowMode.WS: (StepKind.BACKWARD_DELTA, StepKind.HADAMARD),
        DataflowMode.OS: (StepKind.BACKWARD_GRADW, StepKind.UPDATE),
        DataflowMode.IS: (StepKind.FORWARD,),
        DataflowMode.INTERLEAVED: (StepKind.FUSED_BACKWARD, StepKind.HADAMARD),
    }[mode]
    total = CostEstimate()
    for step in steps:
        total += estimate(shape, geom, mode, step)
    return total


def estimate_separate(shape: LayerShape, geom: ArrayGeometry) -> CostEstimate:
    """
    Traditional backward step: WS activation-gradient pass, OS weight-gradient
    pass, update pass and Hadamard pass.
    """
    return estimate_layer(shape, geom, DataflowMode.WS) + estimate_layer(shape, geom, DataflowMode.OS)


def estimate_loop(shape: LayerShape, geom: ArrayGeometry, mode: DataflowMode, include_forward: bool = True) -> CostEstimate:
    """
    One training loop of a layer as benchmarked: the forward product in the
    given dataflow followed by the traditional backward step, or for the
    interleaved design the best traditional forward followed by the fused step.
    """
    total = estimate(shape, geom, mode, StepKind.FORWARD) if include_forward else CostEstimate()
    if mode == DataflowMode.INTERLEAVED:
        return total + estimate_layer(shape, geom, DataflowMode.INTERLEAVED)
    return total + estimate_separate(shape, geom)


def delta_reuse_saving(shape: LayerShape, geom: ArrayGeometry) -> Saving:
    """
    Words saved by reading delta once for both gradients: the literal
    B * floor(N/Q) * floor(M/P) and the per-word count, i.e. the delta reads of
    the output-stationary pass, N * B * ceil(M/P).
    """
    floor = shape.batch * (shape.n_out // geom.q) * (shape.m_in // geom.p)
    words = shape.n_out * shape.batch * _tiles(shape.m_in, geom.p)
    if floor != words:
        logger.debug("delta reuse: floor expression {} differs from per-word count {}", floor, words)
    return Saving(name="delta_reuse", floor_expression=floor, first_principles=words)


def inplace_update_saving(shape: LayerShape, geom: ArrayGeometry) -> Saving:
    """
    Words saved by updating weights inside the PEs: the literal
    3 * B * floor(N/P) * floor(M/Q) and the per-element count 3 * N * M
    (store G, reload G, reload W).
    """
    floor = 3 * shape.batch * (shape.n_out // geom.p) * (shape.m_in // geom.q)
    words = 3 * shape.weight_elements
    return Saving(name="inplace_update", floor_expression=floor, first_principles=words)


def best_baseline(
    shape: LayerShape,
    geom: ArrayGeometry,
    metric: str = "cycles",
    access_cost: float = 1.0,
    include_forward: bool = True,
) -> DataflowMode:
    """
    The flexible architecture's choice: the traditional dataflow minimising the
    loop's cycles, or its accesses weighted by a uniform per-access cost.
    Ties go to the earlier of WS, OS, IS.
    """
    def score(mode: DataflowMode) -> float:
        loop = estimate_loop(shape, geom, mode, include_forward)
        if metric == "cycles":
            return loop.cycles.total_cycles
        return access_cost * loop.accesses.total

    return min(DataflowMode.baselines(), key=score)

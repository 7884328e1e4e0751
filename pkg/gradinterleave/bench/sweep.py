"""
Normalized sweeps over layer sizes and batch sizes, on either the closed-form
cost model or the cycle-stepped simulator.
"""

from multiprocessing import Pool

import pandas as pd
from loguru import logger

from gradinterleave import costmodel
from gradinterleave.bench.report import (
    CSV_COLUMNS,
    BenchReport,
    aggregate,
    cost_row,
    normalize,
    sort_rows,
)
from gradinterleave.core.matrix import seeded_matrix
from gradinterleave.errors import ConfigurationError
from gradinterleave.models.config_models import Engine, SweepSpec
from gradinterleave.models.core_models import ArrayGeometry, DataflowMode, LayerShape, ValueClass
from gradinterleave.models.report_models import PassCost
from gradinterleave.models.train_models import TrainStepInputs
from gradinterleave.sysarray.layer import run_forward, run_layer, run_separate

SIMULATION_CAP = 2 ** 22
SIMULATION_SEED = 2019


def simulated_loops(shape: LayerShape, geom: ArrayGeometry) -> dict[DataflowMode, PassCost]:
    """
    Single training-loop costs of every mode from the simulator: the forward
    product in each traditional dataflow followed by the separate backward, and
    the interleaved step behind the cheapest simulated forward.
    Raises:
        ConfigurationError: If N*M*B exceeds the simulation cap.
    """
    if shape.pe_activations > SIMULATION_CAP:
        raise ConfigurationError(
            f"N*M*B = {shape.pe_activations} exceeds the simulation cap of {SIMULATION_CAP}; "
            "use the analytic engine"
        )
    n_out, m_in, batch = shape.n_out, shape.m_in, shape.batch
    inputs = TrainStepInputs(
        w=seeded_matrix(n_out, m_in, SIMULATION_SEED, ValueClass.SMALL_INT),
        a_prev=seeded_matrix(m_in, batch, SIMULATION_SEED + 1, ValueClass.SMALL_INT),
        delta=seeded_matrix(n_out, batch, SIMULATION_SEED + 2, ValueClass.SMALL_INT),
        fprime_z_prev=seeded_matrix(m_in, batch, SIMULATION_SEED + 3, ValueClass.SMALL_INT),
        lr=1,
    )
    forwards = {
        mode: run_forward(geom, mode, inputs.w, inputs.a_prev)[1]
        for mode in DataflowMode.baselines()
    }
    separate = run_separate(shape, geom, inputs)
    backward = PassCost(cycles=separate.cycles, accesses=separate.accesses)
    loops = {mode: forwards[mode] + backward for mode in DataflowMode.baselines()}

    best = min(DataflowMode.baselines(), key=lambda mode: forwards[mode].cycles.total_cycles)
    fused = run_layer(shape, geom, DataflowMode.INTERLEAVED, inputs)
    loops[DataflowMode.INTERLEAVED] = forwards[best] + PassCost(cycles=fused.cycles, accesses=fused.accesses)
    return loops


def analytic_loops(shape: LayerShape, geom: ArrayGeometry) -> dict[DataflowMode, PassCost]:
    loops = {}
    for mode in DataflowMode:
        estimate = costmodel.estimate_loop(shape, geom, mode)
        loops[mode] = PassCost(cycles=estimate.cycles, accesses=estimate.accesses)
    return loops


def evaluate_point(shape: LayerShape, geom: ArrayGeometry, engine: Engine, modes: list[DataflowMode]) -> list[dict]:
    loops = simulated_loops(shape, geom) if engine == Engine.SIMULATED else analytic_loops(shape, geom)
    return [cost_row(shape, geom, mode.value, loops[mode].cycles, loops[mode].accesses) for mode in modes]


def _evaluate_args(args: tuple) -> list[dict]:
    return evaluate_point(*args)


def run_sweep(spec: SweepSpec, engine: Engine = Engine.ANALYTIC, workers: int = 1) -> BenchReport:
    """
    Evaluate every (size, batch) point of the sweep in every requested mode.

    Rows are normalized per configuration to spec.normalize_to; aggregates are
    means across batches per size, normalized after averaging. Row order
    depends only on the configuration keys, so worker count never changes the
    output.
    Args:
        spec (SweepSpec): Sizes, batches, geometry, modes and reference mode.
        engine (Engine): Closed forms or the cycle-stepped simulator.
        workers (int): Processes evaluating points in parallel.
    Returns:
        BenchReport: The sweep table and its per-size aggregates.
    Raises:
        ConfigurationError: If a simulated point exceeds the simulation cap.
    """
    points = [
        (LayerShape(n_out=n, m_in=m, batch=batch), spec.geom, engine, list(spec.modes))
        for n, m in spec.sizes
        for batch in spec.batches
    ]
    if engine == Engine.SIMULATED:
        for shape, *_ in points:
            if shape.pe_activations > SIMULATION_CAP:
                raise ConfigurationError(
                    f"{shape.n_out}x{shape.m_in} B={shape.batch} exceeds the simulation cap "
                    f"of {SIMULATION_CAP} PE activations; use the analytic engine"
                )
    if workers > 1:
        with Pool(workers) as pool:
            results = pool.map(_evaluate_args, points)
    else:
        results = [_evaluate_args(point) for point in points]

    rows = pd.DataFrame([row for point_rows in results for row in point_rows], columns=CSV_COLUMNS[:-2])
    rows = normalize(sort_rows(rows), spec.normalize_to.value)[CSV_COLUMNS]
    logger.info("{} sweep: {} points, {} rows", engine.value, len(points), len(rows))
    return BenchReport(
        kind="sweep",
        config={"spec": spec.model_dump(mode="json"), "engine": engine.value},
        normalize_to=spec.normalize_to.value,
        rows=rows,
        aggregates=aggregate(rows, spec.normalize_to.value),
    )

"""
Tests for the cycle-stepped PE-grid simulator: tile kernels, layer tiling,
numeric equivalence with the golden equations, cycle model and counters.
"""

import numpy as np
import pydantic
import pytest

from gradinterleave import golden
from gradinterleave.core.matrix import seeded_matrix
from gradinterleave.errors import ConfigurationError, DimensionError
from gradinterleave.models.core_models import ActivationKind, ArrayGeometry, DataflowMode, LayerShape, Precision, ValueClass
from gradinterleave.models.report_models import AccessCounters
from gradinterleave.models.train_models import TrainStepInputs
from gradinterleave.sysarray import (
    TileJob,
    run_forward,
    run_layer,
    run_separate,
    run_tile_interleaved,
    run_tile_os,
    run_tile_ws,
    tile_spans,
)
from gradinterleave.sysarray.passes import EdgeTraffic, interleaved_pass, stationary_pass
from tests.utils import data_generators


# --- Helpers & Constants ---

ORACLE_CONFIGS = data_generators.build_layer_configs(200, seed=2019)
# Random layers with N, M in 2..32, B in 1..8 and P, Q in {2, 4, 8}.
# Every config runs through all three backward pipelines.

F64_CONFIGS = data_generators.build_layer_configs(20, seed=77, max_dim=16)

DOMINANCE_CONFIGS = [
    (1, 1, 1, 1, 1),
    (2, 2, 3, 2, 2),
    (8, 8, 4, 4, 4),
    (5, 7, 2, 4, 2),
    (16, 4, 8, 2, 8),
]  # (N, M, B, P, Q), including a single-PE array and ragged tiles.

FORWARD_MODES = [DataflowMode.WS, DataflowMode.OS, DataflowMode.IS]

BACKWARD_MODES = [DataflowMode.WS, DataflowMode.OS, DataflowMode.INTERLEAVED]


def ints(rows, cols, seed):
    return seeded_matrix(rows, cols, seed, ValueClass.SMALL_INT)


def assert_outputs_match(simulated, reference, label):
    for name in ("grad_a", "delta_prev", "grad_w_t", "w_next"):
        ours = getattr(simulated, name)
        if ours is None:
            continue
        theirs = getattr(reference, name)
        assert ours.dtype == theirs.dtype, f"{label}: {name} dtype {ours.dtype} vs {theirs.dtype}"
        assert np.array_equal(ours, theirs), f"{label}: {name} differs from golden"


# --- Tests for single tiles ---

def test_ws_tile_identity():
    job = TileJob(
        mode=DataflowMode.WS, tile_rows=2, tile_cols=2, batch=1,
        w=np.eye(2, dtype=np.int64), delta=np.array([[1], [2]]),
    )
    partial, _, counters = run_tile_ws(job)
    assert np.array_equal(partial, [[1], [2]]), f"Got {partial.tolist()}"
    assert counters == AccessCounters(reads_weight=4, reads_delta=2, writes_result=2)


def test_ws_tile_cycle_model():
    job = TileJob(mode=DataflowMode.WS, tile_rows=2, tile_cols=2, batch=3, w=ints(2, 2, 1), delta=ints(2, 3, 2))
    _, cycles, _ = run_tile_ws(job)
    assert cycles.total_cycles == 2 + 3 + 1 + 1, f"Got {cycles}"
    assert (cycles.load_cycles, cycles.compute_cycles, cycles.drain_cycles) == (2, 3, 2)


def test_ws_tile_matches_golden():
    w, delta = ints(4, 4, 3), ints(4, 5, 4)
    job = TileJob(mode=DataflowMode.WS, tile_rows=4, tile_cols=4, batch=5, w=w, delta=delta)
    partial, _, _ = run_tile_ws(job)
    expected, _ = golden.backprop_delta(w, delta, np.ones((4, 5), dtype=np.int64))
    assert np.array_equal(partial, expected)


def test_os_tile_outer_product():
    job = TileJob(
        mode=DataflowMode.OS, tile_rows=2, tile_cols=2, batch=1,
        delta=np.array([[1], [2]]), a_prev=np.array([[3], [4]]),
    )
    block, _, counters = run_tile_os(job)
    assert np.array_equal(block, [[3, 6], [4, 8]]), f"Got {block.tolist()}"
    assert counters == AccessCounters(reads_delta=2, reads_activation=2, writes_grad=4)


def test_os_tile_cycle_model():
    job = TileJob(mode=DataflowMode.OS, tile_rows=2, tile_cols=2, batch=3, delta=ints(2, 3, 1), a_prev=ints(2, 3, 2))
    _, cycles, _ = run_tile_os(job)
    assert cycles.total_cycles == 3 + 1 + 1 + 2, f"Got {cycles}"
    assert cycles.unload_cycles == 2


def test_os_tile_matches_golden():
    delta, a_prev = ints(4, 6, 5), ints(3, 6, 6)
    job = TileJob(mode=DataflowMode.OS, tile_rows=4, tile_cols=3, batch=6, delta=delta, a_prev=a_prev)
    block, _, _ = run_tile_os(job)
    assert np.array_equal(block, golden.weight_grad_t(a_prev, delta))


def test_interleaved_tile_zero_delta():
    w = ints(3, 3, 1)
    job = TileJob(
        mode=DataflowMode.INTERLEAVED, tile_rows=3, tile_cols=3, batch=2,
        w=w, delta=np.zeros((3, 2), dtype=np.int64), a_prev=ints(3, 2, 2), lr=1,
    )
    partial, w_next, grad_w_t, _, _ = run_tile_interleaved(job)
    assert not partial.any()
    assert not grad_w_t.any()
    assert np.array_equal(w_next, w)


def test_interleaved_tile_cycle_model():
    job = TileJob(
        mode=DataflowMode.INTERLEAVED, tile_rows=2, tile_cols=2, batch=3,
        w=ints(2, 2, 1), delta=ints(2, 3, 2), a_prev=ints(2, 3, 3), lr=1,
    )
    _, _, _, cycles, counters = run_tile_interleaved(job)
    assert cycles.total_cycles == 2 + 6 + 2 + 1, f"Got {cycles}"
    assert cycles.total_cycles < 7 + 7 + 1, "Interleaved tile should beat WS + OS + update"
    assert counters.reads_delta == 2 * 3, "delta must be read once per word"
    assert counters.writes_grad == 0 and counters.reads_grad == 0, "Gradients must stay in the PEs"


def test_interleaved_tile_matches_golden():
    w, delta, a_prev = ints(4, 4, 7), ints(4, 5, 8), ints(4, 5, 9)
    job = TileJob(
        mode=DataflowMode.INTERLEAVED, tile_rows=4, tile_cols=4, batch=5,
        w=w, delta=delta, a_prev=a_prev, lr=1,
    )
    partial, w_next, grad_w_t, _, _ = run_tile_interleaved(job)
    reference = golden.train_step(
        TrainStepInputs(w=w, a_prev=a_prev, delta=delta, fprime_z_prev=np.ones((4, 5), dtype=np.int64), lr=1)
    )
    assert np.array_equal(partial, reference.grad_a)
    assert np.array_equal(grad_w_t, reference.grad_w_t)
    assert np.array_equal(w_next, reference.w_next)


def test_interleaved_tile_requires_learning_rate():
    job = TileJob(
        mode=DataflowMode.INTERLEAVED, tile_rows=2, tile_cols=2, batch=1,
        w=ints(2, 2, 1), delta=ints(2, 1, 2), a_prev=ints(2, 1, 3),
    )
    with pytest.raises(ConfigurationError):
        run_tile_interleaved(job)


def test_tile_mode_mismatch_is_rejected():
    job = TileJob(mode=DataflowMode.OS, tile_rows=2, tile_cols=2, batch=1, w=ints(2, 2, 1), delta=ints(2, 1, 2))
    with pytest.raises(ConfigurationError):
        run_tile_ws(job)


def test_tile_slice_shape_is_checked():
    with pytest.raises(DimensionError):
        TileJob(mode=DataflowMode.WS, tile_rows=2, tile_cols=3, batch=1, w=ints(2, 2, 1), delta=ints(2, 1, 2))


def test_stationary_pass_counts_edge_words():
    stationary, stream = ints(3, 2, 61), ints(3, 4, 62)
    result = stationary_pass(stationary, stream)
    assert isinstance(result.traffic, EdgeTraffic)
    assert np.array_equal(result.output, stationary.T @ stream)
    assert result.traffic.model_dump() == {
        "stationary": 6, "west": 12, "north": 0, "partial": 0, "result": 8, "write_back": 0,
    }
    with pytest.raises(pydantic.ValidationError):
        result.output = stream


def test_interleaved_pass_writes_weights_back_once():
    result = interleaved_pass(ints(2, 3, 63), ints(2, 2, 64), ints(3, 2, 65), 1)
    assert result.traffic.write_back == 2 * 3
    assert result.traffic.west == 2 * 2
    assert set(result.extra) == {"w_next", "grad_w_t"}


def test_tile_spans_cover_ragged_extent():
    assert tile_spans(10, 4) == [(0, 4), (4, 8), (8, 10)]
    assert tile_spans(4, 4) == [(0, 4)]


# --- Tests for layer runs against the golden equations ---

@pytest.mark.parametrize("config", ORACLE_CONFIGS, ids=data_generators.config_id)
def test_layer_outputs_bit_equal_golden(config):
    """
    Every backward pipeline reproduces the golden outputs exactly in integer mode.
    """
    shape, geom = data_generators.shape_of(config), data_generators.geometry_of(config)
    inputs = data_generators.inputs_for(config)
    reference = golden.train_step(inputs)
    for mode in BACKWARD_MODES:
        run = run_layer(shape, geom, mode, inputs)
        assert_outputs_match(run.outputs, reference, f"{mode.value} {config}")


@pytest.mark.parametrize("config", F64_CONFIGS, ids=data_generators.config_id)
def test_layer_outputs_bit_equal_golden_in_f64(config):
    shape, geom = data_generators.shape_of(config), data_generators.geometry_of(config)
    inputs = data_generators.inputs_for(config, precision=Precision.F64, lr=0.125)
    reference = golden.train_step(inputs)
    for mode in BACKWARD_MODES:
        assert_outputs_match(run_layer(shape, geom, mode, inputs).outputs, reference, f"{mode.value} f64")


@pytest.mark.parametrize("mode", FORWARD_MODES)
def test_forward_modes_match_golden(mode):
    w, a_prev = ints(7, 9, 11), ints(9, 5, 12)
    z, cost = run_forward(ArrayGeometry(p=4, q=2), mode, w, a_prev)
    expected, _ = golden.forward(w, a_prev, ActivationKind.IDENTITY)
    assert np.array_equal(z, expected), f"{mode.value} forward differs"
    assert cost.cycles.total_cycles > 0


def test_input_stationary_layer_runs_forward(small_shape, small_geometry, int_inputs):
    run = run_layer(small_shape, small_geometry, DataflowMode.IS, int_inputs)
    expected, _ = golden.forward(int_inputs.w, int_inputs.a_prev, ActivationKind.IDENTITY)
    assert np.array_equal(run.outputs.z, expected)
    assert list(run.passes) == ["forward"]


def test_forward_rejects_interleaved_mode(small_geometry, int_inputs):
    with pytest.raises(ConfigurationError):
        run_forward(small_geometry, DataflowMode.INTERLEAVED, int_inputs.w, int_inputs.a_prev)


def test_run_separate_matches_golden(small_shape, small_geometry, int_inputs):
    run = run_separate(small_shape, small_geometry, int_inputs)
    assert_outputs_match(run.outputs, golden.train_step(int_inputs), "separate")
    assert set(run.passes) == {"backward_delta", "hadamard", "backward_gradw", "update"}


# --- Tests for layer counters and cycles ---

def test_single_tile_layer_is_tile_plus_hadamard(small_geometry):
    shape = LayerShape(n_out=4, m_in=4, batch=3)
    inputs = golden.seeded_inputs(shape, 3, Precision.INT, 1)
    run = run_layer(shape, small_geometry, DataflowMode.WS, inputs)
    job = TileJob(mode=DataflowMode.WS, tile_rows=4, tile_cols=4, batch=3, w=inputs.w, delta=inputs.delta)
    _, cycles, counters = run_tile_ws(job)
    assert run.passes["backward_delta"].cycles == cycles
    assert run.passes["backward_delta"].accesses == counters
    assert run.passes["hadamard"].accesses == AccessCounters(reads_partial=12, reads_activation=12, writes_result=12)
    assert run.cycles.total_cycles == cycles.total_cycles + 1


def test_four_equal_tiles_quadruple_stream_counters(small_shape, small_geometry, int_inputs):
    run = run_layer(small_shape, small_geometry, DataflowMode.OS, int_inputs)
    gradw = run.passes["backward_gradw"].accesses
    assert gradw.reads_delta == 4 * 4 * 4, f"Got {gradw.reads_delta}"
    assert gradw.reads_activation == 4 * 4 * 4
    assert gradw.writes_grad == 64


def test_interleaved_saves_delta_reuse_and_update_traffic(small_shape, small_geometry, int_inputs):
    """
    At (N, M, B, P, Q) = (8, 8, 4, 4, 4) the interleaved layer saves the second
    read of every delta word (N * B * M/P = 64) and three accesses per weight
    element (3 * N * M = 192).
    """
    interleaved = run_layer(small_shape, small_geometry, DataflowMode.INTERLEAVED, int_inputs)
    separate = run_separate(small_shape, small_geometry, int_inputs)
    assert separate.accesses.total - interleaved.accesses.total == 64 + 192
    eliminated_update = (
        separate.accesses.writes_grad + separate.accesses.reads_grad
        + separate.passes["update"].accesses.reads_weight + separate.passes["update"].accesses.writes_weight
        - interleaved.accesses.writes_weight
    )
    assert eliminated_update == 192


@pytest.mark.parametrize("n, m, batch, p, q", DOMINANCE_CONFIGS)
def test_interleaved_dominates_separate_passes(n, m, batch, p, q):
    shape, geom = LayerShape(n_out=n, m_in=m, batch=batch), ArrayGeometry(p=p, q=q)
    inputs = golden.seeded_inputs(shape, 1, Precision.INT, 1)
    interleaved = run_layer(shape, geom, DataflowMode.INTERLEAVED, inputs)
    separate = run_separate(shape, geom, inputs)
    assert interleaved.cycles.total_cycles < separate.cycles.total_cycles
    assert interleaved.accesses.total < separate.accesses.total


@pytest.mark.parametrize("n, m, batch, p, q", DOMINANCE_CONFIGS)
def test_interleaved_reads_delta_once(n, m, batch, p, q):
    shape, geom = LayerShape(n_out=n, m_in=m, batch=batch), ArrayGeometry(p=p, q=q)
    inputs = golden.seeded_inputs(shape, 2, Precision.INT, 1)
    interleaved = run_layer(shape, geom, DataflowMode.INTERLEAVED, inputs)
    ws = run_layer(shape, geom, DataflowMode.WS, inputs)
    assert interleaved.accesses.reads_delta == ws.accesses.reads_delta
    assert interleaved.accesses.reads_grad == 0 and interleaved.accesses.writes_grad == 0


def test_layer_runs_are_deterministic(small_shape, small_geometry, int_inputs):
    first = run_layer(small_shape, small_geometry, DataflowMode.INTERLEAVED, int_inputs)
    second = run_layer(small_shape, small_geometry, DataflowMode.INTERLEAVED, int_inputs)
    assert first.cycles == second.cycles
    assert first.accesses == second.accesses
    assert np.array_equal(first.outputs.w_next, second.outputs.w_next)


# --- Tests for layer errors ---

def test_run_layer_rejects_wrong_shape(small_geometry, int_inputs):
    with pytest.raises(DimensionError):
        run_layer(LayerShape(n_out=4, m_in=8, batch=4), small_geometry, DataflowMode.WS, int_inputs)


@pytest.mark.parametrize("mode", [DataflowMode.OS, DataflowMode.INTERLEAVED])
def test_run_layer_requires_learning_rate_for_updates(mode, small_shape, small_geometry, int_inputs):
    with pytest.raises(ConfigurationError):
        run_layer(small_shape, small_geometry, mode, int_inputs.model_copy(update={"lr": None}))

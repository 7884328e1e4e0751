"""
Tests for the shared core: the portable PRNG, seeded matrices, digests,
activations and the domain models' constraints.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from gradinterleave.core.activations import activation_derivative, apply_activation
from gradinterleave.core.matrix import check_shape, matrix_digest, seeded_matrix
from gradinterleave.core.prng import XorShift64Star, splitmix64
from gradinterleave.errors import DimensionError
from gradinterleave.models.core_models import ActivationKind, ArrayGeometry, LayerShape, ValueClass
from gradinterleave.models.report_models import AccessCounters, CostEstimate, CycleReport


# --- Helpers & Constants ---

SPLITMIX64_SEED0 = 0xE220A8397B1DCDAF  # First splitmix64 output for seed 0.

BAD_DIMENSIONS = [(0, 1), (1, 0), (0, 0), (-2, 3)]

INVALID_SHAPES = [
    {"n_out": 0, "m_in": 4, "batch": 2},
    {"n_out": 4, "m_in": 0, "batch": 2},
    {"n_out": 4, "m_in": 4, "batch": 0},
]


# --- Tests for the PRNG ---

def test_splitmix64_known_value():
    """
    The seeding step is the published splitmix64 mixer.
    """
    assert splitmix64(0) == SPLITMIX64_SEED0, f"Got {splitmix64(0):#x}"


def test_xorshift_stream_is_reproducible():
    """
    Two generators with the same seed emit the same stream; another seed differs.
    """
    a, b, c = XorShift64Star(11), XorShift64Star(11), XorShift64Star(12)
    stream_a = [a.next_u64() for _ in range(50)]
    stream_b = [b.next_u64() for _ in range(50)]
    stream_c = [c.next_u64() for _ in range(50)]
    assert stream_a == stream_b, "Same seed produced different streams"
    assert stream_a != stream_c, "Different seeds produced the same stream"
    assert all(0 <= value < 2**64 for value in stream_a), "Values escaped the 64-bit range"


# --- Tests for seeded matrices ---

def test_seeded_matrix_single_value_is_deterministic():
    first = seeded_matrix(1, 1, 7, ValueClass.SMALL_INT)
    second = seeded_matrix(1, 1, 7, ValueClass.SMALL_INT)
    assert first[0, 0] == second[0, 0], "Same seed gave different values"


def test_seeded_matrix_small_int_range():
    matrix = seeded_matrix(3, 4, 1, ValueClass.SMALL_INT)
    assert matrix.shape == (3, 4)
    assert matrix.dtype == np.int64, f"Expected int64, got {matrix.dtype}"
    assert matrix.min() >= -8 and matrix.max() <= 8, f"Values out of [-8, 8]: {matrix}"


def test_seeded_matrix_unit_float_range():
    matrix = seeded_matrix(5, 7, 42, ValueClass.UNIT_FLOAT)
    assert matrix.dtype == np.float64
    assert matrix.min() >= -1.0 and matrix.max() < 1.0, "Values out of [-1, 1)"
    assert -1.0 < matrix.mean() < 1.0


def test_seeded_matrix_is_read_only():
    matrix = seeded_matrix(2, 2, 3, ValueClass.SMALL_INT)
    with pytest.raises(ValueError):
        matrix[0, 0] = 1


@pytest.mark.parametrize("rows, cols", BAD_DIMENSIONS)
def test_seeded_matrix_rejects_empty_dimensions(rows, cols):
    with pytest.raises(DimensionError):
        seeded_matrix(rows, cols, 1, ValueClass.SMALL_INT)


def test_check_shape_reports_mismatch():
    with pytest.raises(DimensionError, match="delta must be 4x2"):
        check_shape(np.zeros((4, 3)), 4, 2, "delta")


# --- Tests for digests ---

def test_digest_depends_on_values_shape_and_dtype():
    base = np.arange(6, dtype=np.int64).reshape(2, 3)
    assert matrix_digest(base) == matrix_digest(base.copy()), "Digest is not a pure function"
    assert matrix_digest(base) != matrix_digest(base.reshape(3, 2)), "Digest ignores shape"
    assert matrix_digest(base) != matrix_digest(base.astype(np.float64)), "Digest ignores dtype"
    changed = base.copy()
    changed[1, 2] += 1
    assert matrix_digest(base) != matrix_digest(changed), "Digest ignores values"


# --- Tests for activations ---

def test_relu_derivative_at_zero_is_zero():
    z = np.array([[-1.0, 0.0, 2.0]])
    assert np.array_equal(activation_derivative(ActivationKind.RELU, z), np.array([[0.0, 0.0, 1.0]]))
    assert np.array_equal(apply_activation(ActivationKind.RELU, z), np.array([[0.0, 0.0, 2.0]]))


def test_identity_activation_and_derivative():
    z = np.array([[3, 4]], dtype=np.int64)
    assert np.array_equal(apply_activation(ActivationKind.IDENTITY, z), z)
    assert np.array_equal(activation_derivative(ActivationKind.IDENTITY, z), np.ones_like(z))


def test_sigmoid_derivative_matches_central_difference():
    z = np.linspace(-3.0, 3.0, 13).reshape(1, -1)
    h = 1e-6
    numeric = (
        apply_activation(ActivationKind.SIGMOID, z + h) - apply_activation(ActivationKind.SIGMOID, z - h)
    ) / (2 * h)
    assert np.allclose(activation_derivative(ActivationKind.SIGMOID, z), numeric, atol=1e-8)


# --- Tests for domain models ---

@pytest.mark.parametrize("fields", INVALID_SHAPES)
def test_layer_shape_rejects_non_positive_dims(fields):
    with pytest.raises(ValidationError):
        LayerShape(**fields)


def test_array_geometry_rejects_zero_side():
    with pytest.raises(ValidationError):
        ArrayGeometry(p=0, q=4)


def test_cycle_report_total_is_sum_of_phases():
    report = CycleReport(load_cycles=2, compute_cycles=3, drain_cycles=2)
    total = report + CycleReport(unload_cycles=2, update_cycles=1)
    assert report.total_cycles == 7
    assert total.total_cycles == 10
    assert total.model_dump()["total_cycles"] == 10


def test_access_counters_add_and_totals():
    first = AccessCounters(reads_weight=4, reads_delta=2, writes_result=2)
    second = AccessCounters(reads_grad=4, writes_weight=4)
    combined = first + second
    assert combined.total_reads == 10
    assert combined.total_writes == 6
    assert combined.total == 16
    assert combined.counts()["writes_weight"] == 4


def test_cost_estimate_term_lookup():
    estimate = CostEstimate(formula_trace=[("tiles", 4)])
    assert estimate.term("tiles") == 4
    with pytest.raises(KeyError):
        estimate.term("missing")

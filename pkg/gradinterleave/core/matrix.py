"""
Dense row-major matrices (numpy arrays) and the helpers that create and check them.
"""

import hashlib

import numpy as np
import numpy.typing as npt

from gradinterleave.core.prng import XorShift64Star
from gradinterleave.errors import DimensionError
from gradinterleave.models.core_models import Precision, ValueClass

MatrixF = npt.NDArray[np.int64] | npt.NDArray[np.float64]


def dtype_for(precision: Precision) -> type:
    return np.int64 if precision == Precision.INT else np.float64


def frozen(matrix: np.ndarray) -> np.ndarray:
    """
    Mark an array read-only and return it.
    """
    matrix.flags.writeable = False
    return matrix


def zeros(rows: int, cols: int, dtype=np.int64) -> np.ndarray:
    return np.zeros((rows, cols), dtype=dtype)


def check_shape(matrix: np.ndarray, rows: int, cols: int, name: str) -> None:
    """
    Assert a matrix has the expected two-dimensional shape.
    Raises:
        DimensionError: If the shape differs.
    """
    if matrix.ndim != 2 or matrix.shape != (rows, cols):
        raise DimensionError(f"{name} must be {rows}x{cols}, got {'x'.join(map(str, matrix.shape))}")


def seeded_matrix(rows: int, cols: int, seed: int, value_class: ValueClass) -> np.ndarray:
    """
    Build a deterministic matrix from the portable xorshift64* stream.
    Values are drawn row-major. small_int yields int64 values in [-8, 8],
    unit_float yields float64 values in [-1, 1).
    Args:
        rows (int): Row count, at least 1.
        cols (int): Column count, at least 1.
        seed (int): Stream seed.
        value_class (ValueClass): Distribution to draw from.
    Returns:
        np.ndarray: Read-only rows x cols matrix.
    Raises:
        DimensionError: If either dimension is below 1.
    """
    if rows < 1 or cols < 1:
        raise DimensionError(f"matrix dimensions must be >= 1, got {rows}x{cols}")
    rng = XorShift64Star(seed)
    if value_class == ValueClass.SMALL_INT:
        values = [rng.small_int() for _ in range(rows * cols)]
        data = np.array(values, dtype=np.int64)
    else:
        values = [rng.unit_float() for _ in range(rows * cols)]
        data = np.array(values, dtype=np.float64)
    return frozen(data.reshape(rows, cols))


def value_class_for(precision: Precision) -> ValueClass:
    return ValueClass.SMALL_INT if precision == Precision.INT else ValueClass.UNIT_FLOAT


def matrix_digest(matrix: np.ndarray) -> str:
    """
    SHA-256 over shape, dtype and little-endian row-major bytes.
    """
    contiguous = np.ascontiguousarray(matrix, dtype=matrix.dtype.newbyteorder("<"))
    header = f"{matrix.dtype.kind}{matrix.dtype.itemsize}:{matrix.shape[0]}x{matrix.shape[1]}:"
    return hashlib.sha256(header.encode() + contiguous.tobytes()).hexdigest()

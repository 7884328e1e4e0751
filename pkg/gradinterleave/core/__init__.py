"""
Shared value containers, seeded data generation and activation functions.
"""

from gradinterleave.core.activations import activation_derivative, apply_activation
from gradinterleave.core.matrix import (
    MatrixF,
    check_shape,
    dtype_for,
    frozen,
    matrix_digest,
    seeded_matrix,
    zeros,
)
from gradinterleave.core.prng import XorShift64Star

__all__ = [
    "MatrixF",
    "XorShift64Star",
    "activation_derivative",
    "apply_activation",
    "check_shape",
    "dtype_for",
    "frozen",
    "matrix_digest",
    "seeded_matrix",
    "zeros",
]

"""
Activation functions f and their exact analytic derivatives f'.
"""

import numpy as np

from gradinterleave.models.core_models import ActivationKind


def apply_activation(kind: ActivationKind, z: np.ndarray) -> np.ndarray:
    if kind == ActivationKind.IDENTITY:
        return z.copy()
    if kind == ActivationKind.RELU:
        return np.maximum(z, 0)
    return 1.0 / (1.0 + np.exp(-z))


def activation_derivative(kind: ActivationKind, z: np.ndarray) -> np.ndarray:
    """
    f'(z) elementwise. The ReLU derivative at exactly 0 is 0.
    """
    if kind == ActivationKind.IDENTITY:
        return np.ones_like(z)
    if kind == ActivationKind.RELU:
        return (z > 0).astype(z.dtype)
    s = 1.0 / (1.0 + np.exp(-z))
    return s * (1.0 - s)

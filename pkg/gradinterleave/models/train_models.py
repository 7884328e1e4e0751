"""
Inputs and outputs of one layer's backward training step.
Matrices are numpy arrays; shape consistency is validated on construction.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from gradinterleave.core.matrix import check_shape
from gradinterleave.models.core_models import LayerShape


class TrainStepInputs(BaseModel):
    """
    W (N x M), a_prev (M x B), delta (N x B), f'(z_prev) (M x B) and the SGD rate.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    w: np.ndarray
    a_prev: np.ndarray
    delta: np.ndarray
    fprime_z_prev: np.ndarray
    lr: float | int | None = Field(default=None, description="Learning rate (eta)")

    @model_validator(mode="after")
    def _check_shapes(self) -> "TrainStepInputs":
        n_out, m_in = self.w.shape
        batch = self.a_prev.shape[1] if self.a_prev.ndim == 2 else 0
        check_shape(self.a_prev, m_in, batch, "a_prev")
        check_shape(self.delta, n_out, batch, "delta")
        check_shape(self.fprime_z_prev, m_in, batch, "fprime_z_prev")
        return self

    @property
    def shape(self) -> LayerShape:
        return LayerShape(n_out=self.w.shape[0], m_in=self.w.shape[1], batch=self.a_prev.shape[1])


class TrainStepOutputs(BaseModel):
    """
    grad_a = dE/da_prev, delta_prev = grad_a * f', grad_w_t = G^T and the
    updated weights. Simulated pipelines that only cover part of the step leave
    the other fields as None; z carries the forward product when one was run.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grad_a: np.ndarray | None = None
    delta_prev: np.ndarray | None = None
    grad_w_t: np.ndarray | None = None
    w_next: np.ndarray | None = None
    z: np.ndarray | None = None

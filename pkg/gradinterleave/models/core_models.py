"""
Core domain models: layer shapes, array geometry and the closed enumerations
used by every other module.
Index convention used repo-wide: W is N x M with row index y (output neuron)
and column index x (input neuron); batches are stored as columns.
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class DataflowMode(str, Enum):
    """
    Dataflow a tile pass runs in.
    IS is only defined for forward-style matmul (activations resident).
    """
    WS = "ws"
    OS = "os"
    IS = "is"
    INTERLEAVED = "interleaved"

    @classmethod
    def baselines(cls) -> tuple["DataflowMode", ...]:
        """
        The traditional dataflows, in tie-breaking order.
        """
        return (cls.WS, cls.OS, cls.IS)


class ActivationKind(str, Enum):
    """
    Activation function f applied elementwise to z; derivatives live in
    gradinterleave.core.activations.
    """
    IDENTITY = "identity"
    RELU = "relu"
    SIGMOID = "sigmoid"


class Precision(str, Enum):
    """
    Element width of matrix data: exact 64-bit integers or IEEE doubles.
    """
    INT = "int"
    F64 = "f64"


class ValueClass(str, Enum):
    """
    Value distribution drawn by the seeded generator.
    """
    SMALL_INT = "small_int"
    UNIT_FLOAT = "unit_float"


class StepKind(str, Enum):
    """
    Kind of work a cost estimate covers.
    """
    FORWARD = "forward"
    ACTIVATION = "activation"
    BACKWARD_DELTA = "backward_delta"
    BACKWARD_GRADW = "backward_gradw"
    HADAMARD = "hadamard"
    UPDATE = "update"
    FUSED_BACKWARD = "fused_backward"


class LayerShape(BaseModel):
    """
    Dimensions of one fully-connected layer's training step.
    """
    model_config = ConfigDict(frozen=True)

    n_out: int = Field(..., ge=1, description="Output neurons (N)")
    m_in: int = Field(..., ge=1, description="Input neurons (M)")
    batch: int = Field(..., ge=1, description="Mini-batch size (B)")

    @property
    def weight_elements(self) -> int:
        return self.n_out * self.m_in

    @property
    def pe_activations(self) -> int:
        """
        N*M*B, the number of multiply-accumulates of one backward matmul.
        """
        return self.n_out * self.m_in * self.batch


class ArrayGeometry(BaseModel):
    """
    P x Q grid of processing elements: P columns (horizontal), Q rows (vertical).
    """
    model_config = ConfigDict(frozen=True)

    p: int = Field(..., ge=1, description="Horizontal PE count (P)")
    q: int = Field(..., ge=1, description="Vertical PE count (Q)")

    @property
    def pe_count(self) -> int:
        return self.p * self.q

"""
Run and sweep configuration models. Every report embeds the configuration that
produced it so a run can be reproduced from its own output.
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from gradinterleave.errors import ConfigurationError
from gradinterleave.models.core_models import ArrayGeometry, DataflowMode, Precision

SCHEMA_VERSION = "1.0"


class Engine(str, Enum):
    ANALYTIC = "analytic"
    SIMULATED = "simulated"


class SweepSpec(BaseModel):
    """
    Grid of (size, batch, mode) points for a normalized sweep.
    """
    model_config = ConfigDict(frozen=True)

    sizes: list[tuple[int, int]] = Field(..., min_length=1, description="(N, M) pairs")
    batches: list[int] = Field(..., min_length=1)
    geom: ArrayGeometry
    modes: list[DataflowMode] = Field(default_factory=lambda: list(DataflowMode))
    normalize_to: DataflowMode = DataflowMode.WS

    @model_validator(mode="after")
    def _check_grid(self) -> "SweepSpec":
        if self.normalize_to not in self.modes:
            raise ConfigurationError(f"normalize_to {self.normalize_to.value} is not among the swept modes")
        if any(n < 1 or m < 1 for n, m in self.sizes) or any(b < 1 for b in self.batches):
            raise ConfigurationError("sweep sizes and batches must be >= 1")
        return self


class RunConfig(BaseModel):
    """
    Everything a CLI invocation was given, after defaults were applied.
    """
    model_config = ConfigDict(frozen=True)

    command: str
    n: int | None = Field(default=None, ge=1)
    m: int | None = Field(default=None, ge=1)
    batch: int | None = Field(default=None, ge=1)
    p: int | None = Field(default=None, ge=1)
    q: int | None = Field(default=None, ge=1)
    seed: int = 0
    precision: Precision = Precision.INT
    lr: float | int | None = None
    mode: DataflowMode | None = None
    step: str | None = None
    check: bool = False
    full: bool = False
    dims: list[int] | None = None
    procs: list[int] | None = None
    policy: str | None = None
    engine: Engine | None = None
    net: str | None = None
    sizes: list[int] | None = None
    batches: list[int] | None = None
    normalize_to: str | None = None
    workers: int = Field(default=1, ge=1)
    out: str | None = Field(default=None, exclude=True, description="Destination only; not embedded in reports")
    format: str = "json"

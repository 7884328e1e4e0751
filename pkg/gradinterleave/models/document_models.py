"""
Top-level JSON documents emitted by the command-line interface.
Each document carries the schema version and the RunConfig that produced it.
"""

from pydantic import BaseModel, Field

from gradinterleave.costmodel import Saving
from gradinterleave.models.config_models import SCHEMA_VERSION, RunConfig
from gradinterleave.models.report_models import AccessCounters, CycleReport, PassCost
from gradinterleave.models.schedule_models import PolicyComparison, ScheduleResult, SchedulePolicy


class GoldenDocument(BaseModel):
    schema_version: str = SCHEMA_VERSION
    config: RunConfig
    inputs: dict[str, str] = Field(..., description="SHA-256 digest per input matrix")
    outputs: dict[str, str] = Field(..., description="SHA-256 digest per output matrix")
    matrices: dict[str, list[list[int | float]]] | None = None


class SimDocument(BaseModel):
    schema_version: str = SCHEMA_VERSION
    config: RunConfig
    mode: str
    cycles: CycleReport
    accesses: AccessCounters
    passes: dict[str, PassCost]
    outputs: dict[str, str]
    check: str | None = Field(default=None, description="'passed' when --check ran")


class EstimateDocument(BaseModel):
    schema_version: str = SCHEMA_VERSION
    config: RunConfig
    mode: str
    step: str
    cycles: CycleReport
    accesses: AccessCounters
    formula_trace: list[tuple[str, int]]
    savings: list[Saving] = Field(default_factory=list)


class PolicySchedule(BaseModel):
    policy: SchedulePolicy
    result: ScheduleResult


class ScheduleDocument(BaseModel):
    schema_version: str = SCHEMA_VERSION
    config: RunConfig
    schedules: list[PolicySchedule] = Field(default_factory=list)
    comparison: PolicyComparison | None = None


class CompareDocument(BaseModel):
    schema_version: str = SCHEMA_VERSION
    config: RunConfig
    interleaved: PassCost
    separate: PassCost
    cycle_difference: int
    access_difference: int
    delta_reuse: Saving
    inplace_update: Saving
    outputs_match: bool

"""
Models for cycle reports, SRAM edge-access counters and analytic cost estimates.
"""

from pydantic import BaseModel, ConfigDict, Field, computed_field


class CycleReport(BaseModel):
    """
    Cycle counts broken down by phase; the total is always the sum of phases.
    """
    model_config = ConfigDict(frozen=True)

    load_cycles: int = Field(default=0, ge=0)
    compute_cycles: int = Field(default=0, ge=0)
    drain_cycles: int = Field(default=0, ge=0)
    unload_cycles: int = Field(default=0, ge=0)
    update_cycles: int = Field(default=0, ge=0)

    @computed_field
    @property
    def total_cycles(self) -> int:
        return (
            self.load_cycles + self.compute_cycles + self.drain_cycles
            + self.unload_cycles + self.update_cycles
        )

    def __add__(self, other: "CycleReport") -> "CycleReport":
        return CycleReport(
            load_cycles=self.load_cycles + other.load_cycles,
            compute_cycles=self.compute_cycles + other.compute_cycles,
            drain_cycles=self.drain_cycles + other.drain_cycles,
            unload_cycles=self.unload_cycles + other.unload_cycles,
            update_cycles=self.update_cycles + other.update_cycles,
        )


ACCESS_FIELDS = (
    "reads_weight",
    "reads_delta",
    "reads_activation",
    "reads_grad",
    "reads_partial",
    "writes_grad",
    "writes_weight",
    "writes_result",
)


class AccessCounters(BaseModel):
    """
    Words crossing the array/SRAM boundary, one counter per operand and direction.
    """
    model_config = ConfigDict(frozen=True)

    reads_weight: int = Field(default=0, ge=0)
    reads_delta: int = Field(default=0, ge=0)
    reads_activation: int = Field(default=0, ge=0)
    reads_grad: int = Field(default=0, ge=0)
    reads_partial: int = Field(default=0, ge=0)
    writes_grad: int = Field(default=0, ge=0)
    writes_weight: int = Field(default=0, ge=0)
    writes_result: int = Field(default=0, ge=0)

    @computed_field
    @property
    def total_reads(self) -> int:
        return (
            self.reads_weight + self.reads_delta + self.reads_activation
            + self.reads_grad + self.reads_partial
        )

    @computed_field
    @property
    def total_writes(self) -> int:
        return self.writes_grad + self.writes_weight + self.writes_result

    @property
    def total(self) -> int:
        return self.total_reads + self.total_writes

    def __add__(self, other: "AccessCounters") -> "AccessCounters":
        return AccessCounters(
            **{name: getattr(self, name) + getattr(other, name) for name in ACCESS_FIELDS}
        )

    def counts(self) -> dict[str, int]:
        """
        Raw per-operand counters, without the derived totals.
        """
        return {name: getattr(self, name) for name in ACCESS_FIELDS}


class CostEstimate(BaseModel):
    """
    Closed-form cost of one step, with the named terms that produced it.
    """
    model_config = ConfigDict(frozen=True)

    cycles: CycleReport = Field(default_factory=CycleReport)
    accesses: AccessCounters = Field(default_factory=AccessCounters)
    formula_trace: list[tuple[str, int]] = Field(default_factory=list)

    def __add__(self, other: "CostEstimate") -> "CostEstimate":
        return CostEstimate(
            cycles=self.cycles + other.cycles,
            accesses=self.accesses + other.accesses,
            formula_trace=self.formula_trace + other.formula_trace,
        )

    def term(self, name: str) -> int:
        """
        Look up a named formula term.
        Raises:
            KeyError: If the trace carries no term of that name.
        """
        for term_name, value in self.formula_trace:
            if term_name == name:
                return value
        raise KeyError(name)


class PassCost(BaseModel):
    """
    Cycles and accesses of one named pass of a layer step.
    """
    model_config = ConfigDict(frozen=True)

    cycles: CycleReport = Field(default_factory=CycleReport)
    accesses: AccessCounters = Field(default_factory=AccessCounters)

    def __add__(self, other: "PassCost") -> "PassCost":
        return PassCost(cycles=self.cycles + other.cycles, accesses=self.accesses + other.accesses)

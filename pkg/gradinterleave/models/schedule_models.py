"""
Models for the training-iteration dependence graph and its schedules.
"""

from enum import Enum

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from gradinterleave.errors import ConfigurationError
from gradinterleave.models.core_models import DataflowMode


class OpKind(str, Enum):
    """
    Kinds of work in one training iteration of a fully-connected network.
    FUSED is the interleaved BpDelta + GradW + Update of one layer.
    SYNTHETIC marks nodes of generated test graphs.
    """
    FWD = "Fwd"
    ACT = "Act"
    BP_DELTA = "BpDelta"
    GRAD_ACT = "GradAct"
    GRAD_W = "GradW"
    UPDATE = "Update"
    FUSED = "Fused"
    SYNTHETIC = "Synthetic"


class SchedulePolicy(str, Enum):
    """
    How a graph is built: a traditional dataflow for the forward pass with the
    separate-pass backward, or the proposed fused backward.
    """
    BASELINE_WS = "baseline-ws"
    BASELINE_OS = "baseline-os"
    BASELINE_IS = "baseline-is"
    PROPOSED = "proposed"

    @property
    def forward_mode(self) -> DataflowMode:
        return {
            SchedulePolicy.BASELINE_WS: DataflowMode.WS,
            SchedulePolicy.BASELINE_OS: DataflowMode.OS,
            SchedulePolicy.BASELINE_IS: DataflowMode.IS,
            SchedulePolicy.PROPOSED: DataflowMode.INTERLEAVED,
        }[self]


class OpNode(BaseModel):
    """
    One schedulable operation with its closed-form cost.
    """
    model_config = ConfigDict(frozen=True)

    id: int = Field(..., ge=0, description="Index of the node in its graph")
    kind: OpKind
    layer: int = Field(..., ge=0, description="Weight layer, 1-based; 0 for synthetic nodes")
    cost_cycles: int = Field(..., ge=0)
    accesses: int = Field(default=0, ge=0)
    fused: bool = False

    @property
    def label(self) -> str:
        return f"{self.kind.value}({self.layer})"


class OpGraph(BaseModel):
    """
    Precedence graph of operations; edges run producer -> consumer.
    Node ids equal their position in nodes.
    """
    model_config = ConfigDict(frozen=True)

    nodes: list[OpNode]
    edges: list[tuple[int, int]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_graph(self) -> "OpGraph":
        for position, node in enumerate(self.nodes):
            if node.id != position:
                raise ConfigurationError(f"node {node.label} has id {node.id}, expected {position}")
        count = len(self.nodes)
        for producer, consumer in self.edges:
            if not (0 <= producer < count and 0 <= consumer < count):
                raise ConfigurationError(f"edge ({producer}, {consumer}) references a missing node")
        if not nx.is_directed_acyclic_graph(self.to_networkx()):
            raise ConfigurationError("operation graph contains a cycle")
        return self

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        for node in self.nodes:
            graph.add_node(node.id, cost=node.cost_cycles)
        graph.add_edges_from(self.edges)
        return graph

    def predecessors(self) -> dict[int, set[int]]:
        preds: dict[int, set[int]] = {node.id: set() for node in self.nodes}
        for producer, consumer in self.edges:
            preds[consumer].add(producer)
        return preds

    def find(self, kind: OpKind, layer: int) -> OpNode:
        """
        Raises:
            KeyError: If the graph has no such node.
        """
        for node in self.nodes:
            if node.kind == kind and node.layer == layer:
                return node
        raise KeyError(f"{kind.value}({layer})")

    @property
    def total_cost(self) -> int:
        return sum(node.cost_cycles for node in self.nodes)

    @property
    def total_accesses(self) -> int:
        return sum(node.accesses for node in self.nodes)


class TimelineEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    proc: int = Field(..., ge=0)
    node_id: int = Field(..., ge=0)
    kind: OpKind
    layer: int = Field(..., ge=0)
    start: int = Field(..., ge=0)
    end: int = Field(..., ge=0)


class ScheduleResult(BaseModel):
    """
    A non-preemptive schedule of one graph on procs identical processors.
    """
    model_config = ConfigDict(frozen=True)

    procs: int = Field(..., ge=1)
    timeline: list[TimelineEntry]
    makespan: int = Field(..., ge=0)
    busy_cycles: int = Field(..., ge=0, description="Sum of node costs")
    total_accesses: int = Field(..., ge=0)

    @computed_field
    @property
    def total_processor_cycles(self) -> int:
        return self.procs * self.makespan

    @computed_field
    @property
    def utilization(self) -> float:
        if self.makespan == 0:
            return 1.0
        return self.busy_cycles / self.total_processor_cycles


class ComparisonRow(BaseModel):
    """
    One (policy, processor count) schedule, with reductions of the proposed
    single-processor run against this row's processor-cycles and accesses.
    """
    model_config = ConfigDict(frozen=True)

    policy: SchedulePolicy
    procs: int = Field(..., ge=1)
    makespan: int
    utilization: float
    total_processor_cycles: int
    total_accesses: int
    cycle_reduction_pct: float | None = None
    access_reduction_pct: float | None = None


class PolicyComparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    layer_dims: list[int]
    batch: int
    baseline: SchedulePolicy
    rows: list[ComparisonRow]

    def row(self, policy: SchedulePolicy, procs: int) -> ComparisonRow:
        """
        Raises:
            KeyError: If the comparison has no such row.
        """
        for row in self.rows:
            if row.policy == policy and row.procs == procs:
                return row
        raise KeyError(f"{policy.value} on {procs} processors")

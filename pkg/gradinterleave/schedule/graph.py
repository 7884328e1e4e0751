"""
Dependence graph of one training iteration of a fully-connected network.

For weight layers l = 1..L (W(l) is dims[l] x dims[l-1]):
    Fwd(l)      z(l) = W(l) a(l-1)            after Act(l-1)
    Act(l)      a(l) = f(z(l))                after Fwd(l)
    BpDelta(l)  grad_a = W(l)^T delta(l)      after delta(l) exists
    GradAct(l)  delta(l) = grad_a (.) f'(z(l)) after BpDelta(l+1), for l < L
    GradW(l)    G(l) = delta(l) a(l-1)^T      after delta(l) and Act(l-1)
    Update(l)   W(l) -= lr G(l)               after GradW(l) and BpDelta(l)
delta(L) is seeded by the loss once Act(L) is available. The proposed policy
replaces BpDelta, GradW and Update of a layer with one Fused node, which reads
the stationary weights before its in-PE update.
"""

import numpy as np
from loguru import logger

from gradinterleave import costmodel
from gradinterleave.errors import ConfigurationError
from gradinterleave.models.core_models import ArrayGeometry, DataflowMode, LayerShape, StepKind
from gradinterleave.models.schedule_models import OpGraph, OpKind, OpNode, SchedulePolicy

DEFAULT_LAYER_DIMS = [1024, 1024, 1024, 1024, 1024]
DEFAULT_BATCH = 32
DEFAULT_GEOMETRY = ArrayGeometry(p=128, q=128)


class _GraphBuilder:
    def __init__(self) -> None:
        self.nodes: list[OpNode] = []
        self.edges: list[tuple[int, int]] = []

    def add(self, kind: OpKind, layer: int, cost, fused: bool = False) -> int:
        node = OpNode(
            id=len(self.nodes),
            kind=kind,
            layer=layer,
            cost_cycles=cost.cycles.total_cycles,
            accesses=cost.accesses.total,
            fused=fused,
        )
        self.nodes.append(node)
        return node.id

    def depend(self, consumer: int, *producers: int | None) -> None:
        for producer in producers:
            if producer is not None and (producer, consumer) not in self.edges:
                self.edges.append((producer, consumer))

    def build(self) -> OpGraph:
        return OpGraph(nodes=self.nodes, edges=self.edges)


def build_graph(
    layer_dims: list[int],
    batch: int,
    policy: SchedulePolicy,
    geom: ArrayGeometry = DEFAULT_GEOMETRY,
) -> OpGraph:
    """
    Build the operation graph of one training iteration.
    Args:
        layer_dims (list[int]): Neuron counts from input to output, at least two.
        batch (int): Mini-batch size.
        policy (SchedulePolicy): Baseline dataflow or the proposed fused backward.
        geom (ArrayGeometry): Array the node costs are estimated for.
    Returns:
        OpGraph: Nodes in construction order (forward, then backward from the
            output layer down).
    Raises:
        ConfigurationError: If fewer than two layer dims are given.
    """
    if len(layer_dims) < 2:
        raise ConfigurationError(f"need at least 2 layer dims, got {len(layer_dims)}")
    if min(layer_dims) < 1 or batch < 1:
        raise ConfigurationError("layer dims and batch must be >= 1")

    layers = len(layer_dims) - 1
    shapes = {
        layer: LayerShape(n_out=layer_dims[layer], m_in=layer_dims[layer - 1], batch=batch)
        for layer in range(1, layers + 1)
    }
    mode = policy.forward_mode
    builder = _GraphBuilder()

    act: dict[int, int] = {}
    fwd: dict[int, int] = {}
    for layer in range(1, layers + 1):
        shape = shapes[layer]
        fwd[layer] = builder.add(OpKind.FWD, layer, costmodel.estimate(shape, geom, mode, StepKind.FORWARD))
        builder.depend(fwd[layer], act.get(layer - 1))
        act[layer] = builder.add(OpKind.ACT, layer, costmodel.estimate(shape, geom, mode, StepKind.ACTIVATION))
        builder.depend(act[layer], fwd[layer])

    delta_source = act[layers]
    for layer in range(layers, 0, -1):
        shape = shapes[layer]
        if policy == SchedulePolicy.PROPOSED:
            fused = builder.add(
                OpKind.FUSED, layer,
                costmodel.estimate(shape, geom, DataflowMode.INTERLEAVED, StepKind.FUSED_BACKWARD),
                fused=True,
            )
            builder.depend(fused, delta_source, act.get(layer - 1))
            grad_a_source = fused
        else:
            bp_delta = builder.add(
                OpKind.BP_DELTA, layer, costmodel.estimate(shape, geom, DataflowMode.WS, StepKind.BACKWARD_DELTA)
            )
            builder.depend(bp_delta, delta_source)
            grad_w = builder.add(
                OpKind.GRAD_W, layer, costmodel.estimate(shape, geom, DataflowMode.OS, StepKind.BACKWARD_GRADW)
            )
            builder.depend(grad_w, delta_source, act.get(layer - 1))
            update = builder.add(OpKind.UPDATE, layer, costmodel.estimate(shape, geom, DataflowMode.OS, StepKind.UPDATE))
            builder.depend(update, grad_w, bp_delta)
            grad_a_source = bp_delta

        if layer > 1:
            grad_act = builder.add(
                OpKind.GRAD_ACT, layer - 1, costmodel.estimate(shape, geom, mode, StepKind.HADAMARD)
            )
            builder.depend(grad_act, grad_a_source, fwd[layer - 1])
            delta_source = grad_act

    graph = builder.build()
    logger.debug(
        "built {} graph for dims {} B={}: {} nodes, {} edges",
        policy.value, layer_dims, batch, len(graph.nodes), len(graph.edges),
    )
    return graph


def random_dag(seed: int, node_count: int, edge_probability: float = 0.3, max_cost: int = 20) -> OpGraph:
    """
    Random DAG of synthetic nodes for scheduler property checks. Edges only run
    from lower to higher ids, so the graph is acyclic by construction.
    """
    if node_count < 1:
        raise ConfigurationError("random DAG needs at least one node")
    rng = np.random.default_rng(seed)
    nodes = [
        OpNode(id=i, kind=OpKind.SYNTHETIC, layer=0, cost_cycles=int(rng.integers(1, max_cost + 1)))
        for i in range(node_count)
    ]
    edges = [
        (src, dst)
        for src in range(node_count)
        for dst in range(src + 1, node_count)
        if rng.random() < edge_probability
    ]
    return OpGraph(nodes=nodes, edges=edges)

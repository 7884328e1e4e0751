"""
List scheduling of operation graphs onto identical processors, an exhaustive
oracle for small graphs, and the baseline-vs-proposed comparison.
"""

import heapq
import math
from functools import lru_cache

import networkx as nx
import pandas as pd
from loguru import logger

from gradinterleave.errors import ConfigurationError
from gradinterleave.models.core_models import ArrayGeometry
from gradinterleave.models.schedule_models import (
    ComparisonRow,
    OpGraph,
    PolicyComparison,
    ScheduleResult,
    SchedulePolicy,
    TimelineEntry,
)
from gradinterleave.schedule.graph import DEFAULT_GEOMETRY, build_graph

EXHAUSTIVE_NODE_LIMIT = 8
TIMELINE_COLUMNS = ["proc", "node_id", "kind", "layer", "start", "end"]


def bottom_levels(graph: OpGraph) -> dict[int, int]:
    """
    Longest cost path from each node to a sink, the node's own cost included.
    """
    digraph = graph.to_networkx()
    cost = {node.id: node.cost_cycles for node in graph.nodes}
    levels: dict[int, int] = {}
    for node_id in reversed(list(nx.topological_sort(digraph))):
        tail = max((levels[succ] for succ in digraph.successors(node_id)), default=0)
        levels[node_id] = cost[node_id] + tail
    return levels


def critical_path_length(graph: OpGraph) -> int:
    return max(bottom_levels(graph).values(), default=0)


def list_schedule(graph: OpGraph, procs: int) -> ScheduleResult:
    """
    Greedy ready-list scheduling. Whenever processors are idle, the ready node
    with the longest remaining critical path starts on the lowest-numbered idle
    processor; ties go to the lower node id.
    Raises:
        ConfigurationError: If procs is below 1.
    """
    if procs < 1:
        raise ConfigurationError(f"need at least one processor, got {procs}")
    levels = bottom_levels(graph)
    preds = graph.predecessors()
    succs: dict[int, list[int]] = {node.id: [] for node in graph.nodes}
    for producer, consumer in graph.edges:
        succs[producer].append(consumer)
    waiting = {node_id: len(p) for node_id, p in preds.items()}

    ready = [node_id for node_id, count in waiting.items() if count == 0]
    running: list[tuple[int, int, int]] = []
    busy: set[int] = set()
    timeline: list[TimelineEntry] = []
    finished = 0
    now = 0
    while finished < len(graph.nodes):
        ready.sort(key=lambda node_id: (-levels[node_id], node_id))
        idle = [proc for proc in range(procs) if proc not in busy]
        while idle and ready:
            proc, node_id = idle.pop(0), ready.pop(0)
            node = graph.nodes[node_id]
            end = now + node.cost_cycles
            busy.add(proc)
            heapq.heappush(running, (end, node_id, proc))
            timeline.append(TimelineEntry(
                proc=proc, node_id=node_id, kind=node.kind, layer=node.layer, start=now, end=end,
            ))
            logger.debug("t={} start {} on proc {}", now, node.label, proc)

        now = running[0][0]
        while running and running[0][0] == now:
            _, node_id, proc = heapq.heappop(running)
            busy.discard(proc)
            finished += 1
            for succ in succs[node_id]:
                waiting[succ] -= 1
                if waiting[succ] == 0:
                    ready.append(succ)

    timeline.sort(key=lambda entry: (entry.proc, entry.start, entry.node_id))
    return ScheduleResult(
        procs=procs,
        timeline=timeline,
        makespan=max((entry.end for entry in timeline), default=0),
        busy_cycles=graph.total_cost,
        total_accesses=graph.total_accesses,
    )


def exhaustive_makespan(graph: OpGraph, procs: int) -> int:
    """
    Optimal non-preemptive makespan by exhaustive search over start orders.

    Every schedule is dominated by one that starts nodes in some topological
    order, each as early as its processor and predecessors allow, so trying
    every order and every distinct processor finish time finds the optimum.
    Raises:
        ConfigurationError: For graphs above the node limit or procs below 1.
    """
    if len(graph.nodes) > EXHAUSTIVE_NODE_LIMIT:
        raise ConfigurationError(
            f"exhaustive search is limited to {EXHAUSTIVE_NODE_LIMIT} nodes, got {len(graph.nodes)}"
        )
    if procs < 1:
        raise ConfigurationError(f"need at least one processor, got {procs}")
    preds = {node_id: frozenset(p) for node_id, p in graph.predecessors().items()}
    cost = {node.id: node.cost_cycles for node in graph.nodes}
    everything = frozenset(cost)

    @lru_cache(maxsize=None)
    def search(done: frozenset, free: tuple[int, ...], ends: tuple[tuple[int, int], ...]) -> int:
        if done == everything:
            return max(free)
        end_of = dict(ends)
        best = math.inf
        for node_id in sorted(everything - done):
            if not preds[node_id] <= done:
                continue
            ready_at = max((end_of[p] for p in preds[node_id]), default=0)
            for slot, free_at in enumerate(free):
                if slot and free[slot - 1] == free_at:
                    continue
                end = max(free_at, ready_at) + cost[node_id]
                next_free = tuple(sorted(free[:slot] + (end,) + free[slot + 1:]))
                next_done = done | {node_id}
                end_of_next = {**end_of, node_id: end}
                next_ends = tuple(sorted(
                    (n, e) for n, e in end_of_next.items()
                    if any(n in preds[s] for s in everything - next_done)
                ))
                best = min(best, search(next_done, next_free, next_ends))
        return best

    return int(search(frozenset(), (0,) * procs, ()))


def timeline_frame(result: ScheduleResult) -> pd.DataFrame:
    rows = [
        {
            "proc": entry.proc,
            "node_id": entry.node_id,
            "kind": entry.kind.value,
            "layer": entry.layer,
            "start": entry.start,
            "end": entry.end,
        }
        for entry in result.timeline
    ]
    return pd.DataFrame(rows, columns=TIMELINE_COLUMNS)


def timeline_csv(result: ScheduleResult) -> str:
    """
    Timeline export: proc,node_id,kind,layer,start,end.
    """
    return timeline_frame(result).to_csv(index=False, lineterminator="\n")


def _reduction_pct(proposed: int, baseline: int) -> float:
    if baseline == 0:
        return 0.0
    return round(100.0 * (1.0 - proposed / baseline), 4)


def compare_policies(
    layer_dims: list[int],
    batch: int,
    geom: ArrayGeometry = DEFAULT_GEOMETRY,
    procs_list: list[int] | tuple[int, ...] = (1, 2, 3),
    baseline: SchedulePolicy = SchedulePolicy.BASELINE_OS,
) -> PolicyComparison:
    """
    Schedule the baseline and proposed graphs on every processor count.

    Processor-cycles are procs x makespan. Each baseline row carries the
    reduction achieved by the proposed graph on a single processor; proposed
    rows carry the same comparison against the baseline at their own
    processor count.
    Raises:
        ConfigurationError: For invalid dims, an empty procs list, or a
            proposed baseline.
    """
    if baseline == SchedulePolicy.PROPOSED:
        raise ConfigurationError("the baseline policy must be a traditional dataflow")
    if not procs_list:
        raise ConfigurationError("procs list is empty")
    baseline_graph = build_graph(layer_dims, batch, baseline, geom)
    proposed_graph = build_graph(layer_dims, batch, SchedulePolicy.PROPOSED, geom)
    proposed_serial = list_schedule(proposed_graph, 1)

    rows: list[ComparisonRow] = []
    for procs in sorted(set(procs_list)):
        base = list_schedule(baseline_graph, procs)
        prop = list_schedule(proposed_graph, procs)
        rows.append(ComparisonRow(
            policy=baseline,
            procs=procs,
            makespan=base.makespan,
            utilization=base.utilization,
            total_processor_cycles=base.total_processor_cycles,
            total_accesses=base.total_accesses,
            cycle_reduction_pct=_reduction_pct(proposed_serial.total_processor_cycles, base.total_processor_cycles),
            access_reduction_pct=_reduction_pct(proposed_serial.total_accesses, base.total_accesses),
        ))
        rows.append(ComparisonRow(
            policy=SchedulePolicy.PROPOSED,
            procs=procs,
            makespan=prop.makespan,
            utilization=prop.utilization,
            total_processor_cycles=prop.total_processor_cycles,
            total_accesses=prop.total_accesses,
            cycle_reduction_pct=_reduction_pct(prop.total_processor_cycles, base.total_processor_cycles),
            access_reduction_pct=_reduction_pct(prop.total_accesses, base.total_accesses),
        ))
        logger.info(
            "{} procs: baseline {} cycles/proc, proposed {} cycles/proc",
            procs, base.makespan, prop.makespan,
        )
    return PolicyComparison(layer_dims=list(layer_dims), batch=batch, baseline=baseline, rows=rows)

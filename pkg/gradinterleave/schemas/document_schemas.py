"""
JSON Schemas for the documents the command-line interface writes.
Every document carries schema_version and the run configuration.
"""

from gradinterleave.schemas.report_schemas import (
    ACCESS_COUNTERS_SCHEMA,
    COUNT,
    CYCLE_REPORT_SCHEMA,
    FORMULA_TRACE_SCHEMA,
    PASS_COST_SCHEMA,
    SAVING_SCHEMA,
)

DIGEST = {"type": "string", "pattern": "^[0-9a-f]{64}$"}

RUN_CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"type": "string"},
        "seed": {"type": "integer"},
        "precision": {"enum": ["int", "f64"]},
        "format": {"enum": ["json", "csv"]},
    },
    "required": ["command", "seed", "precision", "format"],
}

GOLDEN_DOCUMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"type": "string"},
        "config": RUN_CONFIG_SCHEMA,
        "inputs": {"type": "object", "additionalProperties": DIGEST},
        "outputs": {"type": "object", "additionalProperties": DIGEST},
        "matrices": {
            "type": ["object", "null"],
            "additionalProperties": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "number"}},
            },
        },
    },
    "required": ["schema_version", "config", "inputs", "outputs", "matrices"],
    "additionalProperties": False
}

SIM_DOCUMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"type": "string"},
        "config": RUN_CONFIG_SCHEMA,
        "mode": {"enum": ["ws", "os", "is", "interleaved"]},
        "cycles": CYCLE_REPORT_SCHEMA,
        "accesses": ACCESS_COUNTERS_SCHEMA,
        "passes": {"type": "object", "additionalProperties": PASS_COST_SCHEMA},
        "outputs": {"type": "object", "additionalProperties": DIGEST},
        "check": {"type": ["string", "null"]},
    },
    "required": ["schema_version", "config", "mode", "cycles", "accesses", "passes", "outputs", "check"],
    "additionalProperties": False
}

ESTIMATE_DOCUMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"type": "string"},
        "config": RUN_CONFIG_SCHEMA,
        "mode": {"enum": ["ws", "os", "is", "interleaved"]},
        "step": {"type": "string"},
        "cycles": CYCLE_REPORT_SCHEMA,
        "accesses": ACCESS_COUNTERS_SCHEMA,
        "formula_trace": FORMULA_TRACE_SCHEMA,
        "savings": {"type": "array", "items": SAVING_SCHEMA},
    },
    "required": ["schema_version", "config", "mode", "step", "cycles", "accesses", "formula_trace", "savings"],
    "additionalProperties": False
}

TIMELINE_ENTRY_SCHEMA = {
    "type": "object",
    "properties": {
        "proc": COUNT,
        "node_id": COUNT,
        "kind": {"type": "string"},
        "layer": COUNT,
        "start": COUNT,
        "end": COUNT,
    },
    "required": ["proc", "node_id", "kind", "layer", "start", "end"],
    "additionalProperties": False
}

SCHEDULE_RESULT_SCHEMA = {
    "type": "object",
    "properties": {
        "procs": {"type": "integer", "minimum": 1},
        "timeline": {"type": "array", "items": TIMELINE_ENTRY_SCHEMA},
        "makespan": COUNT,
        "busy_cycles": COUNT,
        "total_accesses": COUNT,
        "total_processor_cycles": COUNT,
        "utilization": {"type": "number", "minimum": 0, "maximum": 1},
    },
    "required": [
        "procs",
        "timeline",
        "makespan",
        "busy_cycles",
        "total_accesses",
        "total_processor_cycles",
        "utilization",
    ],
    "additionalProperties": False
}

COMPARISON_ROW_SCHEMA = {
    "type": "object",
    "properties": {
        "policy": {"type": "string"},
        "procs": {"type": "integer", "minimum": 1},
        "makespan": COUNT,
        "utilization": {"type": "number"},
        "total_processor_cycles": COUNT,
        "total_accesses": COUNT,
        "cycle_reduction_pct": {"type": ["number", "null"]},
        "access_reduction_pct": {"type": ["number", "null"]},
    },
    "required": ["policy", "procs", "makespan", "utilization", "total_processor_cycles", "total_accesses"],
    "additionalProperties": False
}

SCHEDULE_DOCUMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"type": "string"},
        "config": RUN_CONFIG_SCHEMA,
        "schedules": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "policy": {"type": "string"},
                    "result": SCHEDULE_RESULT_SCHEMA,
                },
                "required": ["policy", "result"],
                "additionalProperties": False
            },
        },
        "comparison": {
            "type": ["object", "null"],
            "properties": {
                "layer_dims": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "batch": {"type": "integer", "minimum": 1},
                "baseline": {"type": "string"},
                "rows": {"type": "array", "items": COMPARISON_ROW_SCHEMA},
            },
        },
    },
    "required": ["schema_version", "config", "schedules", "comparison"],
    "additionalProperties": False
}

COMPARE_DOCUMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"type": "string"},
        "config": RUN_CONFIG_SCHEMA,
        "interleaved": PASS_COST_SCHEMA,
        "separate": PASS_COST_SCHEMA,
        "cycle_difference": {"type": "integer"},
        "access_difference": {"type": "integer"},
        "delta_reuse": SAVING_SCHEMA,
        "inplace_update": SAVING_SCHEMA,
        "outputs_match": {"type": "boolean"},
    },
    "required": [
        "schema_version",
        "config",
        "interleaved",
        "separate",
        "cycle_difference",
        "access_difference",
        "delta_reuse",
        "inplace_update",
        "outputs_match",
    ],
    "additionalProperties": False
}

BENCH_DOCUMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"type": "string"},
        "config": RUN_CONFIG_SCHEMA,
        "kind": {"enum": ["sweep", "cnn"]},
        "normalize_to": {"type": "string"},
        "rows": {"type": "array", "items": {"type": "object"}},
        "aggregates": {"type": "array", "items": {"type": "object"}},
        "summary": {"type": "object"},
    },
    "required": ["schema_version", "config", "kind", "normalize_to", "rows", "aggregates", "summary"],
    "additionalProperties": False
}

CNN_SUMMARY_SCHEMA = {
    "type": "object",
    "properties": {
        "net": {"type": "string"},
        "best_cycles": COUNT,
        "best_accesses": COUNT,
        "best_drain_cycles": COUNT,
        "interleaved_cycles": COUNT,
        "interleaved_accesses": COUNT,
        "interleaved_drain_cycles": COUNT,
        "cycle_ratio": {"type": "number", "exclusiveMinimum": 0},
        "access_ratio": {"type": "number", "exclusiveMinimum": 0},
        "cycle_reduction_pct": {"type": "number"},
        "access_reduction_pct": {"type": "number"},
        "drain_free_cycle_reduction_pct": {"type": "number"},
        "formula_trace": FORMULA_TRACE_SCHEMA,
    },
    "required": [
        "net",
        "best_cycles",
        "best_accesses",
        "best_drain_cycles",
        "interleaved_cycles",
        "interleaved_accesses",
        "interleaved_drain_cycles",
        "cycle_ratio",
        "access_ratio",
        "cycle_reduction_pct",
        "access_reduction_pct",
        "drain_free_cycle_reduction_pct",
        "formula_trace",
    ],
    "additionalProperties": False
}

"""
JSON Schemas for the cycle, counter and cost fragments shared by every report.
"""

COUNT = {"type": "integer", "minimum": 0}

CYCLE_REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "load_cycles": COUNT,
        "compute_cycles": COUNT,
        "drain_cycles": COUNT,
        "unload_cycles": COUNT,
        "update_cycles": COUNT,
        "total_cycles": COUNT,
    },
    "required": [
        "load_cycles",
        "compute_cycles",
        "drain_cycles",
        "unload_cycles",
        "update_cycles",
        "total_cycles",
    ],
    "additionalProperties": False
}

ACCESS_COUNTERS_SCHEMA = {
    "type": "object",
    "properties": {
        "reads_weight": COUNT,
        "reads_delta": COUNT,
        "reads_activation": COUNT,
        "reads_grad": COUNT,
        "reads_partial": COUNT,
        "writes_grad": COUNT,
        "writes_weight": COUNT,
        "writes_result": COUNT,
        "total_reads": COUNT,
        "total_writes": COUNT,
    },
    "required": [
        "reads_weight",
        "reads_delta",
        "reads_activation",
        "reads_grad",
        "reads_partial",
        "writes_grad",
        "writes_weight",
        "writes_result",
        "total_reads",
        "total_writes",
    ],
    "additionalProperties": False
}

PASS_COST_SCHEMA = {
    "type": "object",
    "properties": {
        "cycles": CYCLE_REPORT_SCHEMA,
        "accesses": ACCESS_COUNTERS_SCHEMA,
    },
    "required": ["cycles", "accesses"],
    "additionalProperties": False
}

FORMULA_TRACE_SCHEMA = {
    "type": "array",
    "items": {
        "type": "array",
        "prefixItems": [{"type": "string"}, {"type": "integer"}],
        "minItems": 2,
        "maxItems": 2,
    },
}

SAVING_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "floor_expression": COUNT,
        "first_principles": COUNT,
        "discrepancy": {"type": "boolean"},
    },
    "required": ["name", "floor_expression", "first_principles", "discrepancy"],
    "additionalProperties": False
}

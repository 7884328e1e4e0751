"""
Assertions over CLI report documents and simulator cost records: schema and
model validation of documents, and field-by-field comparison of cycle
reports and access counters.
"""

import pytest
from jsonschema import validate, ValidationError as JsonSchemaValidationError
from pydantic import ValidationError as PydanticValidationError

from gradinterleave.models.report_models import ACCESS_FIELDS


def validate_report_document(document, schema, model, label=""):
    """
    Validate a decoded report document against its JSON Schema and its
    document model.
    Args:
        document: The decoded JSON report.
        schema: The document's JSON Schema.
        model: The pydantic document model.
        label: Names the report in failure messages; defaults to the
            command recorded in the document's run configuration.
    Returns:
        The parsed document model.
    Raises:
        AssertionError: If the report fails either validation.
    """
    context = label or document.get("config", {}).get("command", "report")
    try:
        validate(instance=document, schema=schema)
    except JsonSchemaValidationError as e:
        pytest.fail(f"{context} report breaks its JSON Schema: {e.message} at {list(e.absolute_path)}")
    try:
        return model.model_validate(document)
    except PydanticValidationError as e:
        pytest.fail(f"{context} report does not parse as {model.__name__}: {e}")


def assert_counters_equal(actual, expected, label=""):
    """
    Assert two AccessCounters agree on every operand counter.
    Raises:
        AssertionError: Naming each counter that differs.
    """
    diffs = {
        name: (getattr(actual, name), getattr(expected, name))
        for name in ACCESS_FIELDS
        if getattr(actual, name) != getattr(expected, name)
    }
    assert not diffs, f"{label} counters differ (actual, expected): {diffs}"


def assert_cycles_equal(actual, expected, label=""):
    """
    Assert two CycleReports agree phase by phase.
    Raises:
        AssertionError: If any phase differs.
    """
    assert actual.model_dump() == expected.model_dump(), (
        f"{label} cycles differ: {actual.model_dump()} vs {expected.model_dump()}"
    )

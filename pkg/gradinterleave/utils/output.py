"""
Serialization of reports to stable JSON and CSV text, and reading back the
run configuration a report embeds.
"""

import json
import sys
from pathlib import Path

import numpy as np
from pydantic import BaseModel

from gradinterleave.core.matrix import matrix_digest
from gradinterleave.errors import ConfigurationError
from gradinterleave.models.config_models import RunConfig

CONFIG_HEADER = "# run_config="


def to_json(document: BaseModel | dict) -> str:
    """
    Sorted-key, indented JSON with a trailing newline.
    """
    payload = document.model_dump(mode="json") if isinstance(document, BaseModel) else document
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def with_config_header(csv_text: str, config: BaseModel) -> str:
    """
    Prefix a CSV table with a comment line carrying the run configuration.
    Read it back with pandas.read_csv(..., comment="#").
    """
    compact = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return f"{CONFIG_HEADER}{compact}\n{csv_text}"


def digests(matrices: dict[str, np.ndarray | None]) -> dict[str, str]:
    return {name: matrix_digest(matrix) for name, matrix in matrices.items() if matrix is not None}


def matrix_lists(matrices: dict[str, np.ndarray | None]) -> dict[str, list]:
    return {name: matrix.tolist() for name, matrix in matrices.items() if matrix is not None}


def emit(text: str, out: str | None) -> None:
    """
    Write text to the given path, or to stdout when no path is given.
    """
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def load_run_config(path: str | Path) -> RunConfig:
    """
    The run configuration a report was produced with: the header line of a
    CSV report, the "config" member of a JSON document, or a bare
    configuration object.
    Raises:
        ConfigurationError: If the file is missing or carries no configuration.
    """
    source = Path(path)
    if not source.is_file():
        raise ConfigurationError(f"no such report: {source}")
    text = source.read_text()
    if text.startswith(CONFIG_HEADER):
        return RunConfig.model_validate_json(text.splitlines()[0][len(CONFIG_HEADER):])
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{source} is neither a JSON nor a CSV report") from exc
    if not isinstance(document, dict):
        raise ConfigurationError(f"{source} carries no run configuration")
    return RunConfig.model_validate(document.get("config", document))

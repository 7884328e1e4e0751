"""
Benchmark report tables: flat per-(config, mode) rows as pandas DataFrames,
normalization against a reference mode and the headline ratios.
"""

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from gradinterleave.errors import ConfigurationError
from gradinterleave.models.config_models import SCHEMA_VERSION
from gradinterleave.models.core_models import ArrayGeometry, DataflowMode, LayerShape
from gradinterleave.models.report_models import AccessCounters, CycleReport

CSV_COLUMNS = [
    "schema_version",
    "n", "m", "batch", "p", "q", "mode",
    "cycles_total", "cycles_load", "cycles_compute", "cycles_drain", "cycles_unload", "cycles_update",
    "reads_total", "writes_total",
    "reads_delta", "reads_weight", "reads_activation", "reads_grad", "reads_partial",
    "writes_grad", "writes_weight", "writes_result",
    "norm_cycles", "norm_accesses",
]
CONFIG_KEYS = ["n", "m", "batch", "p", "q"]
BEST_BASELINE = "best_baseline"
SAVING = "saving"
MODE_ORDER = [mode.value for mode in DataflowMode] + [BEST_BASELINE, SAVING]


class BenchReport(BaseModel):
    """
    Rows follow CSV_COLUMNS (CNN reports prepend net and layer); aggregates
    hold per-size means across batches, normalized after averaging.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: str
    config: dict = Field(default_factory=dict)
    normalize_to: str
    rows: pd.DataFrame
    aggregates: pd.DataFrame

    def to_csv(self) -> str:
        return self.rows.to_csv(index=False, lineterminator="\n")

    def select(self, mode: str) -> pd.DataFrame:
        return self.rows[self.rows["mode"] == mode]


def cost_row(shape: LayerShape, geom: ArrayGeometry, mode: str, cycles: CycleReport, accesses: AccessCounters) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n": shape.n_out,
        "m": shape.m_in,
        "batch": shape.batch,
        "p": geom.p,
        "q": geom.q,
        "mode": mode,
        "cycles_total": cycles.total_cycles,
        "cycles_load": cycles.load_cycles,
        "cycles_compute": cycles.compute_cycles,
        "cycles_drain": cycles.drain_cycles,
        "cycles_unload": cycles.unload_cycles,
        "cycles_update": cycles.update_cycles,
        "reads_total": accesses.total_reads,
        "writes_total": accesses.total_writes,
        **accesses.counts(),
    }


def difference_row(best: dict, other: dict, mode: str) -> dict:
    """
    Field-wise best - other for every numeric cost column.
    """
    row = dict(best)
    row["mode"] = mode
    for column in CSV_COLUMNS[7:-2]:
        row[column] = best[column] - other[column]
    return row


def sort_rows(rows: pd.DataFrame, leading: list[str] | None = None) -> pd.DataFrame:
    keys = (leading or []) + CONFIG_KEYS
    order = rows["mode"].map({mode: index for index, mode in enumerate(MODE_ORDER)})
    ordered = rows.assign(_order=order).sort_values(keys + ["_order"], kind="mergesort")
    return ordered.drop(columns="_order").reset_index(drop=True)


def normalize(rows: pd.DataFrame, reference: str, leading: list[str] | None = None) -> pd.DataFrame:
    """
    Divide each row's cycles and accesses by the reference mode's values for
    the same configuration.
    Raises:
        ConfigurationError: If the reference mode is missing for a configuration.
    """
    keys = (leading or []) + CONFIG_KEYS
    groups = [rows[key] for key in keys]
    accesses = rows["reads_total"] + rows["writes_total"]
    is_reference = rows["mode"] == reference
    ref_cycles = rows["cycles_total"].where(is_reference).groupby(groups).transform("max")
    ref_accesses = accesses.where(is_reference).groupby(groups).transform("max")
    if ref_cycles.isna().any():
        raise ConfigurationError(f"mode {reference} is missing for some configurations")
    normalized = rows.copy()
    normalized["norm_cycles"] = rows["cycles_total"] / ref_cycles
    normalized["norm_accesses"] = accesses / ref_accesses
    return normalized


def aggregate(rows: pd.DataFrame, reference: str) -> pd.DataFrame:
    """
    Per-size means across batches, then normalized to the reference mode's means.
    """
    frame = rows.assign(accesses_total=rows["reads_total"] + rows["writes_total"])
    means = (
        frame.groupby(["n", "m", "p", "q", "mode"], sort=False)[["cycles_total", "accesses_total"]]
        .mean()
        .rename(columns={"cycles_total": "mean_cycles", "accesses_total": "mean_accesses"})
        .reset_index()
    )
    size_groups = [means[key] for key in ("n", "m", "p", "q")]
    is_reference = means["mode"] == reference
    ref_cycles = means["mean_cycles"].where(is_reference).groupby(size_groups).transform("max")
    ref_accesses = means["mean_accesses"].where(is_reference).groupby(size_groups).transform("max")
    means["norm_cycles"] = means["mean_cycles"] / ref_cycles
    means["norm_accesses"] = means["mean_accesses"] / ref_accesses
    order = means["mode"].map({mode: index for index, mode in enumerate(MODE_ORDER)})
    return (
        means.assign(_order=order)
        .sort_values(["n", "m", "p", "q", "_order"], kind="mergesort")
        .drop(columns="_order")
        .reset_index(drop=True)
    )


def renormalize(report: BenchReport, mode: str) -> BenchReport:
    """
    The same report normalized to another mode; renormalizing to the current
    reference returns equal tables.
    """
    leading = ["net", "layer"] if "net" in report.rows.columns else None
    rows = normalize(report.rows, mode, leading)
    aggregates = aggregate(report.rows, mode) if report.kind == "sweep" else report.aggregates
    return report.model_copy(update={"normalize_to": mode, "rows": rows, "aggregates": aggregates})


class HeadlineRatios(BaseModel):
    """
    Interleaved against the best traditional dataflow. Ratios are
    interleaved / best; reductions are (1 - ratio) in percent.
    """
    model_config = ConfigDict(frozen=True)

    cycle_ratio: float
    access_ratio: float
    cycle_reduction_pct: float
    access_reduction_pct: float
    per_size: list[dict] = Field(default_factory=list)
    formula_trace: list[tuple[str, int]] = Field(default_factory=list)


CYCLE_MODEL_TRACE = [
    ("load_cycles_per_stationary_row", 1),
    ("unload_cycles_per_output_row", 1),
    ("interleaved_phases_per_sample", 2),
    ("interleaved_update_cycles_per_tile", 1),
    ("update_pass_accesses_per_weight", 3),
    ("hadamard_accesses_per_element", 3),
]


def headline_ratios(report: BenchReport) -> HeadlineRatios:
    """
    For each size, average across batches, take the best baseline per metric
    and compare the interleaved mean against it; the headline is the mean
    over sizes.
    Raises:
        ConfigurationError: If the report lacks the interleaved mode or every baseline.
    """
    means = aggregate(report.rows, report.normalize_to)
    baselines = [mode.value for mode in DataflowMode.baselines()]
    per_size = []
    for (n, m, p, q), group in means.groupby(["n", "m", "p", "q"], sort=True):
        by_mode = group.set_index("mode")
        if DataflowMode.INTERLEAVED.value not in by_mode.index:
            raise ConfigurationError("headline ratios need interleaved rows")
        present = [mode for mode in baselines if mode in by_mode.index]
        if not present:
            raise ConfigurationError("headline ratios need at least one baseline mode")
        inter = by_mode.loc[DataflowMode.INTERLEAVED.value]
        best_cycles = min(present, key=lambda mode: by_mode.loc[mode, "mean_cycles"])
        best_accesses = min(present, key=lambda mode: by_mode.loc[mode, "mean_accesses"])
        per_size.append({
            "n": int(n),
            "m": int(m),
            "best_cycles_mode": best_cycles,
            "best_accesses_mode": best_accesses,
            "cycle_ratio": float(inter["mean_cycles"] / by_mode.loc[best_cycles, "mean_cycles"]),
            "access_ratio": float(inter["mean_accesses"] / by_mode.loc[best_accesses, "mean_accesses"]),
        })
    cycle_ratio = sum(entry["cycle_ratio"] for entry in per_size) / len(per_size)
    access_ratio = sum(entry["access_ratio"] for entry in per_size) / len(per_size)
    return HeadlineRatios(
        cycle_ratio=cycle_ratio,
        access_ratio=access_ratio,
        cycle_reduction_pct=100.0 * (1.0 - cycle_ratio),
        access_reduction_pct=100.0 * (1.0 - access_ratio),
        per_size=per_size,
        formula_trace=CYCLE_MODEL_TRACE,
    )

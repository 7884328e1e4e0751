"""
Fully-connected layers of well-known CNNs, read from editable preset files.
"""

from pathlib import Path

import pandas as pd
from loguru import logger
from pydantic import BaseModel, ConfigDict

from gradinterleave import costmodel
from gradinterleave.bench.report import (
    BEST_BASELINE,
    CSV_COLUMNS,
    CYCLE_MODEL_TRACE,
    SAVING,
    BenchReport,
    cost_row,
    difference_row,
    normalize,
    sort_rows,
)
from gradinterleave.errors import ConfigurationError
from gradinterleave.models.core_models import ArrayGeometry, DataflowMode, LayerShape

PRESET_DIR = Path(__file__).parent / "presets"
CNN_COLUMNS = ["schema_version", "net", "layer"] + CSV_COLUMNS[1:]
CNN_CYCLE_TRACE = [
    *CYCLE_MODEL_TRACE,
    ("drain_cycles_per_extra_tile_row_or_column", 1),
    ("drain_paid_by_separate_backward", 2),
    ("drain_paid_by_interleaved_backward", 1),
]


def available_presets(preset_dir: Path = PRESET_DIR) -> list[str]:
    return sorted(path.stem for path in preset_dir.glob("*.txt"))


def load_preset(net: str, preset_dir: Path = PRESET_DIR) -> list[tuple[int, int]]:
    """
    Read one "n,m" pair per line; blank lines and # comments are ignored.
    Raises:
        ConfigurationError: If the preset does not exist or a line is malformed.
    """
    path = preset_dir / f"{net}.txt"
    if not path.is_file():
        raise ConfigurationError(f"unknown network preset {net!r}; available: {', '.join(available_presets(preset_dir))}")
    layers = []
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            n_out, m_in = (int(part) for part in text.split(","))
        except ValueError as exc:
            raise ConfigurationError(f"{path.name}:{number}: expected 'n,m', got {line!r}") from exc
        if n_out < 1 or m_in < 1:
            raise ConfigurationError(f"{path.name}:{number}: layer dims must be >= 1")
        layers.append((n_out, m_in))
    if not layers:
        raise ConfigurationError(f"preset {net!r} lists no layers")
    return layers


class NetTotals(BaseModel):
    """
    Whole-network sums of the best baseline and interleaved loops. The drain
    sums isolate the per-tile (h-1)+(k-1) wavefront term, which the
    interleaved tile pays once and the separate backward passes pay twice.
    """
    model_config = ConfigDict(frozen=True)

    net: str
    best_cycles: int
    best_accesses: int
    best_drain_cycles: int
    interleaved_cycles: int
    interleaved_accesses: int
    interleaved_drain_cycles: int

    @property
    def cycle_ratio(self) -> float:
        return self.best_cycles / self.interleaved_cycles

    @property
    def access_ratio(self) -> float:
        return self.best_accesses / self.interleaved_accesses

    @property
    def cycle_reduction_pct(self) -> float:
        return 100.0 * (1.0 - self.interleaved_cycles / self.best_cycles)

    @property
    def access_reduction_pct(self) -> float:
        return 100.0 * (1.0 - self.interleaved_accesses / self.best_accesses)

    @property
    def drain_free_cycle_reduction_pct(self) -> float:
        """
        Cycle reduction with the wavefront drain phase left out of both sides:
        load, stream, unload and update cycles only.
        """
        best = self.best_cycles - self.best_drain_cycles
        inter = self.interleaved_cycles - self.interleaved_drain_cycles
        return 100.0 * (1.0 - inter / best)

    def summary(self) -> dict:
        return {
            **self.model_dump(mode="json"),
            "cycle_ratio": self.cycle_ratio,
            "access_ratio": self.access_ratio,
            "cycle_reduction_pct": self.cycle_reduction_pct,
            "access_reduction_pct": self.access_reduction_pct,
            "drain_free_cycle_reduction_pct": self.drain_free_cycle_reduction_pct,
            "formula_trace": CNN_CYCLE_TRACE,
        }


def run_cnn_fc(net: str, batch: int, geom: ArrayGeometry, preset_dir: Path = PRESET_DIR) -> BenchReport:
    """
    Per-layer loop costs of a network's FC layers in every mode, plus the
    per-layer best baseline (argmin cycles over WS, OS, IS) and its saving over
    the interleaved design. Rows are normalized to the best baseline, so the
    saving row's norm values are the fractions saved.
    Raises:
        ConfigurationError: For an unknown preset.
    """
    layers = load_preset(net, preset_dir)
    records = []
    for index, (n_out, m_in) in enumerate(layers, start=1):
        shape = LayerShape(n_out=n_out, m_in=m_in, batch=batch)
        by_mode = {}
        for mode in DataflowMode:
            estimate = costmodel.estimate_loop(shape, geom, mode)
            by_mode[mode] = cost_row(shape, geom, mode.value, estimate.cycles, estimate.accesses)
        best = min(DataflowMode.baselines(), key=lambda mode: by_mode[mode]["cycles_total"])
        best_row = {**by_mode[best], "mode": BEST_BASELINE}
        saving_row = difference_row(best_row, by_mode[DataflowMode.INTERLEAVED], SAVING)
        for row in [*by_mode.values(), best_row, saving_row]:
            records.append({"net": net, "layer": index, **row})
        logger.debug("{} layer {} ({}x{}): best baseline {}", net, index, n_out, m_in, best.value)

    rows = pd.DataFrame(records, columns=CNN_COLUMNS[:-2])
    rows = normalize(sort_rows(rows, ["net", "layer"]), BEST_BASELINE, ["net", "layer"])[CNN_COLUMNS]
    totals = net_totals_frame(rows)
    logger.info("{} FC layers at B={}: {} rows", net, batch, len(rows))
    return BenchReport(
        kind="cnn",
        config={"net": net, "batch": batch, "geom": geom.model_dump(mode="json"), "layers": layers},
        normalize_to=BEST_BASELINE,
        rows=rows,
        aggregates=totals,
    )


def net_totals_frame(rows: pd.DataFrame) -> pd.DataFrame:
    frame = rows.assign(accesses_total=rows["reads_total"] + rows["writes_total"])
    return (
        frame.groupby(["net", "mode"], sort=False)[["cycles_total", "accesses_total"]]
        .sum()
        .reset_index()
    )


def net_totals(report: BenchReport) -> NetTotals:
    """
    Raises:
        ConfigurationError: If the report is not a CNN report.
    """
    if report.kind != "cnn":
        raise ConfigurationError("net totals need a CNN report")
    best = report.select(BEST_BASELINE)
    inter = report.select(DataflowMode.INTERLEAVED.value)
    return NetTotals(
        net=str(report.config["net"]),
        best_cycles=int(best["cycles_total"].sum()),
        best_accesses=int((best["reads_total"] + best["writes_total"]).sum()),
        best_drain_cycles=int(best["cycles_drain"].sum()),
        interleaved_cycles=int(inter["cycles_total"].sum()),
        interleaved_accesses=int((inter["reads_total"] + inter["writes_total"]).sum()),
        interleaved_drain_cycles=int(inter["cycles_drain"].sum()),
    )

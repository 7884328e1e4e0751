"""
Tests for the normalized sweeps, the headline ratios and the CNN
fully-connected presets.
"""

import pandas as pd
import pytest

from gradinterleave import costmodel
from gradinterleave.bench import (
    SIMULATION_CAP,
    available_presets,
    headline_ratios,
    load_preset,
    net_totals,
    renormalize,
    run_cnn_fc,
    run_sweep,
)
from gradinterleave.bench.report import BEST_BASELINE, CSV_COLUMNS, SAVING
from gradinterleave.errors import ConfigurationError
from gradinterleave.models.config_models import Engine, SweepSpec
from gradinterleave.models.core_models import ArrayGeometry, DataflowMode, LayerShape, StepKind


# --- Helpers & Constants ---

FULL_GEOMETRY = ArrayGeometry(p=128, q=128)

HEADLINE_SPEC = SweepSpec(
    sizes=[(size, size) for size in (128, 256, 512, 1024)],
    batches=[4, 16, 64],
    geom=FULL_GEOMETRY,
)

SMALL_SPEC = SweepSpec(
    sizes=[(8, 8), (12, 6), (5, 9)],
    batches=[1, 3],
    geom=ArrayGeometry(p=4, q=4),
)

VALUE_COLUMNS = CSV_COLUMNS[7:]


@pytest.fixture(scope="module")
def headline_report():
    return run_sweep(HEADLINE_SPEC)


# --- Tests for sweeps ---

def test_sweep_rows_cover_every_point_and_mode(headline_report):
    rows = headline_report.rows
    assert list(rows.columns) == CSV_COLUMNS
    assert len(rows) == 4 * 3 * len(DataflowMode)
    assert set(rows["schema_version"]) == {"1.0"}


def test_reference_mode_normalizes_to_one(headline_report):
    reference = headline_report.select(DataflowMode.WS.value)
    assert (reference["norm_cycles"] == 1.0).all()
    assert (reference["norm_accesses"] == 1.0).all()


def test_interleaved_is_below_reference_everywhere(headline_report):
    interleaved = headline_report.select(DataflowMode.INTERLEAVED.value)
    assert (interleaved["norm_cycles"] < 1.0).all()
    assert (interleaved["norm_accesses"] < 1.0).all()


def test_headline_ratios(headline_report):
    """
    Interleaved against the best traditional dataflow, averaged over batches
    and then over sizes: around 30% fewer cycles and 42% fewer accesses.
    """
    ratios = headline_ratios(headline_report)
    assert abs(ratios.cycle_reduction_pct - 30) <= 8, f"Got {ratios.cycle_reduction_pct:.2f}%"
    assert abs(ratios.access_reduction_pct - 42) <= 8, f"Got {ratios.access_reduction_pct:.2f}%"
    assert len(ratios.per_size) == 4
    assert ("interleaved_phases_per_sample", 2) in ratios.formula_trace


def test_renormalize_is_idempotent(headline_report):
    same = renormalize(headline_report, DataflowMode.WS.value)
    pd.testing.assert_frame_equal(same.rows, headline_report.rows)
    pd.testing.assert_frame_equal(same.aggregates, headline_report.aggregates)


def test_renormalize_to_another_mode(headline_report):
    report = renormalize(headline_report, DataflowMode.OS.value)
    assert (report.select(DataflowMode.OS.value)["norm_cycles"] == 1.0).all()
    assert report.normalize_to == DataflowMode.OS.value
    assert headline_ratios(report).cycle_ratio == pytest.approx(headline_ratios(headline_report).cycle_ratio)


def test_aggregates_are_normalized_after_averaging(headline_report):
    aggregates = headline_report.aggregates
    assert len(aggregates) == 4 * len(DataflowMode)
    ws = aggregates[aggregates["mode"] == DataflowMode.WS.value]
    assert (ws["norm_cycles"] == 1.0).all()


def test_analytic_and_simulated_sweeps_agree():
    analytic = run_sweep(SMALL_SPEC, Engine.ANALYTIC)
    simulated = run_sweep(SMALL_SPEC, Engine.SIMULATED)
    pd.testing.assert_frame_equal(analytic.rows, simulated.rows)


def test_simulated_sweep_enforces_cap():
    spec = SweepSpec(sizes=[(2048, 2048)], batches=[2], geom=FULL_GEOMETRY)
    assert 2048 * 2048 * 2 > SIMULATION_CAP
    with pytest.raises(ConfigurationError):
        run_sweep(spec, Engine.SIMULATED)


def test_sweep_is_deterministic_across_workers():
    first = run_sweep(HEADLINE_SPEC)
    parallel = run_sweep(HEADLINE_SPEC, workers=2)
    assert first.to_csv() == parallel.to_csv()


def test_sweep_spec_rejects_unswept_reference():
    with pytest.raises(ConfigurationError):
        SweepSpec(
            sizes=[(8, 8)], batches=[1], geom=FULL_GEOMETRY,
            modes=[DataflowMode.OS, DataflowMode.INTERLEAVED], normalize_to=DataflowMode.WS,
        )


# --- Tests for CNN presets ---

def test_presets_are_available():
    assert {"alexnet", "vgg16"} <= set(available_presets())
    assert load_preset("alexnet") == [(4096, 9216), (4096, 4096), (1000, 4096)]


def test_cnn_rows_per_layer():
    report = run_cnn_fc("alexnet", 32, FULL_GEOMETRY)
    assert len(report.rows) == 3 * 6
    assert list(report.rows.columns[:3]) == ["schema_version", "net", "layer"]
    best = report.select(BEST_BASELINE)
    assert (best["norm_cycles"] == 1.0).all()


@pytest.mark.parametrize("net", ["alexnet", "vgg16"])
def test_interleaved_beats_best_baseline_on_every_layer(net):
    report = run_cnn_fc(net, 32, FULL_GEOMETRY)
    saving = report.select(SAVING)
    assert (saving["cycles_total"] > 0).all()
    assert ((saving["reads_total"] + saving["writes_total"]) > 0).all()
    assert (report.select(DataflowMode.INTERLEAVED.value)["norm_cycles"] < 1.0).all()


@pytest.mark.parametrize("net", ["alexnet", "vgg16"])
def test_network_ratios_against_best_baseline(net):
    """
    Whole-network best baseline over interleaved at batch 32 on 128x128.
    """
    totals = net_totals(run_cnn_fc(net, 32, FULL_GEOMETRY))
    assert 1.4 <= totals.cycle_ratio <= 2.2, f"Got {totals.cycle_ratio:.3f}"
    assert 1.5 <= totals.access_ratio <= 1.9, f"Got {totals.access_ratio:.3f}"
    assert totals.access_reduction_pct >= 40.0, f"Got {totals.access_reduction_pct:.1f}%"
    assert abs(totals.drain_free_cycle_reduction_pct - 29.0) <= 10.0, (
        f"Got {totals.drain_free_cycle_reduction_pct:.1f}%"
    )


@pytest.mark.parametrize("net", ["alexnet", "vgg16"])
def test_cycle_reduction_gap_is_one_backward_drain(net):
    """
    The full-model reduction exceeds the drain-free one by exactly the drain
    of the backward pass the interleaved tile no longer repeats.
    """
    totals = net_totals(run_cnn_fc(net, 32, FULL_GEOMETRY))
    repeated_drain = sum(
        costmodel.estimate(
            LayerShape(n_out=n_out, m_in=m_in, batch=32), FULL_GEOMETRY, DataflowMode.WS, StepKind.BACKWARD_DELTA,
        ).cycles.drain_cycles
        for n_out, m_in in load_preset(net)
    )
    assert totals.best_drain_cycles - totals.interleaved_drain_cycles == repeated_drain
    assert totals.cycle_reduction_pct > totals.drain_free_cycle_reduction_pct


def test_vgg16_totals():
    totals = net_totals(run_cnn_fc("vgg16", 32, FULL_GEOMETRY))
    assert (totals.best_cycles, totals.interleaved_cycles) == (7244795, 4361473)
    assert (totals.best_accesses, totals.interleaved_accesses) == (929774848, 527965440)
    assert totals.best_cycles - totals.best_drain_cycles == 3398563
    assert totals.interleaved_cycles - totals.interleaved_drain_cycles == 2432681


def test_unknown_net_is_rejected():
    with pytest.raises(ConfigurationError):
        run_cnn_fc("lenet-9000", 32, FULL_GEOMETRY)


def test_malformed_preset_is_rejected(tmp_path):
    (tmp_path / "broken.txt").write_text("# comment\n4096;4096\n")
    with pytest.raises(ConfigurationError):
        load_preset("broken", tmp_path)


def test_custom_preset_directory(tmp_path):
    (tmp_path / "tiny.txt").write_text("# two layers\n\n16,32\n8,16  # head\n")
    report = run_cnn_fc("tiny", 4, ArrayGeometry(p=8, q=8), preset_dir=tmp_path)
    assert load_preset("tiny", tmp_path) == [(16, 32), (8, 16)]
    assert len(report.rows) == 2 * 6


def test_net_totals_need_cnn_report():
    with pytest.raises(ConfigurationError):
        net_totals(run_sweep(SMALL_SPEC))

"""
Sweep harness and CNN fully-connected presets.
"""

from gradinterleave.bench.cnn import NetTotals, available_presets, load_preset, net_totals, run_cnn_fc
from gradinterleave.bench.report import BenchReport, HeadlineRatios, headline_ratios, renormalize
from gradinterleave.bench.sweep import SIMULATION_CAP, analytic_loops, run_sweep, simulated_loops

__all__ = [
    "SIMULATION_CAP",
    "BenchReport",
    "HeadlineRatios",
    "NetTotals",
    "analytic_loops",
    "available_presets",
    "headline_ratios",
    "load_preset",
    "net_totals",
    "renormalize",
    "run_cnn_fc",
    "run_sweep",
    "simulated_loops",
]

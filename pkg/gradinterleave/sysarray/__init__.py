"""
Cycle-stepped simulation of the PE grid in WS, OS, IS and interleaved modes.
"""

from gradinterleave.sysarray.layer import (
    LayerRun,
    hadamard_pass,
    run_forward,
    run_layer,
    run_separate,
    tile_spans,
    update_pass,
)
from gradinterleave.sysarray.tiles import TileJob, run_tile_interleaved, run_tile_os, run_tile_ws

__all__ = [
    "LayerRun",
    "TileJob",
    "hadamard_pass",
    "run_forward",
    "run_layer",
    "run_separate",
    "run_tile_interleaved",
    "run_tile_os",
    "run_tile_ws",
    "tile_spans",
    "update_pass",
]

"""
Cycle-accurate simulator and analytic cost model for a configurable systolic
array that trains fully-connected layers by interleaving the activation- and
weight-gradient computations on one PE grid.
"""

__version__ = "1.0.0"

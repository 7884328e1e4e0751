"""
Register-level model of the P x Q processing-element grid.

Arrays are indexed [y][x]: row y is the vertical position (0 at the north
edge), column x the horizontal position (0 at the west edge). Each PE holds a
stationary word, a local accumulator and two pipeline registers, one feeding
its east neighbour and one feeding its south neighbour.
"""

import numpy as np


def edge_feed(operand: np.ndarray, cycle: int, stretch: int = 1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Values presented on one array edge at a given cycle.

    Lane i carries operand[i] skewed by i cycles; every element is held on the
    edge for `stretch` consecutive cycles.
    Args:
        operand (np.ndarray): lanes x length matrix, one row per edge lane.
        cycle (int): Cycle index relative to the start of streaming.
        stretch (int): Cycles each element stays on the lane.
    Returns:
        tuple: (values, valid mask, fresh mask). A lane is fresh on the first
            cycle an element appears, i.e. when the word is read from SRAM.
    """
    lanes, length = operand.shape
    offset = cycle - np.arange(lanes)
    valid = (offset >= 0) & (offset < length * stretch)
    index = np.where(valid, offset // stretch, 0)
    values = np.where(valid, operand[np.arange(lanes), index], 0).astype(operand.dtype, copy=False)
    fresh = valid & (offset % stretch == 0)
    return values, valid, fresh


class PEGrid:
    """
    State of every PE in a rows x cols tile of the array.
    """

    def __init__(self, rows: int, cols: int, dtype):
        self.rows = rows
        self.cols = cols
        self.dtype = dtype
        self.w_stationary = np.zeros((rows, cols), dtype=dtype)
        self.g_accum = np.zeros((rows, cols), dtype=dtype)
        self.pipe_west = np.zeros((rows, cols), dtype=dtype)
        self.pipe_south = np.zeros((rows, cols), dtype=dtype)
        y, x = np.indices((rows, cols))
        self.wavefront = y + x  # cycle offset at which PE(x, y) sees element 0

    def load_stationary(self, matrix: np.ndarray) -> int:
        """
        Shift a rows x cols matrix in from the north edge, one row per cycle.
        Returns:
            int: Cycles spent (one per row).
        """
        for row in reversed(range(self.rows)):
            self.w_stationary[1:] = self.w_stationary[:-1].copy()
            self.w_stationary[0] = matrix[row]
        return self.rows

    def shift(self, west_edge: np.ndarray, north_edge: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """
        Inputs seen by every PE this cycle: edge values on the boundary,
        neighbour pipeline registers from the previous cycle elsewhere.
        """
        west_in = np.empty_like(self.pipe_west)
        west_in[:, 0] = west_edge
        west_in[:, 1:] = self.pipe_west[:, :-1]
        north_in = np.empty_like(self.pipe_south)
        north_in[0, :] = north_edge
        north_in[1:, :] = self.pipe_south[:-1, :]
        return west_in, north_in

    def local_time(self, cycle: int) -> np.ndarray:
        return cycle - self.wavefront

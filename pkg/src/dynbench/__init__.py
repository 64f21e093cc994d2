"""Fully dynamic (Delta+1)-coloring and maximal matching algorithms, with generators,
a brute-force oracle and a benchmark harness."""
from .base import AlgorithmAbort
from .graph import (DELETE, INSERT, InvalidUpdate, UpdateOp, UpdateSequence, make_sequence,
                    read_sequence, validate, write_sequence)
from .registry import ALGORITHMS, COLORING, MATCHING, make_algorithm

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "COLORING", "MATCHING", "make_algorithm", "AlgorithmAbort",
    "INSERT", "DELETE", "InvalidUpdate", "UpdateOp", "UpdateSequence", "make_sequence",
    "read_sequence", "write_sequence", "validate",
]

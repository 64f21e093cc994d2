"""Shared plumbing for the dynamic algorithms."""
from __future__ import annotations

import random

from .graph import INSERT, UpdateOp

# n * (delta + 1) count-array entries allowed by default (~400 MB of list slots)
DEFAULT_MEMORY_BUDGET = 50_000_000


class AlgorithmAbort(RuntimeError):
    """The algorithm gave up on an update (e.g. a runaway recoloring cascade)."""


class DynamicAlgorithm:
    """Common surface: ``insert``/``delete`` on canonical edges, ``apply`` on ops."""

    name = "abstract"
    problem = ""

    def __init__(self, n: int, delta: int, seed: int = 0):
        if n < 0 or delta < 0:
            raise ValueError("n and delta must be non-negative")
        self.n = n
        self.delta = delta
        self.seed = seed
        self.rng = random.Random(seed)

    def insert(self, u: int, v: int) -> None:
        raise NotImplementedError

    def delete(self, u: int, v: int) -> None:
        raise NotImplementedError

    def apply(self, op: UpdateOp) -> None:
        kind, u, v = op
        if kind == INSERT:
            self.insert(u, v)
        else:
            self.delete(u, v)

    def counters(self) -> dict[str, int]:
        return {}

    def __repr__(self) -> str:
        return f"<{self.name} n={self.n} delta={self.delta} seed={self.seed}>"


def check_budget(n: int, delta: int, budget: int | None) -> None:
    budget = DEFAULT_MEMORY_BUDGET if budget is None else budget
    if n * (delta + 1) > budget:
        raise MemoryError(
            f"count arrays need n*(delta+1) = {n * (delta + 1)} entries, budget is {budget}")

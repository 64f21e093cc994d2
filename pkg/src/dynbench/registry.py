"""Algorithm lookup by id (case-insensitive)."""
from __future__ import annotations

from .coloring import CountCol, HierCol, RandRCol, RecurseCol
from .matching import Hier1Match, Hier2Match, RandR1Match, TrivialMatch
from .randr2 import RandR2Match

ALGORITHMS = {cls.name: cls for cls in (
    RecurseCol, CountCol, RandRCol, HierCol,
    TrivialMatch, Hier1Match, Hier2Match, RandR1Match, RandR2Match,
)}
COLORING = [k for k, c in ALGORITHMS.items() if c.problem == "coloring"]
MATCHING = [k for k, c in ALGORITHMS.items() if c.problem == "matching"]

_LOWER = {k.lower(): k for k in ALGORITHMS}


def resolve(name: str) -> str:
    try:
        return _LOWER[name.lower()]
    except KeyError:
        raise KeyError(f"unknown algorithm {name!r}; known: {', '.join(ALGORITHMS)}") from None


def make_algorithm(name: str, n: int, delta: int, seed: int = 0, **kw):
    return ALGORITHMS[resolve(name)](n, delta, seed, **kw)

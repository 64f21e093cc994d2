"""Brute-force ground truth for colorings and matchings.

The snapshot checks are pure functions. The incremental checkers replay the
update sequence on their own copy of the graph and only read the algorithm's
exported colors / partners, so they stay independent of algorithm internals.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from sortedcontainers import SortedList

from .graph import INSERT, InvalidUpdate, UpdateOp, normalize_edge


class OracleError(ValueError):
    """The snapshot itself is malformed (not merely failing a property)."""


@dataclass
class Snapshot:
    n: int
    edges: list[tuple[int, int]]
    ranks: dict[tuple[int, int], float] | None = None
    colors: list[int] | None = None
    matching: list[tuple[int, int]] | None = None
    palette: int | None = None


def greedy_lfmm(snap: Snapshot) -> set[tuple[int, int]]:
    """Take edges by ascending rank whenever both endpoints are still free."""
    ranks = snap.ranks
    if ranks is None:
        raise OracleError("snapshot has no edge ranks")
    order = sorted((ranks[e], e) for e in snap.edges)
    for (r1, _), (r2, e) in zip(order, order[1:]):
        if r1 == r2:
            raise OracleError(f"duplicate rank {r1} (edge {e})")
    return _greedy(snap.n, order)


def _greedy(n: int, order) -> set[tuple[int, int]]:
    used = bytearray(n)
    out = set()
    for _, (u, v) in order:
        if not used[u] and not used[v]:
            used[u] = used[v] = 1
            out.add((u, v))
    return out


def is_proper_coloring(snap: Snapshot) -> bool:
    xi = snap.colors
    if xi is None:
        raise OracleError("snapshot has no colors")
    if snap.palette is not None:
        for v, c in enumerate(xi):
            if not 0 <= c < snap.palette:
                raise OracleError(f"color {c} of vertex {v} outside [0, {snap.palette})")
    return all(xi[u] != xi[v] for u, v in snap.edges)


def _checked_partners(snap: Snapshot) -> list[int]:
    if snap.matching is None:
        raise OracleError("snapshot has no matching")
    present = set(snap.edges)
    P = [-1] * snap.n
    for a, b in snap.matching:
        e = normalize_edge(a, b)
        if e not in present:
            raise OracleError(f"matching edge {e} is not in the graph")
        if P[a] != -1 or P[b] != -1:
            raise OracleError(f"matching edge {e} shares an endpoint")
        P[a] = b
        P[b] = a
    return P


def is_maximal_matching(snap: Snapshot) -> bool:
    P = _checked_partners(snap)
    return all(P[u] != -1 or P[v] != -1 for u, v in snap.edges)


def is_lfmm(snap: Snapshot) -> bool:
    """Every unmatched edge must have an incident matching edge of strictly smaller rank."""
    P = _checked_partners(snap)
    ranks = snap.ranks
    if ranks is None:
        raise OracleError("snapshot has no edge ranks")
    INF = float("inf")
    k = [INF] * snap.n
    for u, v in snap.matching:
        k[u] = k[v] = ranks[normalize_edge(u, v)]
    for e in snap.edges:
        u, v = e
        if P[u] == v:
            continue
        r = ranks[e]
        if not (k[u] < r or k[v] < r):
            return False
    return True


def snapshot_of(alg, with_ranks: bool = True) -> Snapshot:
    """Freeze an algorithm's current graph, colors or matching and (if any) edge ranks."""
    edges = sorted(alg.edges())
    snap = Snapshot(alg.n, edges)
    if alg.problem == "coloring":
        snap.colors = alg.export_colors()
        snap.palette = alg.palette
    else:
        snap.matching = alg.export_matching()
        if with_ranks and hasattr(alg, "edge_ranks"):
            snap.ranks = dict(alg.edge_ranks())
    return snap


# -- snapshot text format ----------------------------------------------------

def write_snapshot(snap: Snapshot, out: TextIO) -> None:
    out.write(f"n {snap.n}\n")
    for u, v in snap.edges:
        out.write(f"i {u} {v}\n")
    if snap.ranks is not None:
        for (u, v), r in sorted(snap.ranks.items()):
            out.write(f"r {u} {v} {r!r}\n")
    if snap.matching is not None:
        for u, v in sorted(snap.matching):
            out.write(f"m {u} {v}\n")
    if snap.colors is not None:
        for v, c in enumerate(snap.colors):
            out.write(f"c {v} {c}\n")


def read_snapshot(src: TextIO | str | os.PathLike) -> Snapshot:
    if isinstance(src, (str, os.PathLike)):
        with open(src, encoding="utf-8") as fh:
            return read_snapshot(fh)
    n = None
    edges: list[tuple[int, int]] = []
    present: set[tuple[int, int]] = set()
    ranks: dict = {}
    matching: list = []
    colors: dict[int, int] = {}
    for lineno, raw in enumerate(src, 1):
        line = raw.strip()
        if not line or line[0] == "#":
            continue
        p = line.split()
        try:
            tag = p[0]
            if tag == "n":
                n = int(p[1])
            elif tag in ("i", "d"):
                e = normalize_edge(int(p[1]), int(p[2]))
                if tag == "i":
                    present.add(e)
                    edges.append(e)
                else:
                    present.discard(e)
                    edges = [x for x in edges if x != e]
            elif tag == "r":
                ranks[normalize_edge(int(p[1]), int(p[2]))] = float(p[3])
            elif tag == "m":
                matching.append(normalize_edge(int(p[1]), int(p[2])))
            elif tag == "c":
                colors[int(p[1])] = int(p[2])
            else:
                raise ValueError(tag)
        except (IndexError, ValueError, InvalidUpdate) as exc:
            raise OracleError(f"line {lineno}: malformed record {line!r}") from exc
    if n is None:
        raise OracleError("missing 'n' header")
    snap = Snapshot(n, sorted(set(edges)))
    if ranks:
        snap.ranks = ranks
    if matching:
        snap.matching = matching
    if colors:
        snap.colors = [colors.get(v, 0) for v in range(n)]
    return snap


# -- incremental checkers ----------------------------------------------------

class CheckFailure(AssertionError):
    pass


@dataclass
class _Replay:
    n: int
    adj: list[set[int]] = field(init=False)

    def __post_init__(self):
        self.adj = [set() for _ in range(self.n)]

    def apply(self, op: UpdateOp) -> None:
        kind, u, v = op
        if kind == INSERT:
            self.adj[u].add(v)
            self.adj[v].add(u)
        else:
            self.adj[u].discard(v)
            self.adj[v].discard(u)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, s in enumerate(self.adj) for v in s if u < v]


def _changed(old: list[int], new: list[int]) -> list[int]:
    if old == new:
        return []
    return [i for i, (a, b) in enumerate(zip(old, new)) if a != b]


class ColoringChecker:
    """Checks properness after every update by looking only where it can break.

    If the coloring was proper before an update, a violation afterwards must
    involve the inserted edge or a vertex whose color changed. ``full_every``
    additionally re-checks the whole graph from scratch.
    """

    def __init__(self, alg, full_every: int = 0):
        self.alg = alg
        self.graph = _Replay(alg.n)
        self.prev = list(alg.colors)
        self.palette = alg.palette
        self.full_every = full_every
        self.steps = 0
        self.checks = 0

    def after(self, op: UpdateOp) -> None:
        self.advance((op,))

    def advance(self, ops) -> None:
        """Account for ``ops`` (already applied to the algorithm), then check."""
        graph = self.graph
        inserted = []
        for op in ops:
            graph.apply(op)
            if op.kind == INSERT:
                inserted.append(op)
        xi = self.alg.colors
        adj = graph.adj
        suspects = _changed(self.prev, xi)
        if suspects:
            self.prev = list(xi)
        pal = self.palette
        for v in suspects:
            c = xi[v]
            if not 0 <= c < pal:
                raise CheckFailure(f"vertex {v} has color {c} outside palette")
            for w in adj[v]:
                if xi[w] == c:
                    raise CheckFailure(f"edge {normalize_edge(v, w)} monochromatic ({c})")
        for _, u, v in inserted:
            if v in adj[u] and xi[u] == xi[v]:
                raise CheckFailure(f"inserted edge {(u, v)} monochromatic ({xi[u]})")
        before = self.steps
        self.steps += len(ops)
        self.checks += 1
        fe = self.full_every
        if fe and self.steps // fe != before // fe:
            self.full()

    def full(self) -> None:
        snap = Snapshot(self.alg.n, self.graph.edges(), colors=list(self.alg.colors),
                        palette=self.palette)
        if not is_proper_coloring(snap):
            raise CheckFailure("full sweep found a monochromatic edge")


class MatchingChecker:
    """Maximality (and optionally LFMM equality) after every update.

    Partner-map symmetry and edge membership are verified for every vertex
    whose partner changed; maximality for every edge touching a vertex that
    is now free. ``lfmm=True`` compares against :func:`greedy_lfmm` on each
    step using the algorithm's own ranks.
    """

    def __init__(self, alg, full_every: int = 0, lfmm: bool = False):
        self.alg = alg
        self.graph = _Replay(alg.n)
        # edges by rank, kept incrementally so each LFMM check skips the sort
        self.ranked = SortedList() if lfmm else None
        self.rank_of: dict[tuple[int, int], float] = {}
        self.prev = list(alg.partner)
        self.full_every = full_every
        self.lfmm = lfmm
        self.steps = 0
        self.checks = 0
        self.lfmm_checks = 0

    def after(self, op: UpdateOp) -> None:
        self.advance((op,))

    def advance(self, ops) -> None:
        graph = self.graph
        suspects = set()
        ranked = self.ranked
        rank = getattr(self.alg, "rank", None)
        for op in ops:
            graph.apply(op)
            suspects.add(op.u)
            suspects.add(op.v)
            if ranked is not None:
                e = (op.u, op.v)
                if op.kind == INSERT:
                    r = rank(*e) if rank else self.alg.edge_ranks()[e]
                    self.rank_of[e] = r
                    ranked.add((r, e))
                else:
                    ranked.remove((self.rank_of.pop(e), e))
        P = self.alg.partner
        adj = graph.adj
        changed = _changed(self.prev, P)
        if changed:
            self.prev = list(P)
            suspects.update(changed)
        for x in suspects:
            p = P[x]
            if p == -1:
                for w in adj[x]:
                    if P[w] == -1:
                        raise CheckFailure(f"edge {normalize_edge(x, w)} has two free endpoints")
            else:
                if P[p] != x:
                    raise CheckFailure(f"partner map asymmetric at {x}")
                if p not in adj[x]:
                    raise CheckFailure(f"matched pair {(x, p)} is not an edge")
        before = self.steps
        self.steps += len(ops)
        self.checks += 1
        if self.lfmm:
            self.check_lfmm()
        fe = self.full_every
        if fe and self.steps // fe != before // fe:
            self.full()

    def snapshot(self) -> Snapshot:
        snap = Snapshot(self.alg.n, self.graph.edges(),
                        matching=self.alg.export_matching())
        if hasattr(self.alg, "edge_ranks"):
            snap.ranks = self.alg.edge_ranks()
        return snap

    def check_lfmm(self) -> None:
        if self.ranked is None:
            snap = self.snapshot()
            want = greedy_lfmm(snap)
        else:
            want = _greedy(self.alg.n, self.ranked)
        got = set(self.alg.export_matching())
        if got != want:
            diff = sorted(got ^ want)[:4]
            raise CheckFailure(f"matching differs from the greedy LFMM (e.g. {diff})")
        self.lfmm_checks += 1

    def full(self) -> None:
        try:
            ok = is_maximal_matching(self.snapshot())
        except OracleError as exc:
            raise CheckFailure(str(exc)) from exc
        if not ok:
            raise CheckFailure("full sweep found an uncovered edge")


def checker_for(alg, full_every: int = 0, lfmm: bool = False):
    if alg.problem == "coloring":
        return ColoringChecker(alg, full_every)
    return MatchingChecker(alg, full_every, lfmm=lfmm)


def verify_ops(alg, ops: Iterable[UpdateOp], full_every: int = 1000,
               lfmm: bool = False) -> int:
    """Apply ``ops`` to ``alg``, checking after each one; returns the number of steps."""
    chk = checker_for(alg, full_every, lfmm)
    for op in ops:
        alg.apply(op)
        chk.after(op)
    chk.full()
    return chk.steps

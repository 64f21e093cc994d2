"""Fully dynamic (Δ+1)-vertex coloring.

All four algorithms start from an independent uniform color per vertex (the
edge set is empty, so any assignment is proper) and only act on insertions
whose endpoints share a color. Colors are ``0..delta``.
"""
from __future__ import annotations

from collections import Counter

from .base import AlgorithmAbort, DynamicAlgorithm, check_budget
from .graph import HashedAdjacency, SwapDeleteAdjacency

DEFAULT_CASCADE_CAP = 10**6


class ColoringAlgorithm(DynamicAlgorithm):
    problem = "coloring"

    def __init__(self, n, delta, seed=0):
        super().__init__(n, delta, seed)
        self.palette = delta + 1
        rnd = self.rng.random
        pal = self.palette
        self.xi = [int(rnd() * pal) for _ in range(n)]
        self.recolors = 0
        # set to a list to have every recolored vertex appended (adaptive generators)
        self.journal: list[int] | None = None

    @property
    def colors(self) -> list[int]:
        """Live color list; do not mutate."""
        return self.xi

    def color_of(self, v: int) -> int:
        return self.xi[v]

    def export_colors(self) -> list[int]:
        return list(self.xi)

    def edges(self) -> set[tuple[int, int]]:
        raise NotImplementedError

    def audit(self) -> None:
        """Recount every auxiliary structure from scratch; raise AssertionError on drift."""


class RecurseCol(ColoringAlgorithm):
    """Recolor one clashing endpoint at random, then recursively every neighbor it now clashes with."""

    name = "RecurseCol"

    def __init__(self, n, delta, seed=0, cascade_cap=DEFAULT_CASCADE_CAP):
        super().__init__(n, delta, seed)
        self.adj = SwapDeleteAdjacency(n)
        self.cascade_cap = cascade_cap
        self.cascades = 0
        self.max_cascade = 0

    def insert(self, u, v):
        adj = self.adj
        nb = adj.lists
        pos = adj.pos
        pos[u][v] = len(nb[u])
        nb[u].append(v)
        pos[v][u] = len(nb[v])
        nb[v].append(u)
        xi = self.xi
        if xi[u] == xi[v]:
            self._cascade(u if self.rng.random() < 0.5 else v)

    def delete(self, u, v):
        adj = self.adj
        for a, b in ((u, v), (v, u)):
            pa = adj.pos[a]
            lst = adj.lists[a]
            i = pa.pop(b)
            last = lst.pop()
            if last != b:
                lst[i] = last
                pa[last] = i

    def _cascade(self, v):
        # explicit stack: a runaway cascade must surface as AlgorithmAbort, not RecursionError
        xi = self.xi
        nb = self.adj.lists
        rnd = self.rng.random
        pal = self.palette
        cap = self.cascade_cap
        journal = self.journal
        stack = [v]
        size = 0
        while stack:
            x = stack.pop()
            c = int(rnd() * pal)
            xi[x] = c
            if journal is not None:
                journal.append(x)
            size += 1
            if size > cap:
                self.recolors += size
                raise AlgorithmAbort(f"non-terminating cascade: more than {cap} recolors")
            stack.extend([w for w in nb[x] if xi[w] == c])
        self.recolors += size
        self.cascades += 1
        if size > self.max_cascade:
            self.max_cascade = size

    def edges(self):
        return {(v, w) for v, lst in enumerate(self.adj.lists) for w in lst if v < w}

    def counters(self):
        return {"recolors": self.recolors, "cascades": self.cascades,
                "max_cascade": self.max_cascade}


class CountCol(ColoringAlgorithm):
    """Keep per-vertex neighbor color counts; a clash redraws until a free color appears."""

    name = "CountCol"

    def __init__(self, n, delta, seed=0, memory_budget=None):
        check_budget(n, delta, memory_budget)
        super().__init__(n, delta, seed)
        self.adj = SwapDeleteAdjacency(n)
        self.counts = [[0] * self.palette for _ in range(n)]
        self.draws = 0

    def insert(self, u, v):
        adj = self.adj
        nb = adj.lists
        pos = adj.pos
        pos[u][v] = len(nb[u])
        nb[u].append(v)
        pos[v][u] = len(nb[v])
        nb[v].append(u)
        xi = self.xi
        xu = xi[u]
        xv = xi[v]
        self.counts[u][xv] += 1
        self.counts[v][xu] += 1
        if xu == xv:
            self._recolor(u if self.rng.random() < 0.5 else v)

    def delete(self, u, v):
        adj = self.adj
        for a, b in ((u, v), (v, u)):
            pa = adj.pos[a]
            lst = adj.lists[a]
            i = pa.pop(b)
            last = lst.pop()
            if last != b:
                lst[i] = last
                pa[last] = i
        xi = self.xi
        self.counts[u][xi[v]] -= 1
        self.counts[v][xi[u]] -= 1

    def _recolor(self, x):
        rnd = self.rng.random
        pal = self.palette
        counts = self.counts
        cx = counts[x]
        draws = 1
        c = int(rnd() * pal)
        while cx[c]:
            c = int(rnd() * pal)
            draws += 1
        old = self.xi[x]
        self.xi[x] = c
        if self.journal is not None:
            self.journal.append(x)
        for w in self.adj.lists[x]:
            cw = counts[w]
            cw[old] -= 1
            cw[c] += 1
        self.draws += draws
        self.recolors += 1

    def edges(self):
        return {(v, w) for v, lst in enumerate(self.adj.lists) for w in lst if v < w}

    def audit(self):
        xi = self.xi
        for v, lst in enumerate(self.adj.lists):
            fresh = [0] * self.palette
            for w in lst:
                fresh[xi[w]] += 1
            assert fresh == self.counts[v], f"count drift at vertex {v}"

    def counters(self):
        return {"recolors": self.recolors, "draws": self.draws}


class RandRCol(ColoringAlgorithm):
    """Random vertex ranks split each neighborhood into higher (H) and lower (L) ranked sets.

    Only the lower-ranked endpoint of an edge keeps a color count for it:
    ``hi_counts[v][c]`` counts colors over ``H[v]``. Colors over ``L[v]`` are
    tallied on demand when ``v`` is recolored.
    """

    name = "RandRCol"

    def __init__(self, n, delta, seed=0, memory_budget=None, cascade_cap=DEFAULT_CASCADE_CAP):
        check_budget(n, delta, memory_budget)
        super().__init__(n, delta, seed)
        rnd = self.rng.random
        ranks: list[float] = []
        seen: set[float] = set()
        while len(ranks) < n:
            r = rnd()
            if r > 0.0 and r not in seen:
                seen.add(r)
                ranks.append(r)
        self.rank = ranks
        self.H = HashedAdjacency(n)
        self.L = HashedAdjacency(n)
        self.hi_counts = [[0] * self.palette for _ in range(n)]
        self.cascade_cap = cascade_cap
        self.draws = 0
        self.max_chain = 0

    def insert(self, u, v):
        r = self.rank
        if r[u] > r[v]:
            u, v = v, u
        self.H.sets[u].add(v)
        self.L.sets[v].add(u)
        xi = self.xi
        self.hi_counts[u][xi[v]] += 1
        if xi[u] == xi[v]:
            self.recolor(v)

    def delete(self, u, v):
        r = self.rank
        if r[u] > r[v]:
            u, v = v, u
        self.H.sets[u].remove(v)
        self.L.sets[v].remove(u)
        self.hi_counts[u][self.xi[v]] -= 1

    def recolor(self, v):
        """Give ``v`` a color clashing with at most one lower-ranked neighbor; recurse on that neighbor."""
        xi = self.xi
        rnd = self.rng.random
        pal = self.palette
        hi_counts = self.hi_counts
        L = self.L.sets
        chain = 0
        x = v
        while x is not None:
            chain += 1
            if chain > self.cascade_cap:
                raise AlgorithmAbort(f"recolor chain longer than {self.cascade_cap}")
            lower = L[x]
            lo = Counter([xi[w] for w in lower])
            hx = hi_counts[x]
            c = int(rnd() * pal)
            draws = 1
            while hx[c] or lo.get(c, 0) > 1:
                c = int(rnd() * pal)
                draws += 1
            self.draws += draws
            old = xi[x]
            xi[x] = c
            if self.journal is not None:
                self.journal.append(x)
            if old != c:
                for w in lower:
                    cw = hi_counts[w]
                    cw[old] -= 1
                    cw[c] += 1
            if lo.get(c, 0):
                nxt = None
                for w in lower:
                    if xi[w] == c:
                        nxt = w
                        break
                x = nxt
            else:
                x = None
        self.recolors += chain
        if chain > self.max_chain:
            self.max_chain = chain

    def edges(self):
        return {(min(v, w), max(v, w)) for v, s in enumerate(self.H.sets) for w in s}

    def audit(self):
        xi = self.xi
        r = self.rank
        H = self.H.sets
        L = self.L.sets
        for v in range(self.n):
            assert not (H[v] & L[v]), f"H and L overlap at {v}"
            for w in H[v]:
                assert r[w] > r[v] and v in L[w], f"bad H entry {w} at {v}"
            for w in L[v]:
                assert r[w] < r[v] and v in H[w], f"bad L entry {w} at {v}"
            fresh = [0] * self.palette
            for w in H[v]:
                fresh[xi[w]] += 1
            assert fresh == self.hi_counts[v], f"count drift at vertex {v}"

    def counters(self):
        return {"recolors": self.recolors, "draws": self.draws, "max_chain": self.max_chain}


class HierCol(ColoringAlgorithm):
    """Level hierarchy driven by how many neighbors sit at or below a vertex's level.

    On recolor a vertex moves to the lowest level ``l`` at which it has fewer
    than ``3**(l+2)`` neighbors at level ``<= l``; it only climbs when its
    current level no longer qualifies.

    ``buckets[v][l + 1]`` holds the neighbors of ``v`` currently at level ``l``
    (levels run from -1 to ``max_level``). ``counts[v]`` counts colors over all
    of ``N(v)``.
    """

    name = "HierCol"

    def __init__(self, n, delta, seed=0, memory_budget=None, cascade_cap=DEFAULT_CASCADE_CAP):
        check_budget(n, delta, memory_budget)
        super().__init__(n, delta, seed)
        top = -1
        while 3 ** (top + 2) <= delta:
            top += 1
        self.max_level = top
        # threshold[l + 1] == 3 ** (l + 2)
        self.threshold = [3 ** (l + 2) for l in range(-1, top + 1)] + [float("inf")]
        self.level = [-1] * n
        self.buckets = [[set() for _ in range(top + 2)] for _ in range(n)]
        self.counts = [[0] * self.palette for _ in range(n)]
        self.stamp = [0] * n
        self.clock = 0
        self.cascade_cap = cascade_cap
        self.level_changes = 0
        self.draws = 0

    def insert(self, u, v):
        lev = self.level
        self.buckets[u][lev[v] + 1].add(v)
        self.buckets[v][lev[u] + 1].add(u)
        xi = self.xi
        self.counts[u][xi[v]] += 1
        self.counts[v][xi[u]] += 1
        if xi[u] == xi[v]:
            su = self.stamp[u]
            sv = self.stamp[v]
            if su > sv:
                x = u
            elif sv > su:
                x = v
            else:
                x = u if u < v else v
            self.recolor(x)

    def delete(self, u, v):
        lev = self.level
        self.buckets[u][lev[v] + 1].remove(v)
        self.buckets[v][lev[u] + 1].remove(u)
        xi = self.xi
        self.counts[u][xi[v]] -= 1
        self.counts[v][xi[u]] -= 1

    def recolor(self, v):
        chain = 0
        x = v
        while x is not None:
            chain += 1
            if chain > self.cascade_cap:
                raise AlgorithmAbort(f"recolor chain longer than {self.cascade_cap}")
            x = self._recolor_one(x)
        self.recolors += chain

    def _set_level(self, x, new):
        old = self.level[x]
        if old == new:
            return
        buckets = self.buckets
        for bucket in buckets[x]:
            for w in bucket:
                bw = buckets[w]
                bw[old + 1].remove(x)
                bw[new + 1].add(x)
        self.level[x] = new
        self.level_changes += 1

    def _recolor_one(self, x):
        B = self.buckets[x]
        th = self.threshold
        l = self.level[x]
        cum = 0
        at_or_below = []
        for bucket in B:
            cum += len(bucket)
            at_or_below.append(cum)
        if at_or_below[l + 1] < th[l + 1]:
            # lowest level not above l that still meets the threshold
            new = -1
            while at_or_below[new + 1] >= th[new + 1]:
                new += 1
        else:
            new = l + 1
            while at_or_below[new + 1] >= th[new + 1]:
                new += 1
        self._set_level(x, new)

        xi = self.xi
        rnd = self.rng.random
        pal = self.palette
        cx = self.counts[x]
        draws = 1
        nxt = None
        if new == -1:
            c = int(rnd() * pal)
            while cx[c]:
                c = int(rnd() * pal)
                draws += 1
        else:
            lower = Counter()
            for i in range(new + 1):
                lower.update([xi[w] for w in B[i]])
            c = int(rnd() * pal)
            while cx[c] and not (cx[c] == 1 and lower.get(c) == 1):
                c = int(rnd() * pal)
                draws += 1
            if cx[c]:
                for i in range(new + 1):
                    for w in B[i]:
                        if xi[w] == c:
                            nxt = w
                            break
                    if nxt is not None:
                        break
        self.draws += draws
        old = xi[x]
        xi[x] = c
        if self.journal is not None:
            self.journal.append(x)
        if old != c:
            counts = self.counts
            for bucket in B:
                for w in bucket:
                    cw = counts[w]
                    cw[old] -= 1
                    cw[c] += 1
        self.clock += 1
        self.stamp[x] = self.clock
        return nxt

    def neighbors(self, v):
        return set().union(*self.buckets[v])

    def edges(self):
        return {(v, w) for v in range(self.n) for w in self.neighbors(v) if v < w}

    def audit(self):
        xi = self.xi
        lev = self.level
        for v in range(self.n):
            fresh = [0] * self.palette
            for i, bucket in enumerate(self.buckets[v]):
                for w in bucket:
                    assert lev[w] == i - 1, f"{w} filed at level {i - 1} by {v}, is at {lev[w]}"
                    assert v in self.buckets[w][lev[v] + 1]
                    fresh[xi[w]] += 1
            assert fresh == self.counts[v], f"count drift at vertex {v}"

    def counters(self):
        return {"recolors": self.recolors, "level_changes": self.level_changes,
                "draws": self.draws}


COLORING_ALGORITHMS = {cls.name: cls for cls in (RecurseCol, CountCol, RandRCol, HierCol)}

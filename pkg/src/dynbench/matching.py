"""Fully dynamic maximal matching: trivial, hierarchical and eliminator-rank algorithms."""
from __future__ import annotations

import heapq
import math
from collections import deque

from sortedcontainers import SortedList

from .base import DynamicAlgorithm
from .graph import SwapDeleteAdjacency

INF = float("inf")


class IterationBoundExceeded(AssertionError):
    """A repair loop ran more iterations than the settled-edge argument allows."""


class MatchingAlgorithm(DynamicAlgorithm):
    problem = "matching"

    def __init__(self, n, delta, seed=0):
        super().__init__(n, delta, seed)
        self.P = [-1] * n

    @property
    def partner(self) -> list[int]:
        """Live partner list (-1 for unmatched); do not mutate."""
        return self.P

    def export_matching(self) -> list[tuple[int, int]]:
        P = self.P
        return [(v, p) for v, p in enumerate(P) if p > v]

    def matching_size(self) -> int:
        return sum(1 for v, p in enumerate(self.P) if p > v)

    def edges(self) -> set[tuple[int, int]]:
        raise NotImplementedError


class TrivialMatch(MatchingAlgorithm):
    """Greedy on insertion; a deleted matching edge makes both endpoints rescan their neighbor arrays."""

    name = "TrivialMatch"

    def __init__(self, n, delta, seed=0):
        super().__init__(n, delta, seed)
        self.adj = SwapDeleteAdjacency(n)
        self.scans = 0
        self.rematches = 0

    def insert(self, u, v):
        adj = self.adj
        nb = adj.lists
        pos = adj.pos
        pos[u][v] = len(nb[u])
        nb[u].append(v)
        pos[v][u] = len(nb[v])
        nb[v].append(u)
        P = self.P
        if P[u] == -1 and P[v] == -1:
            P[u] = v
            P[v] = u

    def delete(self, u, v):
        nb = self.adj.lists
        pos = self.adj.pos
        for a, b in ((u, v), (v, u)):
            pa = pos[a]
            lst = nb[a]
            i = pa.pop(b)
            last = lst.pop()
            if last != b:
                lst[i] = last
                pa[last] = i
        P = self.P
        if P[u] != v:
            return
        P[u] = P[v] = -1
        for x in (u, v):
            if P[x] != -1:
                continue
            scanned = 0
            for w in nb[x]:
                scanned += 1
                if P[w] == -1:
                    P[x] = w
                    P[w] = x
                    self.rematches += 1
                    break
            self.scans += scanned

    def edges(self):
        return {(v, w) for v, lst in enumerate(self.adj.lists) for w in lst if v < w}

    def counters(self):
        return {"scans": self.scans, "rematches": self.rematches}


class _LevelMatch(MatchingAlgorithm):
    """Shared level machinery for the two hierarchical matchers.

    Level -1 means unmatched; a matched pair shares its level. Every vertex
    files each neighbor in ``buckets[v][lvl + 1]`` under the level it last
    recorded for it (``seen[v][w]``). Neighbors filed below ``level[v]`` form
    ``O_v``; the bucket for level ``l >= level[v]`` is ``I_v[l]``.

    A free vertex settles at the highest level ``l >= 1`` where it has at
    least ``threshold(l)`` neighbors below ``l`` by stealing one of them at
    random, and otherwise looks for a free neighbor at level 0. A vertex
    evicted by a steal may not settle above its old level, so eviction
    chains strictly descend.
    """

    max_level = 1

    def __init__(self, n, delta, seed=0):
        super().__init__(n, delta, seed)
        self.level = [-1] * n
        width = self.max_level + 2
        self.buckets = [[set() for _ in range(width)] for _ in range(n)]
        self.seen: list[dict[int, int]] = [{} for _ in range(n)]
        self.level_changes = 0
        self.broadcasts = 0
        self.steals = 0
        self.settles = 0

    def threshold(self, lvl: int) -> float:
        raise NotImplementedError

    def _refresh(self, x: int) -> None:
        """Bring ``x``'s view of its neighbors' levels up to date (no-op when kept eagerly)."""

    def _raise(self, x: int, new: int) -> None:
        raise NotImplementedError

    def _broadcast(self, x: int, new: int) -> None:
        lev_x = self.level
        buckets = self.buckets
        seen = self.seen
        for bucket in buckets[x]:
            for w in bucket:
                sw = seen[w]
                bw = buckets[w]
                bw[sw[x] + 1].remove(x)
                bw[new + 1].add(x)
                sw[x] = new
        self.broadcasts += 1

    def _set_level(self, x: int, new: int) -> None:
        old = self.level[x]
        if old == new:
            return
        if new > old:
            self._raise(x, new)
        else:
            self._broadcast(x, new)
        self.level[x] = new
        self.level_changes += 1

    def insert(self, u, v):
        lev = self.level
        self.seen[u][v] = lev[v]
        self.buckets[u][lev[v] + 1].add(v)
        self.seen[v][u] = lev[u]
        self.buckets[v][lev[u] + 1].add(u)
        P = self.P
        if P[u] == -1 and P[v] == -1:
            P[u] = v
            P[v] = u
            self._set_level(u, 0)
            self._set_level(v, 0)

    def delete(self, u, v):
        self.buckets[u][self.seen[u].pop(v) + 1].remove(v)
        self.buckets[v][self.seen[v].pop(u) + 1].remove(u)
        P = self.P
        if P[u] == v:
            P[u] = P[v] = -1
            self._settle_all(deque([(u, self.max_level), (v, self.max_level)]))

    def _settle_all(self, work: deque) -> None:
        P = self.P
        rng = self.rng
        while work:
            x, cap = work.popleft()
            if P[x] != -1:
                continue
            self.settles += 1
            self._refresh(x)
            B = self.buckets[x]
            below = 0
            best = 0
            cum = [0] * len(B)
            for i, bucket in enumerate(B):
                below += len(bucket)
                cum[i] = below
            # cum[l] counts neighbors at levels < l
            for lvl in range(min(cap, self.max_level), 0, -1):
                if cum[lvl] >= self.threshold(lvl):
                    best = lvl
                    break
            if best:
                pool = [w for i in range(best + 1) for w in B[i]]
                w = pool[int(rng.random() * len(pool))]
                evicted = P[w]
                if evicted != -1:
                    P[evicted] = -1
                    work.append((evicted, self.level[evicted]))
                P[x] = w
                P[w] = x
                self._set_level(x, best)
                self._set_level(w, best)
                self.steals += 1
                continue
            mate = -1
            for w in B[0]:
                if P[w] == -1:
                    mate = w
                    break
            if mate != -1:
                P[x] = mate
                P[mate] = x
                self._set_level(x, 0)
                self._set_level(mate, 0)
            else:
                self._set_level(x, -1)

    def edges(self):
        return {(v, w) for v, s in enumerate(self.seen) for w in s if v < w}

    def audit(self):
        P = self.P
        lev = self.level
        for v in range(self.n):
            assert (lev[v] == -1) == (P[v] == -1), f"level/partner mismatch at {v}"
            if P[v] != -1:
                assert lev[P[v]] == lev[v], f"matched pair {v},{P[v]} on different levels"
            for i, bucket in enumerate(self.buckets[v]):
                for w in bucket:
                    assert self.seen[v][w] == i - 1

    def counters(self):
        return {"level_changes": self.level_changes, "broadcasts": self.broadcasts,
                "steals": self.steals, "settles": self.settles}


class Hier1Match(_LevelMatch):
    """Two-level scheme (levels 0 and 1); a vertex climbs once it sees about sqrt(n) lower neighbors.

    Levels are pushed to every neighbor immediately on each change.
    """

    name = "Hier1Match"
    max_level = 1

    def __init__(self, n, delta, seed=0, threshold=None):
        self._threshold = math.isqrt(max(n, 1)) if threshold is None else threshold
        super().__init__(n, delta, seed)

    def threshold(self, lvl):
        return self._threshold

    def _raise(self, x, new):
        self._broadcast(x, new)


class Hier2Match(_LevelMatch):
    """``ceil(log2 n)`` levels with lazily propagated rises.

    Falls are pushed to all neighbors at once (free vertices must be visible
    at level -1). Rises are not: neighbors keep a stale, too-low record,
    which is corrected in one batch when that neighbor next searches for a
    partner.
    """

    name = "Hier2Match"

    def __init__(self, n, delta, seed=0):
        self.max_level = max(1, math.ceil(math.log2(max(n, 2))) - 1)
        super().__init__(n, delta, seed)
        self.refreshed = 0

    def threshold(self, lvl):
        return 2 ** (lvl + 1)

    def _raise(self, x, new):
        pass

    def _refresh(self, x):
        lev = self.level
        B = self.buckets[x]
        seen = self.seen[x]
        # stale records only ever lag behind a rise, so ascending order sees every moved entry again
        for i, bucket in enumerate(B):
            stale = [w for w in bucket if lev[w] != i - 1]
            for w in stale:
                bucket.remove(w)
                B[lev[w] + 1].add(w)
                seen[w] = lev[w]
            self.refreshed += len(stale)

    def audit(self):
        P = self.P
        lev = self.level
        for v in range(self.n):
            assert (lev[v] == -1) == (P[v] == -1), f"level/partner mismatch at {v}"
            for i, bucket in enumerate(self.buckets[v]):
                for w in bucket:
                    assert self.seen[v][w] == i - 1
                    assert self.seen[v][w] <= lev[w], f"{v} records {w} above its level"

    def counters(self):
        out = super().counters()
        out["refreshed"] = self.refreshed
        return out


def draw_unique_rank(rnd, taken: set) -> float:
    """Uniform rank strictly inside (0, 1), redrawn until unused."""
    r = rnd()
    while r == 0.0 or r in taken:
        r = rnd()
    return r


class RandR1Match(MatchingAlgorithm):
    """Lexicographically first maximal matching with eliminator-rank search trees.

    Each edge carries a random rank ``pi(e)`` and an eliminator rank
    ``k(e) = min(pi(e), k(u), k(v))``, the rank of the matching edge that
    covers it (its own rank if it is matched). Every vertex keeps its incident
    edges in a sorted list keyed by ``(k(e), neighbor)``; each change of a
    vertex rank rewrites the keys of all its incident edges.
    """

    name = "RandR1Match"

    def __init__(self, n, delta, seed=0):
        super().__init__(n, delta, seed)
        self.k = [INF] * n
        self.pi: dict[tuple[int, int], float] = {}
        self.elim_key: dict[tuple[int, int], float] = {}
        self._taken: set[float] = set()
        self.tree = [SortedList() for _ in range(n)]
        self.tree_updates = 0
        self.iterations = 0
        self.queue_pushes = 0

    def rank(self, u, v):
        return self.pi[(u, v) if u < v else (v, u)]

    def edge_ranks(self) -> dict[tuple[int, int], float]:
        return self.pi

    def _set_vertex_rank(self, x, r):
        self.k[x] = r
        k = self.k
        pi = self.pi
        ek = self.elim_key
        tree = self.tree
        tx = tree[x]
        for old, y in list(tx):
            e = (x, y) if x < y else (y, x)
            p = pi[e]
            ky = k[y]
            new = p if p < r else r
            if ky < new:
                new = ky
            if new != old:
                tx.remove((old, y))
                tx.add((new, y))
                ty = tree[y]
                ty.remove((old, x))
                ty.add((new, x))
                ek[e] = new
                self.tree_updates += 2

    def _evict(self, x, heap):
        p = self.P[x]
        if p != -1:
            heapq.heappush(heap, (self.k[p], p))
            self.queue_pushes += 1
            self.P[p] = -1
            self._set_vertex_rank(p, INF)

    def insert(self, u, v):
        r = draw_unique_rank(self.rng.random, self._taken)
        self._taken.add(r)
        e = (u, v)
        self.pi[e] = r
        k = self.k
        key = min(r, k[u], k[v])
        self.elim_key[e] = key
        self.tree[u].add((key, v))
        self.tree[v].add((key, u))
        self.tree_updates += 2
        heap: list = []
        if r < k[u] and r < k[v]:
            self._evict(u, heap)
            self._evict(v, heap)
            self.P[u] = v
            self.P[v] = u
            self._set_vertex_rank(u, r)
            self._set_vertex_rank(v, r)
        self._repair(heap)

    def delete(self, u, v):
        e = (u, v)
        r = self.pi.pop(e)
        self._taken.discard(r)
        key = self.elim_key.pop(e)
        self.tree[u].remove((key, v))
        self.tree[v].remove((key, u))
        self.tree_updates += 2
        heap: list = []
        if self.P[u] == v:
            self.P[u] = self.P[v] = -1
            heap = [(r, u), (r, v)]
            heapq.heapify(heap)
            self.queue_pushes += 2
            self._set_vertex_rank(u, INF)
            self._set_vertex_rank(v, INF)
        self._repair(heap)

    def _repair(self, heap):
        if not heap:
            return
        bound = len(self.pi) + len(heap)
        k = self.k
        P = self.P
        pi = self.pi
        steps = 0
        while heap:
            rx, x = heapq.heappop(heap)
            steps += 1
            if steps > bound:
                raise IterationBoundExceeded(f"repair exceeded {bound} iterations")
            tx = self.tree[x]
            kx = k[x]
            cands = []
            for _, y in tx.islice(tx.bisect_left((rx, -1))):
                p = pi[(x, y) if x < y else (y, x)]
                if rx < p < kx:
                    cands.append((p, y))
            cands.sort()
            for p, y in cands:
                if p < k[y]:
                    self._evict(y, heap)
                    self._evict(x, heap)
                    P[x] = y
                    P[y] = x
                    self._set_vertex_rank(x, p)
                    self._set_vertex_rank(y, p)
                    break
        self.iterations += steps

    def edges(self):
        return set(self.pi)

    def audit(self):
        k = self.k
        for (u, v), p in self.pi.items():
            want = min(p, k[u], k[v])
            assert self.elim_key[(u, v)] == want, f"stale eliminator rank on {(u, v)}"
            assert (want, v) in self.tree[u] and (want, u) in self.tree[v]
        for v, p in enumerate(self.P):
            if p == -1:
                assert k[v] == INF
            else:
                assert k[v] == self.rank(v, p)

    def counters(self):
        return {"tree_updates": self.tree_updates, "iterations": self.iterations,
                "queue_pushes": self.queue_pushes}

"""Random-rank lexicographically first maximal matching without eliminator trees.

Neighbors are kept ordered by their (fixed) edge rank in a lazily compacted
array, so the matching can change without touching any neighborhood. A
priority queue of freshly unmatched vertices, keyed by the rank of the
matching edge each one lost, drives the repair.
"""
from __future__ import annotations

import heapq
from bisect import bisect_right

from .graph import LazyRankedAdjacency
from .matching import INF, IterationBoundExceeded, MatchingAlgorithm


class RandR2Match(MatchingAlgorithm):
    name = "RandR2Match"

    def __init__(self, n, delta, seed=0, track_order=False):
        super().__init__(n, delta, seed)
        self.k = [INF] * n
        # edge (u, v), u < v, is keyed u * n + v
        self.pi: dict[int, float] = {}
        self.adj = LazyRankedAdjacency(n)
        self._owner = self.adj.owner
        self._live = self.adj.live
        self._dirty = self.adj.dirty
        self.iterations = 0
        self.queue_pushes = 0
        self.max_iterations = 0
        # pop-order bookkeeping for the monotonicity properties; off in benchmarks
        self.track_order = track_order
        self.order_violations = 0
        self.push_violations = 0

    @property
    def rng(self):
        return self._rng

    @rng.setter
    def rng(self, value):
        self._rng = value
        self._rand = value.random

    def rank(self, u, v):
        return self.pi[u * self.n + v if u < v else v * self.n + u]

    def edge_ranks(self) -> dict[tuple[int, int], float]:
        n = self.n
        return {divmod(key, n): r for key, r in self.pi.items()}

    def insert(self, u, v):
        rnd = self._rand
        # owner keeps every rank ever drawn, so ranks are unique and never reused
        owner = self._owner
        r = rnd()
        while r in owner or r == 0.0:
            r = rnd()
        owner[r] = u + v
        self.pi[u * self.n + v] = r
        live = self._live
        live[v].append(r)
        live[u].append(r)
        dirty = self._dirty
        dirty[u] = dirty[v] = True
        k = self.k
        if r < k[u] and r < k[v]:
            P = self.P
            S: list = []
            pv = P[v]
            if pv != -1:
                S.append((k[pv], pv))
                k[pv] = INF
                P[pv] = -1
            pu = P[u]
            if pu != -1:
                S.append((k[pu], pu))
                k[pu] = INF
                P[pu] = -1
            k[u] = r
            k[v] = r
            P[u] = v
            P[v] = u
            if S:
                heapq.heapify(S)
                self.queue_pushes += len(S)
                self.find_new_partners(S)

    def delete(self, u, v):
        # the owner entry stays: tombstones are keyed by rank
        r = self.pi.pop(u * self.n + v)
        dead = self.adj.dead
        dead[v].append(r)
        dead[u].append(r)
        P = self.P
        if P[v] == u:
            S = [(r, u), (r, v)]
            self.queue_pushes += 2
            k = self.k
            k[v] = k[u] = INF
            P[v] = P[u] = -1
            self.find_new_partners(S)

    def find_new_partners(self, S: list) -> None:
        """Drain the heap ``S`` of ``(priority, vertex)`` pairs, covering every uncovered edge.

        A vertex popped with priority ``r`` scans its neighbors in rank order
        over ``(r, k(v))`` and takes the first edge whose other endpoint would
        accept it; after a match the loop moves on to the next queued vertex.
        """
        if not S:
            return
        k = self.k
        P = self.P
        compact = self.adj.compact_ranks
        owner = self._owner
        pop = heapq.heappop
        push = heapq.heappush
        bound = len(self.pi) + len(S)
        track = self.track_order
        last = -1.0
        steps = 0
        while S:
            rv, v = pop(S)
            steps += 1
            if steps > bound:
                raise IterationBoundExceeded(
                    f"find_new_partners exceeded {bound} iterations")
            if track:
                if rv < last:
                    self.order_violations += 1
                last = rv
            nbrs = compact(v)
            kv = k[v]
            i = bisect_right(nbrs, rv)
            end = len(nbrs)
            while i < end:
                re = nbrs[i]
                if re >= kv:
                    break
                w = owner[re] - v
                kw = k[w]
                if re < kw:
                    if kw < INF:
                        x = P[w]
                        if track and kw <= rv:
                            self.push_violations += 1
                        push(S, (kw, x))
                        P[x] = -1
                        k[x] = INF
                        self.queue_pushes += 1
                    if kv < INF:
                        x = P[v]
                        if track and kv <= rv:
                            self.push_violations += 1
                        push(S, (kv, x))
                        P[x] = -1
                        k[x] = INF
                        self.queue_pushes += 1
                    P[v] = w
                    P[w] = v
                    k[v] = re
                    k[w] = re
                    break
                i += 1
        self.iterations += steps
        if steps > self.max_iterations:
            self.max_iterations = steps

    def edges(self):
        n = self.n
        return {divmod(key, n) for key in self.pi}

    def audit(self):
        k = self.k
        for v, p in enumerate(self.P):
            if p == -1:
                assert k[v] == INF, f"unmatched {v} has finite rank"
            else:
                assert self.P[p] == v and k[v] == self.rank(v, p)

    def counters(self):
        return {"iterations": self.iterations, "queue_pushes": self.queue_pushes,
                "max_iterations": self.max_iterations}

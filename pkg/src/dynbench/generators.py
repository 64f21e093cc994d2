"""Instance generators: static graphs, update sequences, adaptive adversaries, file ingestion."""
from __future__ import annotations

import heapq
import math
import os
import random
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .graph import DELETE, INSERT, UpdateOp, UpdateSequence, make_sequence, normalize_edge

Edge = tuple[int, int]


# -- static graphs -----------------------------------------------------------

def _decode_pairs(idx: np.ndarray, n: int) -> np.ndarray:
    # row-major index over the strict upper triangle -> (u, v), u < v
    idx = idx.astype(np.int64)
    total = n * (n - 1) // 2
    rev = total - 1 - idx
    # rev counts from the end: row-from-end k holds k+1 pairs
    k = np.floor((np.sqrt(8.0 * rev + 1.0) - 1.0) / 2.0).astype(np.int64)
    # guard float rounding
    k = np.where((k + 1) * (k + 2) // 2 <= rev, k + 1, k)
    k = np.where(k * (k + 1) // 2 > rev, k - 1, k)
    u = n - 2 - k
    v = n - 1 - (rev - k * (k + 1) // 2)
    return np.stack([u, v], axis=1)


def gen_er(n: int, m: int, seed: int) -> list[Edge]:
    """``m`` distinct uniformly random edges on ``n`` vertices (the G(n, m) model)."""
    total = n * (n - 1) // 2
    if m < 0 or m > total:
        raise ValueError(f"cannot place {m} edges on {n} vertices (max {total})")
    if m == 0:
        return []
    rng = np.random.default_rng(seed)
    if 2 * m >= total:
        idx = rng.permutation(total)[:m]
    else:
        # rejection: draw indices in batches, keep first occurrences
        seen: dict[int, None] = {}
        while len(seen) < m:
            need = m - len(seen)
            for x in rng.integers(0, total, size=need + need // 4 + 16).tolist():
                if x not in seen:
                    seen[x] = None
                    if len(seen) == m:
                        break
        idx = np.fromiter(seen, dtype=np.int64, count=m)
    return [tuple(p) for p in _decode_pairs(idx, n).tolist()]


def _rhg_points(n: int, alpha: float, rng: np.random.Generator):
    u = rng.random(n)
    theta = rng.random(n) * (2 * math.pi)
    return u, theta


def _rhg_radii(u: np.ndarray, alpha: float, R: float) -> np.ndarray:
    # inverse CDF of density alpha*sinh(alpha r)/(cosh(alpha R)-1) on [0, R]
    return np.arccosh(1.0 + (np.cosh(alpha * R) - 1.0) * u) / alpha


def _rhg_scan(r, theta, R, collect=False, block=256):
    n = len(r)
    ch, sh = np.cosh(r), np.sinh(r)
    limit = math.cosh(R)
    count = 0
    out = []
    for s in range(0, n, block):
        e = min(n, s + block)
        d = np.cos(theta[s:e, None] - theta[None, :])
        lhs = ch[s:e, None] * ch[None, :] - sh[s:e, None] * sh[None, :] * d
        close = lhs < limit
        rows = np.arange(s, e)[:, None]
        close &= np.arange(n)[None, :] > rows
        if collect:
            a, b = np.nonzero(close)
            out.append(np.stack([a + s, b], axis=1))
        else:
            count += int(close.sum())
    if collect:
        return np.concatenate(out) if out else np.empty((0, 2), dtype=np.int64)
    return count


def gen_rhg(n: int, avg_deg: float, gamma: float, seed: int, tol: float = 0.25,
            max_rounds: int = 40) -> list[Edge]:
    """Threshold random hyperbolic graph with power-law exponent ``gamma``.

    Points get radial density ~ sinh(alpha r) with alpha = (gamma - 1) / 2 and
    uniform angles; u, v are adjacent iff their hyperbolic distance is below
    the disk radius R, which is tuned until the average degree is close to
    ``avg_deg``.
    """
    if gamma <= 2:
        raise ValueError("gamma must exceed 2")
    if avg_deg < 1:
        raise ValueError("avg_deg must be at least 1")
    if n < 2:
        return []
    if avg_deg >= n - 1:
        return [(u, v) for u in range(n) for v in range(u + 1, n)]
    alpha = (gamma - 1) / 2
    rng = np.random.default_rng(seed)
    u, theta = _rhg_points(n, alpha, rng)

    def degree_at(R):
        return 2.0 * _rhg_scan(_rhg_radii(u, alpha, R), theta, R) / n

    # asymptotic estimate, then secant steps in log space (avg deg ~ e^{-R/2})
    xi = alpha / (alpha - 0.5)
    R = max(1e-3, 2 * math.log(2 * n * xi * xi / (math.pi * avg_deg)))
    lo, hi = None, None
    best = (math.inf, R)
    for _ in range(max_rounds):
        got = degree_at(R)
        err = abs(got - avg_deg) / avg_deg
        if err < best[0]:
            best = (err, R)
        if err < 0.02:
            break
        if got > avg_deg:
            lo = R if lo is None else max(lo, R)
        else:
            hi = R if hi is None else min(hi, R)
        step = 2 * math.log(max(got, 1e-9) / avg_deg) if got > 0 else 2.0
        nxt = R + max(-4.0, min(4.0, step))
        if lo is not None and hi is not None and not lo < nxt < hi:
            nxt = (lo + hi) / 2
        R = max(1e-3, nxt)
    err, R = best
    if err > tol:
        raise RuntimeError(f"RHG calibration missed average degree {avg_deg} by {err:.0%}")
    pairs = _rhg_scan(_rhg_radii(u, alpha, R), theta, R, collect=True)
    return [tuple(p) for p in pairs.tolist()]


# -- oblivious update sequences ----------------------------------------------

def random_update_sequence(edges: list[Edge], rho: float, seed: int,
                           n: int | None = None) -> UpdateSequence:
    """Insert every edge once in random order, interleaving about ``rho`` deletions per insertion."""
    if not 0 <= rho <= 1:
        raise ValueError("rho must lie in [0, 1]")
    rng = random.Random(seed)
    order = [normalize_edge(a, b) for a, b in edges]
    rng.shuffle(order)
    if n is None:
        n = 1 + max((v for _, v in order), default=-1)
    p_ins = 1.0 / (1.0 + rho)
    present: list[Edge] = []
    ops: list[UpdateOp] = []
    nxt = 0
    while nxt < len(order):
        if rng.random() < p_ins:
            e = order[nxt]
            nxt += 1
            present.append(e)
            ops.append(UpdateOp(INSERT, *e))
        elif present:
            i = rng.randrange(len(present))
            e = present[i]
            last = present.pop()
            if last != e:
                present[i] = last
            ops.append(UpdateOp(DELETE, *e))
    return make_sequence(n, ops, meta={"kind": "RandomSeq", "rho": rho, "seed": seed})


# -- adaptive adversaries ----------------------------------------------------

def clashing_sequence(target, n: int, delta: int, count: int, seed: int,
                      max_draws: int = 200_000) -> UpdateSequence:
    """Insert only edges whose endpoints currently share a color in ``target``.

    ``target`` is a fresh coloring algorithm built with ``(n, delta)``; it
    consumes every emitted insertion, so later picks react to its random
    recolorings. Replaying the sequence through a fresh instance with the same
    seed reproduces the target's behavior exactly.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if target.n != n or target.delta != delta:
        raise ValueError("target must be constructed with the same (n, delta)")
    rng = random.Random(seed)
    rand = rng.random
    col = list(target.colors)
    classes: list[list[int]] = [[] for _ in range(target.palette)]
    where = [0] * n
    for v, c in enumerate(col):
        where[v] = len(classes[c])
        classes[c].append(v)
    deg = [0] * n
    present: set[Edge] = set()
    journal: list[int] = []
    target.journal = journal
    ops: list[UpdateOp] = []
    truncated = False

    def move(x, new):
        cls = classes[col[x]]
        i = where[x]
        last = cls.pop()
        if last != x:
            cls[i] = last
            where[last] = i
        where[x] = len(classes[new])
        classes[new].append(x)
        col[x] = new

    try:
        for _ in range(count):
            biggest = max(map(len, classes))
            if biggest < 2:
                truncated = True
                break
            scale = biggest - 1
            found = None
            for _ in range(max_draws):
                u = int(rand() * n)
                cls = classes[col[u]]
                s = len(cls)
                # accept u with probability (s-1)/scale so every ordered pair is equally likely
                if s < 2 or rand() * scale >= s - 1:
                    continue
                j = int(rand() * (s - 1))
                v = cls[j]
                if v == u:
                    v = cls[s - 1]
                if deg[u] >= delta or deg[v] >= delta:
                    continue
                e = normalize_edge(u, v)
                if e in present:
                    continue
                found = e
                break
            if found is None:
                truncated = True
                break
            a, b = found
            present.add(found)
            deg[a] += 1
            deg[b] += 1
            ops.append(UpdateOp(INSERT, a, b))
            target.insert(a, b)
            xi = target.colors
            for x in journal:
                if xi[x] != col[x]:
                    move(x, xi[x])
            journal.clear()
    finally:
        target.journal = None
    meta = {"kind": "Clashing", "target": target.name, "coupled_seed": target.seed,
            "seed": seed, "truncated": truncated, "requested": count}
    return make_sequence(n, ops, delta_bound=delta, meta=meta)


def equal_degree_sequence(n: int, delta: int, updates: int, seed: int, fill: float = 0.99,
                          stall_limit: int = 100_000):
    """Near-regular base graph of degree ~ ``delta``-1 plus a churning matching overlay.

    Returns ``(initial, dynamic)``; the initial part only inserts. Use
    :func:`concat_sequences` to get one replayable sequence.
    """
    if delta < 2:
        raise ValueError("delta must be at least 2")
    rng = random.Random(seed)
    rand = rng.random
    cap = delta - 1
    target_edges = math.ceil(fill * cap * n / 2)
    adj: list[set[int]] = [set() for _ in range(n)]
    open_: list[int] = list(range(n))
    slot = list(range(n))
    init: list[UpdateOp] = []
    fails = 0

    def close(x):
        i = slot[x]
        last = open_.pop()
        if last != x:
            open_[i] = last
            slot[last] = i

    while len(init) < target_edges and len(open_) >= 2:
        k = len(open_)
        a = open_[int(rand() * k)]
        b = open_[int(rand() * k)]
        if a == b or b in adj[a]:
            fails += 1
            if fails > stall_limit:
                break
            continue
        fails = 0
        adj[a].add(b)
        adj[b].add(a)
        init.append(UpdateOp(INSERT, *normalize_edge(a, b)))
        if len(adj[a]) >= cap:
            close(a)
        if len(adj[b]) >= cap:
            close(b)

    ratio = (2 * len(init) / n) / cap if n else 0.0
    over = [-1] * n
    dyn: list[UpdateOp] = []
    for _ in range(updates):
        v = int(rand() * n)
        p = over[v]
        if p != -1:
            over[v] = over[p] = -1
            dyn.append(UpdateOp(DELETE, *normalize_edge(v, p)))
            continue
        for _ in range(4 * n + 64):
            u = int(rand() * n)
            if u != v and over[u] == -1 and u not in adj[v]:
                over[u], over[v] = v, u
                dyn.append(UpdateOp(INSERT, *normalize_edge(u, v)))
                break
    meta = {"kind": "EqualDegree", "seed": seed, "fill": fill, "phase1_ratio": ratio}
    initial = make_sequence(n, init, delta_bound=delta, meta=dict(meta, phase=1))
    dynamic = UpdateSequence(n, dyn, max(delta, 1), 0, dict(meta, phase=2))
    return initial, dynamic


def concat_sequences(initial: UpdateSequence, dynamic: UpdateSequence) -> UpdateSequence:
    """Glue two phases; the first becomes the untimed ``init_ops`` prefix."""
    meta = dict(initial.meta)
    meta.update(dynamic.meta)
    meta.pop("phase", None)
    return make_sequence(initial.n, initial.ops + dynamic.ops, init_ops=len(initial.ops),
                         delta_bound=max(initial.delta_bound, dynamic.delta_bound), meta=meta)


def sliding_window_sequence(edges: list[Edge], phi: int, eta: float, seed: int,
                            n: int | None = None) -> UpdateSequence:
    """Stream ``edges`` through a window of at most ``phi`` live edges.

    Each eviction removes the oldest live edge, except that with probability
    ``eta`` it removes the oldest live edge currently matched by a coupled
    :class:`TrivialMatch` instance (falling back to the oldest live edge).
    """
    from .matching import TrivialMatch

    if phi < 1:
        raise ValueError("phi must be positive")
    if not 0 <= eta <= 1:
        raise ValueError("eta must lie in [0, 1]")
    rng = random.Random(seed)
    order = [normalize_edge(a, b) for a, b in edges]
    rng.shuffle(order)
    if n is None:
        n = 1 + max((v for _, v in order), default=-1)
    tm = TrivialMatch(n, 0)
    P = tm.P
    live: OrderedDict[Edge, int] = OrderedDict()
    matched: list[tuple[int, Edge]] = []
    ops: list[UpdateOp] = []
    adversarial = 0

    def note(x):
        p = P[x]
        if p != -1:
            e = normalize_edge(x, p)
            heapq.heappush(matched, (live[e], e))

    for t, e in enumerate(order):
        if len(live) >= phi:
            victim = None
            if eta > 0 and rng.random() < eta:
                while matched:
                    _, cand = matched[0]
                    if cand in live and P[cand[0]] == cand[1]:
                        victim = cand
                        adversarial += 1
                        break
                    heapq.heappop(matched)
            if victim is None:
                victim = next(iter(live))
            del live[victim]
            ops.append(UpdateOp(DELETE, *victim))
            tm.delete(*victim)
            note(victim[0])
            note(victim[1])
        live[e] = t
        ops.append(UpdateOp(INSERT, *e))
        tm.insert(*e)
        if P[e[0]] == e[1]:
            heapq.heappush(matched, (t, e))
    meta = {"kind": "SlidingWindow", "phi": phi, "eta": eta, "seed": seed,
            "adversarial_deletions": adversarial}
    return make_sequence(n, ops, meta=meta)


# -- real-world temporal files ----------------------------------------------

def parse_temporal_file(src: TextIO | str | os.PathLike) -> UpdateSequence:
    """Read ``src dst weight [timestamp]`` records as an undirected update stream.

    Positive weight inserts, negative deletes. Records that would be invalid
    against the current graph are dropped and tallied in ``meta``.
    """
    if isinstance(src, (str, os.PathLike)):
        with open(src, encoding="utf-8") as fh:
            return parse_temporal_file(fh)
    ids: dict[str, int] = {}
    present: set[Edge] = set()
    ops: list[UpdateOp] = []
    drops = {"self_loops": 0, "duplicate_inserts": 0, "absent_deletes": 0, "zero_weight": 0}
    for lineno, raw in enumerate(src, 1):
        line = raw.strip()
        if not line or line[0] in "%#":
            continue
        parts = line.split()
        if len(parts) < 3:
            raise ValueError(f"line {lineno}: expected 'src dst weight [timestamp]', got {line!r}")
        try:
            w = float(parts[2])
        except ValueError:
            raise ValueError(f"line {lineno}: bad weight {parts[2]!r}") from None
        a, b = parts[0], parts[1]
        if a == b:
            drops["self_loops"] += 1
            continue
        if w == 0:
            drops["zero_weight"] += 1
            continue
        # ids are only allocated for records that survive
        ia, ib = ids.get(a), ids.get(b)
        e = None if ia is None or ib is None else normalize_edge(ia, ib)
        if w > 0:
            if e is not None and e in present:
                drops["duplicate_inserts"] += 1
                continue
            if ia is None:
                ia = ids[a] = len(ids)
            if ib is None:
                ib = ids[b] = len(ids)
            e = normalize_edge(ia, ib)
            present.add(e)
            ops.append(UpdateOp(INSERT, *e))
        else:
            if e is None or e not in present:
                drops["absent_deletes"] += 1
                continue
            present.discard(e)
            ops.append(UpdateOp(DELETE, *e))
    meta = {"kind": "File", "dropped": drops, "vertex_labels": len(ids)}
    return make_sequence(len(ids), ops, meta=meta)


# -- config ------------------------------------------------------------------

KINDS = ("ER", "RHG", "RandomSeq", "Clashing", "EqualDegree", "SlidingWindow", "File")

_REQUIRED = {
    "ER": ("n", "m"),
    "RHG": ("n", "avg_deg", "gamma"),
    "RandomSeq": ("n", "m", "rho"),
    "Clashing": ("n", "delta", "count", "target"),
    "EqualDegree": ("n", "delta", "updates"),
    "SlidingWindow": ("n", "m", "phi", "eta"),
    "File": ("path",),
}


@dataclass
class GeneratorConfig:
    """Declarative description of an instance; :meth:`build` produces the sequence.

    ``RandomSeq`` and ``SlidingWindow`` draw their static edges from ER, or
    from RHG when ``graph="RHG"`` (then ``avg_deg`` and ``gamma`` apply).
    """

    kind: str
    n: int | None = None
    m: int | None = None
    rho: float | None = None
    phi: int | None = None
    eta: float | None = None
    delta: int | None = None
    count: int | None = None
    updates: int | None = None
    target: str | None = None
    target_seed: int | None = None
    gamma: float | None = None
    avg_deg: float | None = None
    graph: str = "ER"
    fill: float = 0.99
    path: str | None = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        need = list(_REQUIRED[self.kind])
        if self.kind in ("RandomSeq", "SlidingWindow") and self.graph == "RHG":
            need = [x for x in need if x != "m"] + ["avg_deg", "gamma"]
        missing = [f for f in need if getattr(self, f) is None]
        if missing:
            raise ValueError(f"{self.kind} needs {', '.join(missing)}")
        for name in ("rho", "eta"):
            x = getattr(self, name)
            if x is not None and not 0 <= x <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.n is not None and self.n < 0:
            raise ValueError("n must be non-negative")
        if self.phi is not None and self.phi < 1:
            raise ValueError("phi must be positive")

    def _static(self) -> list[Edge]:
        if self.graph == "RHG":
            return gen_rhg(self.n, self.avg_deg, self.gamma, self.seed)
        return gen_er(self.n, self.m, self.seed)

    def build(self) -> UpdateSequence:
        k = self.kind
        if k in ("ER", "RHG"):
            if k == "RHG":
                edges = gen_rhg(self.n, self.avg_deg, self.gamma, self.seed)
            else:
                edges = gen_er(self.n, self.m, self.seed)
            seq = make_sequence(self.n, [UpdateOp(INSERT, *e) for e in edges])
        elif k == "RandomSeq":
            seq = random_update_sequence(self._static(), self.rho, self.seed + 1, n=self.n)
        elif k == "SlidingWindow":
            seq = sliding_window_sequence(self._static(), self.phi, self.eta, self.seed + 1,
                                          n=self.n)
        elif k == "EqualDegree":
            seq = concat_sequences(*equal_degree_sequence(self.n, self.delta, self.updates,
                                                          self.seed, fill=self.fill))
        elif k == "Clashing":
            from .registry import make_algorithm
            tseed = self.seed if self.target_seed is None else self.target_seed
            target = make_algorithm(self.target, self.n, self.delta, tseed)
            if target.problem != "coloring":
                raise ValueError("clashing sequences need a coloring target")
            seq = clashing_sequence(target, self.n, self.delta, self.count, self.seed)
        else:
            seq = parse_temporal_file(self.path)
        seq.meta.setdefault("kind", k)
        return seq

    def label(self) -> str:
        skip = {"extra", "graph", "fill"}
        parts = [f"{k}={v}" for k, v in vars(self).items()
                 if k not in skip and k != "kind" and v is not None]
        if self.graph != "ER":
            parts.append(f"graph={self.graph}")
        return self.kind + ":" + ",".join(parts)

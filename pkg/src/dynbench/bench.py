"""Timing harness: replay sequences through algorithms, aggregate, report CSV."""
from __future__ import annotations

import csv
import gc
import dataclasses
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .base import AlgorithmAbort
from .generators import GeneratorConfig, parse_temporal_file
from .graph import INSERT, UpdateSequence, read_sequence
from .oracle import CheckFailure, checker_for
from .matching import IterationBoundExceeded
from .registry import ALGORITHMS, make_algorithm, resolve

BATCH = 1024
CSV_HEADER = ("algorithm", "instance", "ops", "avg_ns_per_op", "slowdown", "failed")


def geometric_mean(values) -> float:
    vals = list(values)
    if not vals:
        raise ValueError("geometric mean of an empty list")
    if any(not v > 0 for v in vals):
        raise ValueError("geometric mean needs positive values")
    return math.exp(math.fsum(math.log(v) for v in vals) / len(vals))


# -- instance specs ----------------------------------------------------------

_KIND_ALIASES = {
    "er": "ER", "rhg": "RHG", "random": "RandomSeq", "randomseq": "RandomSeq",
    "clashing": "Clashing", "equaldegree": "EqualDegree", "equal": "EqualDegree",
    "sliding": "SlidingWindow", "slidingwindow": "SlidingWindow", "file": "File",
}
_INT_FIELDS = {"n", "m", "phi", "delta", "count", "updates", "seed", "target_seed"}
_FLOAT_FIELDS = {"rho", "eta", "gamma", "avg_deg", "fill"}


def parse_gen_spec(text: str) -> GeneratorConfig:
    """``kind:key=value,...``, e.g. ``random:n=1024,m=65536,rho=0.25,seed=1``."""
    kind, _, rest = text.partition(":")
    try:
        kind = _KIND_ALIASES[kind.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown generator kind {kind!r}") from None
    kw: dict = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = item.partition("=")
        key = key.strip().replace("-", "_")
        if not eq:
            raise ValueError(f"expected key=value, got {item!r}")
        if key in _INT_FIELDS:
            kw[key] = int(val)
        elif key in _FLOAT_FIELDS:
            kw[key] = float(val)
        elif key in ("target", "graph", "path"):
            kw[key] = val.strip()
        else:
            raise ValueError(f"unknown generator field {key!r}")
    return GeneratorConfig(kind, **kw)


def load_instance(src) -> tuple[str, UpdateSequence]:
    """Resolve a path, gen-spec string, config or ready sequence to ``(id, sequence)``."""
    if isinstance(src, UpdateSequence):
        return src.meta.get("id", "sequence"), src
    if isinstance(src, GeneratorConfig):
        return src.label(), src.build()
    text = os.fspath(src)
    if os.path.exists(text):
        return Path(text).name, read_sequence(text)
    if text.startswith("temporal:"):
        path = text[len("temporal:"):]
        return Path(path).name, parse_temporal_file(path)
    if ":" in text:
        return text, parse_gen_spec(text).build()
    raise FileNotFoundError(f"no such instance file: {text}")


# -- runs --------------------------------------------------------------------

@dataclass
class RunConfig:
    algorithm: str
    instance: object
    repetitions: int = 5
    seed: int = 0
    check_every: int = 0
    include_init: bool | None = None   # None: on for matching, off for coloring
    timing: bool = True
    warmup: bool = True
    instance_id: str | None = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.check_every < 0:
            raise ValueError("check_every must be non-negative")
        self.algorithm = resolve(self.algorithm)


@dataclass
class BenchReport:
    algorithm: str
    instance: str
    ops: int = 0
    run_ns: list[int] = field(default_factory=list)
    seeds: list[int] = field(default_factory=list)
    counters: dict = field(default_factory=dict)
    checks: int = 0
    final_size: int | None = None
    failed: bool = False
    incorrect: bool = False
    reason: str = ""
    slowdown: float | None = None

    @property
    def total_ns(self) -> float:
        return sum(self.run_ns) / len(self.run_ns) if self.run_ns else 0.0

    @property
    def avg_ns_per_op(self) -> float | None:
        if self.failed:
            return None
        return self.total_ns / self.ops if self.ops else 0.0


def rep_seeds(seq: UpdateSequence, algorithm: str, seed: int, reps: int) -> list[int]:
    """Per-repetition seeds; adaptive sequences pin their target to the coupled seed."""
    coupled = seq.meta.get("coupled_seed")
    if coupled is not None and seq.meta.get("target") == algorithm:
        return [int(coupled)] * reps
    return [seed * 1_000_003 + r for r in range(reps)]


def _one_run(cfg: RunConfig, seq: UpdateSequence, seed: int, timed: bool, check: bool):
    """Replay once; returns (elapsed_ns, algorithm, checks).

    The cyclic garbage collector is paused for the replay (as ``timeit``
    does): with millions of live containers a full collection would land in
    some arbitrary timed batch.
    """
    gc.collect()
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        return _replay(cfg, seq, seed, timed, check)
    finally:
        if was_enabled:
            gc.enable()


def _replay(cfg, seq, seed, timed, check):
    clock = time.perf_counter_ns
    include = cfg.include_init
    if include is None:
        include = ALGORITHMS[cfg.algorithm].problem != "coloring"
    elapsed = 0
    t0 = clock()
    alg = make_algorithm(cfg.algorithm, seq.n, seq.delta_bound, seed)
    if include and timed:
        elapsed += clock() - t0
    ops = seq.ops
    apply = alg.apply
    ins, dele = alg.insert, alg.delete
    chk = checker_for(alg) if check else None
    every = cfg.check_every
    step = min(BATCH, every) if check else BATCH
    k = seq.init_ops
    if k:
        if include and timed:
            for lo in range(0, k, step):
                hi = min(k, lo + step)
                t0 = clock()
                for op in ops[lo:hi]:
                    apply(op)
                elapsed += clock() - t0
                if chk:
                    chk.advance(ops[lo:hi])
        else:
            for op in ops[:k]:
                apply(op)
            if chk:
                chk.advance(ops[:k])
    pending = 0
    last = k
    for lo in range(k, len(ops), step):
        hi = min(len(ops), lo + step)
        chunk = ops[lo:hi]
        if timed:
            t0 = clock()
            for kind, u, v in chunk:
                if kind == INSERT:
                    ins(u, v)
                else:
                    dele(u, v)
            elapsed += clock() - t0
        else:
            for op in chunk:
                apply(op)
        if chk:
            pending += hi - lo
            if pending >= every or hi == len(ops):
                chk.advance(ops[last:hi])
                last = hi
                pending = 0
    if chk:
        chk.full()
    return elapsed, alg, (chk.checks if chk else 0)


class _Run:
    """One (algorithm, instance) pairing, driven a repetition at a time."""

    def __init__(self, cfg: RunConfig):
        inst_id, seq = load_instance(cfg.instance)
        self.cfg = cfg
        self.seq = seq
        include = cfg.include_init
        if include is None:
            include = ALGORITHMS[cfg.algorithm].problem != "coloring"
        ops = len(seq.ops) if include else len(seq.ops) - seq.init_ops
        self.report = BenchReport(cfg.algorithm, cfg.instance_id or inst_id, ops)
        self.seeds = rep_seeds(seq, cfg.algorithm, cfg.seed, cfg.repetitions)
        self.report.seeds = self.seeds
        self.done = 0
        self.alg = None

    def _guard(self, fn) -> None:
        rep = self.report
        if rep.failed:
            return
        try:
            fn()
        except AlgorithmAbort as exc:
            rep.failed, rep.reason = True, f"abort: {exc}"
        except MemoryError as exc:
            rep.failed, rep.reason = True, f"memory: {exc}"
        except (CheckFailure, IterationBoundExceeded) as exc:
            rep.failed = rep.incorrect = True
            rep.reason = f"incorrect: {exc}"
        if rep.failed:
            rep.run_ns.clear()

    def warmup(self) -> None:
        if self.cfg.warmup and self.cfg.timing:
            self._guard(lambda: _one_run(self.cfg, self.seq, self.seeds[0],
                                         timed=False, check=False))

    def step(self) -> None:
        def go():
            s = self.seeds[self.done]
            ns, alg, checks = _one_run(self.cfg, self.seq, s, timed=self.cfg.timing,
                                       check=self.cfg.check_every > 0)
            self.report.run_ns.append(ns)
            self.report.checks += checks
            self.alg = alg
        self._guard(go)
        self.done += 1

    def finish(self) -> BenchReport:
        rep = self.report
        if not rep.failed and self.alg is not None:
            rep.counters = self.alg.counters()
            rep.final_size = getattr(self.alg, "matching_size", lambda: None)()
        return rep


def run_benchmark(cfg: RunConfig) -> BenchReport:
    run = _Run(cfg)
    run.warmup()
    for _ in range(cfg.repetitions):
        run.step()
    return run.finish()


def run_group(configs: list[RunConfig], parallel: bool = False,
              interleave: bool = True) -> list[BenchReport]:
    """Run several configs and fill in slowdowns; threads only when timing is off.

    Each distinct instance is loaded (or generated) once and shared. With
    ``interleave`` the repetitions go round-robin over the configs, so slow
    phases of a noisy machine are spread over all algorithms alike.
    """
    cache: dict = {}
    prepared = []
    for c in configs:
        key = c.instance if isinstance(c.instance, (str, os.PathLike)) else id(c.instance)
        if key not in cache:
            cache[key] = load_instance(c.instance)
        inst_id, seq = cache[key]
        prepared.append(dataclasses.replace(c, instance=seq,
                                            instance_id=c.instance_id or inst_id))
    configs = prepared
    if parallel:
        if any(c.timing for c in configs):
            raise ValueError("parallel runs are only allowed with timing disabled")
        with ThreadPoolExecutor() as pool:
            reports = list(pool.map(run_benchmark, configs))
    elif interleave:
        runs = [_Run(c) for c in configs]
        for r in runs:
            r.warmup()
        for i in range(max(c.repetitions for c in configs)):
            for r in runs:
                if i < r.cfg.repetitions:
                    r.step()
        reports = [r.finish() for r in runs]
    else:
        reports = [run_benchmark(c) for c in configs]
    assign_slowdowns(reports)
    return reports


def assign_slowdowns(reports: list[BenchReport]) -> None:
    groups: dict[str, list[BenchReport]] = {}
    for r in reports:
        groups.setdefault(r.instance, []).append(r)
    for group in groups.values():
        ok = sorted((r for r in group if not r.failed),
                    key=lambda r: (r.avg_ns_per_op, r.algorithm))
        for r in group:
            r.slowdown = None
        if not ok:
            continue
        best = ok[0].avg_ns_per_op
        ok[0].slowdown = 1.0
        for r in ok[1:]:
            if best > 0:
                r.slowdown = r.avg_ns_per_op / best
            else:
                r.slowdown = 1.0 if r.avg_ns_per_op == 0 else math.inf


def _fmt_slowdown(r: BenchReport, fastest: bool) -> str:
    if fastest:
        return "1.00"
    # round up so that only the group's fastest row prints as 1.00
    return f"{max(1.01, math.ceil(r.slowdown * 100 - 1e-9) / 100):.2f}"


def emit_csv(reports: list[BenchReport]) -> str:
    if not reports:
        raise ValueError("no reports to emit")
    if any(r.slowdown is None and not r.failed for r in reports):
        assign_slowdowns(reports)
    fastest = set()
    groups: dict[str, list[BenchReport]] = {}
    for r in reports:
        if not r.failed:
            groups.setdefault(r.instance, []).append(r)
    for group in groups.values():
        fastest.add(id(min(group, key=lambda r: (r.avg_ns_per_op, r.algorithm))))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sorted(reports, key=lambda r: (r.algorithm, r.instance)):
        if r.failed:
            w.writerow([r.algorithm, r.instance, r.ops, "", "", 1])
        else:
            w.writerow([r.algorithm, r.instance, r.ops, f"{r.avg_ns_per_op:.2f}",
                        _fmt_slowdown(r, id(r) in fastest), 0])
    return buf.getvalue()


# -- oracle sweep ------------------------------------------------------------

@dataclass
class VerifyResult:
    ok: bool
    steps: int
    checks: int
    message: str = ""
    aborted: bool = False


def verify(algorithm: str, seq: UpdateSequence, seed: int = 0, full_every: int = 1000,
           lfmm: bool = False) -> VerifyResult:
    """Check the algorithm's output after every single update."""
    name = resolve(algorithm)
    if seq.meta.get("target") == name and seq.meta.get("coupled_seed") is not None:
        seed = int(seq.meta["coupled_seed"])
    alg = make_algorithm(name, seq.n, seq.delta_bound, seed)
    chk = checker_for(alg, full_every, lfmm=lfmm and hasattr(alg, "edge_ranks"))
    apply = alg.apply
    try:
        for op in seq.ops:
            apply(op)
            chk.after(op)
        chk.full()
    except (CheckFailure, IterationBoundExceeded) as exc:
        return VerifyResult(False, chk.steps, chk.checks, str(exc))
    except AlgorithmAbort as exc:
        return VerifyResult(False, chk.steps, chk.checks, f"abort: {exc}", aborted=True)
    return VerifyResult(True, chk.steps, chk.checks, "all checks passed")

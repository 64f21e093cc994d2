import csv
import io
import math
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

import dynbench.bench as bench
from dynbench.bench import (BenchReport, RunConfig, emit_csv, geometric_mean, load_instance,
                            parse_gen_spec, rep_seeds, run_benchmark, run_group, verify)
from dynbench.graph import make_sequence

FIXTURES = Path(__file__).parent / "fixtures"
SPEC = "random:n=64,m=400,rho=0.5,seed=3"


def test_geometric_mean_examples():
    assert abs(geometric_mean([1, 100]) - 10) <= 1e-12
    assert geometric_mean([7.5]) == pytest.approx(7.5, abs=1e-12)
    assert abs(geometric_mean([2, 8]) - 4) <= 1e-12


def test_geometric_mean_errors():
    with pytest.raises(ValueError):
        geometric_mean([])
    with pytest.raises(ValueError):
        geometric_mean([1, 0])
    with pytest.raises(ValueError):
        geometric_mean([3, -1])


@given(st.lists(st.floats(1e-3, 1e6), min_size=1, max_size=20), st.floats(1e-3, 1e3))
def test_geometric_mean_scale_equivariant(vals, c):
    assert math.isclose(geometric_mean([c * v for v in vals]), c * geometric_mean(vals),
                        rel_tol=1e-9)


def test_empty_sequence_report():
    seq = make_sequence(4, [])
    rep = run_benchmark(RunConfig("TrivialMatch", seq, repetitions=2))
    assert rep.ops == 0 and rep.avg_ns_per_op == 0.0 and not rep.failed
    assert len(rep.run_ns) == 2


def test_repetitions_must_be_positive():
    with pytest.raises(ValueError):
        RunConfig("CountCol", SPEC, repetitions=0)


def test_untimed_runs_are_deterministic():
    _, seq = load_instance(SPEC)
    for name in ("RecurseCol", "HierCol", "Hier2Match", "RandR2Match"):
        a = run_benchmark(RunConfig(name, seq, repetitions=2, seed=4, timing=False))
        b = run_benchmark(RunConfig(name, seq, repetitions=2, seed=4, timing=False))
        assert a.counters == b.counters and a.final_size == b.final_size
        assert a.run_ns == [0, 0]


def test_rep_seeds_distinct_and_coupled():
    _, seq = load_instance(SPEC)
    seeds = rep_seeds(seq, "CountCol", 1, 5)
    assert len(set(seeds)) == 5
    _, clash = load_instance("clashing:n=32,delta=4,count=20,target=CountCol,target_seed=9")
    assert rep_seeds(clash, "CountCol", 1, 3) == [9, 9, 9]
    assert len(set(rep_seeds(clash, "RecurseCol", 1, 3))) == 3


def test_init_prefix_excluded_for_coloring():
    _, seq = load_instance("equal:n=64,delta=6,updates=100,seed=1")
    col = run_benchmark(RunConfig("CountCol", seq, repetitions=1, timing=False))
    mat = run_benchmark(RunConfig("TrivialMatch", seq, repetitions=1, timing=False))
    assert col.ops == len(seq.ops) - seq.init_ops
    assert mat.ops == len(seq.ops)


def test_checks_run_outside_timed_regions(monkeypatch):
    # a fake clock that only moves while the checker runs
    now = [0]

    class FakeTime:
        @staticmethod
        def perf_counter_ns():
            return now[0]

    real_checker = bench.checker_for

    def slow_checker(alg, *a, **kw):
        chk = real_checker(alg, *a, **kw)
        advance = chk.advance

        def timed_advance(ops):
            now[0] += 10**9
            advance(ops)
        chk.advance = timed_advance
        return chk

    monkeypatch.setattr(bench, "time", FakeTime)
    monkeypatch.setattr(bench, "checker_for", slow_checker)
    _, seq = load_instance(SPEC)
    rep = run_benchmark(RunConfig("TrivialMatch", seq, repetitions=2, check_every=50,
                                  include_init=True))
    assert rep.checks > 0
    assert rep.run_ns == [0, 0]


def test_abort_marks_report_failed(monkeypatch):
    _, seq = load_instance("clashing:n=64,delta=8,count=50,target=RecurseCol,seed=1")
    orig = bench.make_algorithm

    def capped(name, n, delta, seed=0, **kw):
        if name == "RecurseCol":
            kw["cascade_cap"] = 0
        return orig(name, n, delta, seed, **kw)

    monkeypatch.setattr(bench, "make_algorithm", capped)
    rep = run_benchmark(RunConfig("RecurseCol", seq, repetitions=2))
    assert rep.failed and not rep.incorrect and "cascade" in rep.reason
    assert rep.avg_ns_per_op is None
    line = emit_csv([rep]).splitlines()[1]
    assert line.endswith(",,,1")


def test_csv_single_report():
    rep = BenchReport("CountCol", "x", 10, run_ns=[1000])
    text = emit_csv([rep])
    assert text.splitlines() == ["algorithm,instance,ops,avg_ns_per_op,slowdown,failed",
                                 "CountCol,x,10,100.00,1.00,0"]


def test_csv_golden_file():
    reports = [
        BenchReport("RecurseCol", "inst-a", 1000, run_ns=[1_500_000]),
        BenchReport("CountCol", "inst-a", 1000, run_ns=[2_000_000, 2_000_000]),
        BenchReport("HierCol", "inst-a", 1000, failed=True, reason="abort: test"),
        BenchReport("RandRCol", "inst-b", 500, run_ns=[50_000]),
        BenchReport("CountCol", "inst-b", 500, run_ns=[50_000]),
    ]
    bench.assign_slowdowns(reports)
    assert emit_csv(reports).encode() == (FIXTURES / "golden_report.csv").read_bytes()


def test_csv_exactly_one_fastest_per_group():
    reports = run_group([RunConfig(a, SPEC, repetitions=1, warmup=False)
                         for a in ("TrivialMatch", "Hier1Match", "RandR2Match")])
    rows = list(csv.DictReader(io.StringIO(emit_csv(reports))))
    assert len(rows) == 3 and rows[0]["instance"] == SPEC
    assert [r["slowdown"] for r in rows].count("1.00") == 1


def test_parallel_requires_untimed():
    with pytest.raises(ValueError):
        run_group([RunConfig("CountCol", SPEC)], parallel=True)
    reps = run_group([RunConfig(a, SPEC, repetitions=1, timing=False)
                      for a in ("CountCol", "RandRCol")], parallel=True)
    assert all(not r.failed for r in reps)


def test_gen_spec_parsing():
    cfg = parse_gen_spec("random:n=10,m=20,rho=0.5,seed=2")
    assert (cfg.kind, cfg.n, cfg.m, cfg.rho, cfg.seed) == ("RandomSeq", 10, 20, 0.5, 2)
    with pytest.raises(ValueError):
        parse_gen_spec("nope:n=1")
    with pytest.raises(ValueError):
        parse_gen_spec("er:n=4,bogus=1")
    with pytest.raises(ValueError):
        parse_gen_spec("er:n")


def test_load_instance_sources(tmp_path):
    from dynbench.graph import write_sequence
    inst_id, seq = load_instance(SPEC)
    assert inst_id == SPEC
    p = tmp_path / "s.txt"
    with open(p, "w") as fh:
        write_sequence(seq, fh)
    assert load_instance(str(p))[1] == seq
    t = tmp_path / "t.txt"
    t.write_text("a b 1 0\n")
    assert load_instance(f"temporal:{t}")[1].n == 2
    with pytest.raises(FileNotFoundError):
        load_instance(str(tmp_path / "missing"))


def test_verify_detects_broken_algorithm(monkeypatch):
    from dynbench.matching import TrivialMatch
    _, seq = load_instance(SPEC)
    assert verify("TrivialMatch", seq).ok
    # forget to rematch after deleting a matching edge
    monkeypatch.setattr(TrivialMatch, "delete", lambda self, u, v: (
        self.adj.remove(u, v), self.adj.remove(v, u),
        self.P.__setitem__(u, -1) if self.P[u] == v else None,
        self.P.__setitem__(v, -1) if self.P[v] == u else None))
    res = verify("TrivialMatch", seq)
    assert not res.ok and not res.aborted

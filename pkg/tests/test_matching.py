import heapq
import random

import pytest

from conftest import Scripted, small_random
from dynbench.generators import gen_er, sliding_window_sequence
from dynbench.graph import delete, insert, make_sequence
from dynbench.matching import INF, Hier1Match, Hier2Match, RandR1Match, TrivialMatch
from dynbench.oracle import MatchingChecker, greedy_lfmm, is_lfmm, snapshot_of
from dynbench.randr2 import RandR2Match
from dynbench.registry import MATCHING, make_algorithm


def matching(alg):
    return set(alg.export_matching())


def run(alg, ops):
    for op in ops:
        alg.apply(op)
    return alg


# -- TrivialMatch ------------------------------------------------------------

def test_trivial_examples():
    alg = run(TrivialMatch(4, 3), [insert(0, 1)])
    assert matching(alg) == {(0, 1)}
    run(alg, [insert(1, 2)])
    assert matching(alg) == {(0, 1)}

    alg = run(TrivialMatch(4, 3), [insert(1, 2), insert(0, 1), insert(2, 3)])
    assert matching(alg) == {(1, 2)}
    run(alg, [delete(1, 2)])
    assert matching(alg) == {(0, 1), (2, 3)}


# -- hierarchical ------------------------------------------------------------

@pytest.mark.parametrize("cls", [Hier1Match, Hier2Match])
def test_hier_insert_matches_at_level_zero(cls):
    alg = run(cls(4, 3), [insert(0, 1)])
    assert matching(alg) == {(0, 1)}
    assert alg.level[0] == alg.level[1] == 0


@pytest.mark.parametrize("cls", [Hier1Match, Hier2Match])
def test_hier_delete_non_matching_edge_keeps_levels(cls):
    alg = run(cls(4, 3), [insert(0, 1), insert(2, 3), insert(1, 2)])
    before = list(alg.level)
    run(alg, [delete(1, 2)])
    assert alg.level == before
    alg.audit()


@pytest.mark.parametrize("cls", [Hier1Match, Hier2Match])
def test_hier_freed_vertex_without_neighbors(cls):
    alg = run(cls(3, 2), [insert(0, 1), delete(0, 1)])
    assert alg.P[0] == alg.P[1] == -1
    assert alg.level[0] == alg.level[1] == -1


def test_hier1_levels_stay_in_range():
    seq = small_random(64, 1200, 0.6, 5)
    alg = Hier1Match(seq.n, seq.delta_bound, 2)
    chk = MatchingChecker(alg)
    for op in seq.ops:
        alg.apply(op)
        chk.after(op)
        assert set(alg.level) <= {-1, 0, 1}
    alg.audit()
    assert alg.steals > 0


def test_hier2_maximal_on_n16():
    for seed in range(10):
        seq = small_random(16, 100, 0.75, seed)
        alg = Hier2Match(16, seq.delta_bound, seed)
        chk = MatchingChecker(alg, full_every=1)
        for op in seq.ops:
            alg.apply(op)
            chk.after(op)
        alg.audit()


# -- RandR1Match -------------------------------------------------------------

def _ranked(cls, n, edges_ranks):
    alg = cls(n, n - 1)
    alg.rng = Scripted([r for _, r in edges_ranks])
    run(alg, [insert(*e) for e, _ in edges_ranks])
    return alg


PATH = [((0, 1), 0.3), ((1, 2), 0.1), ((2, 3), 0.2)]


def test_randr1_first_edge():
    alg = _ranked(RandR1Match, 2, [((0, 1), 0.4)])
    assert matching(alg) == {(0, 1)}
    assert alg.elim_key[(0, 1)] == alg.pi[(0, 1)] == 0.4


@pytest.mark.parametrize("cls", [RandR1Match, RandR2Match])
@pytest.mark.parametrize("order", [(0, 1, 2), (2, 1, 0), (1, 0, 2), (0, 2, 1)])
def test_rank_path_any_order(cls, order):
    alg = _ranked(cls, 4, [PATH[i] for i in order])
    assert matching(alg) == {(1, 2)}
    run(alg, [delete(1, 2)])
    assert matching(alg) == {(0, 1), (2, 3)}


def test_randr1_eliminator_invariant():
    seq = small_random(32, 300, 0.5, 1)
    alg = RandR1Match(32, seq.delta_bound, 3)
    for op in seq.ops:
        alg.apply(op)
        for e, key in alg.elim_key.items():
            u, v = e
            if alg.P[u] == v:
                assert key == alg.pi[e]
            else:
                assert key == min(alg.k[u], alg.k[v]) < alg.pi[e]
    alg.audit()


# -- RandR2Match (Algorithms 1-3) -------------------------------------------

def test_randr2_insert_examples():
    alg = RandR2Match(4, 3)
    alg.rng = Scripted([0.5, 0.2, 0.9])
    alg.apply(insert(0, 1))
    assert alg.P[0] == 1 and alg.k[0] == alg.k[1] == 0.5
    assert alg.queue_pushes == 0
    alg.apply(insert(1, 2))
    assert matching(alg) == {(1, 2)}
    assert alg.queue_pushes == 1  # vertex 0, priority 0.5
    assert alg.P[0] == -1 and alg.k[0] == INF
    alg.apply(insert(0, 3))
    assert matching(alg) == {(1, 2), (0, 3)}


def test_randr2_delete_examples():
    alg = _ranked(RandR2Match, 3, [((0, 1), 0.5), ((1, 2), 0.2)])
    assert matching(alg) == {(1, 2)}
    run(alg, [delete(1, 2)])
    assert matching(alg) == {(0, 1)}
    run(alg, [delete(0, 1)])
    assert matching(alg) == set()


def test_randr2_delete_non_matching_edge():
    alg = _ranked(RandR2Match, 4, [((0, 1), 0.3), ((1, 2), 0.6), ((2, 3), 0.4)])
    assert matching(alg) == {(0, 1), (2, 3)}
    pushes = alg.queue_pushes
    run(alg, [delete(1, 2)])
    assert matching(alg) == {(0, 1), (2, 3)}
    assert alg.queue_pushes == pushes


def _unmatch_all(alg):
    for v in range(alg.n):
        alg.P[v] = -1
        alg.k[v] = INF


def test_find_new_partners_examples():
    alg = RandR2Match(3, 2)
    alg.find_new_partners([])
    assert alg.iterations == 0

    alg = _ranked(RandR2Match, 2, [((0, 1), 0.5)])
    _unmatch_all(alg)
    alg.find_new_partners([(0.5, 0)])
    assert alg.P[0] == -1

    alg = _ranked(RandR2Match, 4, [((0, 1), 0.5), ((2, 3), 0.7)])
    _unmatch_all(alg)
    S = [(0.2, 2), (0.2, 1)]
    heapq.heapify(S)
    alg.track_order = True
    alg.find_new_partners(S)
    assert matching(alg) == {(0, 1), (2, 3)}
    assert alg.order_violations == 0


def test_randr2_rank_redrawn_on_reinsert_and_unique():
    alg = RandR2Match(3, 2)
    alg.rng = Scripted([0.5, 0.5, 0.0, 0.25])
    alg.apply(insert(0, 1))
    alg.apply(delete(0, 1))
    alg.apply(insert(0, 1))
    # 0.5 is taken, 0.0 is excluded
    assert alg.rank(0, 1) == 0.25


@pytest.mark.parametrize("cls", [RandR1Match, RandR2Match])
def test_lfmm_every_step(cls):
    for seed in range(6):
        seq = small_random(24, 150, [0, 0.25, 0.5, 0.75, 1, 0.5][seed], seed)
        alg = cls(24, seq.delta_bound, seed)
        chk = MatchingChecker(alg, full_every=1, lfmm=True)
        for op in seq.ops:
            alg.apply(op)
            chk.after(op)
            assert is_lfmm(snapshot_of(alg))
        alg.audit()


def test_randr2_claims_on_random_runs():
    for seed in range(8):
        seq = small_random(48, 600, 0.5 + seed / 16, seed)
        alg = RandR2Match(48, seq.delta_bound, seed, track_order=True)
        for op in seq.ops:
            alg.apply(op)
        assert alg.order_violations == 0
        assert alg.push_violations == 0
        assert set(alg.export_matching()) == greedy_lfmm(snapshot_of(alg))


@pytest.mark.parametrize("name", MATCHING)
def test_maximal_on_random_and_sliding(name):
    seqs = [small_random(40, 400, rho, s) for s, rho in enumerate([0, 0.25, 0.5, 1.0])]
    seqs.append(sliding_window_sequence(gen_er(40, 300, 3), 60, 1.0, 4))
    for i, seq in enumerate(seqs):
        alg = make_algorithm(name, seq.n, seq.delta_bound, i)
        chk = MatchingChecker(alg, full_every=25)
        for op in seq.ops:
            alg.apply(op)
            chk.after(op)
        chk.full()
        if hasattr(alg, "audit"):
            alg.audit()


@pytest.mark.parametrize("name", MATCHING)
def test_deterministic(name):
    seq = small_random(48, 500, 0.5, 11)
    runs = []
    for _ in range(2):
        alg = run(make_algorithm(name, seq.n, seq.delta_bound, 5), seq.ops)
        runs.append((alg.export_matching(), alg.counters()))
    assert runs[0] == runs[1]


def test_lfmm_is_seed_independent_of_insert_order_given_ranks():
    rnd = random.Random(1)
    edges = [(u, v) for u in range(10) for v in range(u + 1, 10) if rnd.random() < 0.4]
    ranks = {e: rnd.random() for e in edges}
    results = set()
    for _ in range(4):
        rnd.shuffle(edges)
        for cls in (RandR1Match, RandR2Match):
            alg = _ranked(cls, 10, [(e, ranks[e]) for e in edges])
            results.add(frozenset(alg.export_matching()))
    assert len(results) == 1

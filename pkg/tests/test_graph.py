import io

import pytest
from hypothesis import given, settings, strategies as st

from dynbench.graph import (DELETE, INSERT, HashedAdjacency, InvalidUpdate, LazyRankedAdjacency,
                            SwapDeleteAdjacency, UpdateOp, UpdateSequence, delete, dumps_sequence,
                            insert, lazy_ranked_compact, make_sequence, max_degree,
                            normalize_edge, read_sequence, replay_edges, swapdelete_remove,
                            validate, write_sequence)


def test_normalize_edge():
    assert normalize_edge(3, 1) == (1, 3)
    assert normalize_edge(0, 7) == (0, 7)
    with pytest.raises(InvalidUpdate):
        normalize_edge(5, 5)


def _swap(entries, w):
    adj = SwapDeleteAdjacency(10)
    for x in entries:
        adj.add(0, x)
    swapdelete_remove(adj, 0, w)
    return adj


def test_swapdelete_remove_examples():
    assert _swap([2, 5, 9], 5).neighbors(0) == [2, 9]
    assert _swap([2], 2).neighbors(0) == []
    assert _swap([2, 5, 9], 9).neighbors(0) == [2, 5]


def test_swapdelete_positions_follow_swaps():
    adj = _swap([2, 5, 9, 4], 2)
    assert adj.neighbors(0) == [4, 5, 9]
    assert adj.pos[0] == {4: 0, 5: 1, 9: 2}
    with pytest.raises(InvalidUpdate):
        adj.remove(0, 2)


def test_lazy_ranked_compact_examples():
    a, b, c = 1, 2, 3
    adj = LazyRankedAdjacency(4)
    for rank, w in [(0.7, a), (0.2, b), (0.5, c)]:
        adj.add(0, w, rank)
    adj.remove(0, c, 0.5)
    assert lazy_ranked_compact(adj, 0) == [(0.2, b), (0.7, a)]
    assert adj.dead[0] == []
    # idempotent until the next mutation
    assert lazy_ranked_compact(adj, 0) == [(0.2, b), (0.7, a)]

    assert lazy_ranked_compact(LazyRankedAdjacency(1), 0) == []

    adj = LazyRankedAdjacency(2)
    adj.add(0, 1, 0.9)
    adj.remove(0, 1, 0.9)
    assert lazy_ranked_compact(adj, 0) == []


def test_lazy_ranked_reinsert_with_new_rank_before_compaction():
    adj = LazyRankedAdjacency(2)
    adj.add(0, 1, 0.4)
    adj.remove(0, 1, 0.4)
    adj.add(0, 1, 0.8)
    assert adj.compact(0) == [(0.8, 1)]


def test_validate_rejects_bad_sequences():
    with pytest.raises(InvalidUpdate, match="duplicate"):
        make_sequence(3, [insert(0, 1), insert(1, 0)])
    with pytest.raises(InvalidUpdate, match="absent"):
        make_sequence(3, [insert(0, 1), delete(1, 2)])
    with pytest.raises(InvalidUpdate, match="range"):
        make_sequence(3, [insert(0, 3)])
    with pytest.raises(InvalidUpdate, match="degree bound"):
        validate(UpdateSequence(3, [insert(0, 1), insert(0, 2)], delta_bound=1))
    with pytest.raises(InvalidUpdate, match="canonical"):
        validate(UpdateSequence(3, [UpdateOp(INSERT, 2, 1)], delta_bound=2))


def test_make_sequence_computes_delta():
    seq = make_sequence(4, [insert(0, 1), insert(0, 2), delete(0, 1), insert(0, 3)])
    assert seq.delta_bound == 2
    assert max_degree(4, seq.ops) == 2
    assert replay_edges(seq) == {(0, 2), (0, 3)}
    assert replay_edges(seq, 1) == {(0, 1)}


def test_text_round_trip(tmp_path):
    seq = make_sequence(5, [insert(0, 1), insert(3, 4), delete(0, 1)], init_ops=1,
                        meta={"kind": "demo", "seed": 3})
    text = dumps_sequence(seq)
    assert text.startswith("n 5\n")
    assert "i 0 1\ni 3 4\nd 0 1\n" in text
    back = read_sequence(io.StringIO(text))
    assert back == seq
    path = tmp_path / "s.txt"
    with open(path, "w") as fh:
        write_sequence(seq, fh)
    assert read_sequence(path) == seq


def test_read_sequence_canonicalises_and_ignores_comments():
    seq = read_sequence(io.StringIO("# hello\nn 3\ni 2 0\n\nd 0 2\n"))
    assert seq.ops == [UpdateOp(INSERT, 0, 2), UpdateOp(DELETE, 0, 2)]
    assert seq.delta_bound == 1


@pytest.mark.parametrize("text, line", [
    ("n 3\ni 0\n", 2),
    ("n 3\nx 0 1\n", 2),
    ("n 3\ni 0 1\ni 1 1\n", 3),
    ("n 3\n# delta_bound many\n", 2),
])
def test_read_sequence_reports_line(text, line):
    with pytest.raises(InvalidUpdate, match=f"line {line}"):
        read_sequence(io.StringIO(text))


def test_read_sequence_needs_header():
    with pytest.raises(InvalidUpdate, match="header"):
        read_sequence(io.StringIO("i 0 1\n"))


# differential test: the three adjacency flavors agree after every prefix
N = 8


@st.composite
def update_sequences(draw):
    present = set()
    ops = []
    for _ in range(draw(st.integers(0, 60))):
        if present and draw(st.booleans()):
            e = draw(st.sampled_from(sorted(present)))
            present.remove(e)
            ops.append(UpdateOp(DELETE, *e))
        else:
            a = draw(st.integers(0, N - 1))
            b = draw(st.integers(0, N - 1))
            if a == b or normalize_edge(a, b) in present:
                continue
            e = normalize_edge(a, b)
            present.add(e)
            ops.append(UpdateOp(INSERT, *e))
    return make_sequence(N, ops)


@settings(max_examples=150, deadline=None)
@given(update_sequences(), st.randoms(use_true_random=False))
def test_adjacency_flavors_agree(seq, rnd):
    sd, hs, lz = SwapDeleteAdjacency(N), HashedAdjacency(N), LazyRankedAdjacency(N)
    rank = {}
    for kind, u, v in seq.ops:
        if kind == INSERT:
            r = rnd.random()
            while r in lz.owner or r == 0.0:
                r = rnd.random()
            rank[(u, v)] = r
            for a, b in ((u, v), (v, u)):
                sd.add(a, b)
                hs.add(a, b)
                lz.add(a, b, r)
        else:
            r = rank.pop((u, v))
            for a, b in ((u, v), (v, u)):
                sd.remove(a, b)
                hs.remove(a, b)
                lz.remove(a, b, r)
        for x in range(N):
            want = set(hs.neighbors(x))
            assert sorted(sd.neighbors(x)) == sorted(want)
            compacted = lz.compact(x)
            assert {w for _, w in compacted} == want
            assert len(compacted) == hs.degree(x) <= seq.delta_bound
            assert [r for r, _ in compacted] == sorted(r for r, _ in compacted)

"""Coalescing algebra: adjacency merging is canonical and key-safe."""

import itertools

from hypothesis import given, settings, strategies as st

from ringflow.addressing import AddressRange
from ringflow.coalescer import (CoalesceBuffer, merge_closure, merge_key,
                                merge_pair, mergeable)
from ringflow.tokens import TaskToken


def tok(start, end, task_id=1, param=0, remote=(0, 0), from_node=0):
    return TaskToken(task_id, from_node, AddressRange(start, end),
                     AddressRange(*remote), param)


def canon(tokens):
    """Order-insensitive fingerprint of a token multiset."""
    return sorted((t.task_id, t.param, t.remote_range.start, t.remote_range.end,
                   t.task_range.start, t.task_range.end) for t in tokens)


# -- pairwise predicates --------------------------------------------------------

def test_mergeable_requires_adjacency():
    assert mergeable(tok(0, 5), tok(5, 9))
    assert mergeable(tok(5, 9), tok(0, 5))     # either orientation
    assert not mergeable(tok(0, 5), tok(6, 9))   # gap
    assert not mergeable(tok(0, 5), tok(4, 9))   # overlap
    assert not mergeable(tok(0, 5), tok(0, 5))   # duplicate


def test_mergeable_requires_same_key():
    base = tok(0, 5)
    assert not mergeable(base, tok(5, 9, task_id=2))
    assert not mergeable(base, tok(5, 9, param=1))
    assert not mergeable(base, tok(5, 9, remote=(10, 20)))
    # from_node is provenance, not identity: it does not block a merge
    assert mergeable(base, tok(5, 9, from_node=3))


def test_merge_pair_earlier_provenance_wins():
    a = tok(0, 5, from_node=4)
    b = tok(5, 9, from_node=9)
    merged = merge_pair(a, b)
    assert merged.task_range == AddressRange(0, 9)
    assert merged.from_node == 4
    assert merge_pair(b, a) == merged           # argument order irrelevant
    try:
        merge_pair(tok(0, 5), tok(7, 9))
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for a gap")


# -- closure --------------------------------------------------------------------

def test_closure_chains_adjacent_runs():
    parts = [tok(4, 6), tok(0, 2), tok(2, 4), tok(8, 10)]
    out = merge_closure(parts)
    assert canon(out) == canon([tok(0, 6), tok(8, 10)])


def test_closure_is_permutation_invariant():
    parts = [tok(0, 2), tok(2, 4), tok(4, 8), tok(9, 12), tok(12, 13),
             tok(0, 2, param=5), tok(2, 4, param=5)]
    baseline = canon(merge_closure(parts))
    for perm in itertools.permutations(parts):
        assert canon(merge_closure(list(perm))) == baseline


def test_closure_never_crosses_keys():
    parts = [tok(0, 4), tok(4, 8, task_id=2), tok(8, 12, param=1),
             tok(12, 16, remote=(30, 40))]
    out = merge_closure(parts)
    assert canon(out) == canon(parts)            # nothing merged


def test_closure_keeps_duplicates_and_overlaps():
    dup = [tok(0, 4), tok(0, 4)]
    assert canon(merge_closure(dup)) == canon(dup)
    overlap = [tok(0, 6), tok(4, 10)]
    assert canon(merge_closure(overlap)) == canon(overlap)
    # a duplicate blocks nothing around it
    trio = [tok(0, 4), tok(0, 4), tok(4, 8)]
    assert canon(merge_closure(trio)) == canon([tok(0, 8), tok(0, 4)])


@settings(max_examples=300)
@given(st.data())
def test_closure_properties_random(data):
    n = data.draw(st.integers(1, 12))
    parts = []
    for _ in range(n):
        s = data.draw(st.integers(0, 30))
        e = data.draw(st.integers(s + 1, 31))
        parts.append(tok(s, e,
                         task_id=data.draw(st.integers(1, 3)),
                         param=data.draw(st.integers(0, 1))))
    out = merge_closure(parts)
    # total covered length per key is conserved
    def coverage(ts):
        cov = {}
        for t in ts:
            cov[merge_key(t)] = cov.get(merge_key(t), 0) + len(t.task_range)
        return cov
    assert coverage(out) == coverage(parts)
    assert len(out) <= len(parts)
    # idempotent and order-insensitive
    assert canon(merge_closure(out)) == canon(out)
    shuffled = data.draw(st.permutations(parts))
    assert canon(merge_closure(list(shuffled))) == canon(out)

    # when same-key inputs never overlap (the only shape real spawns
    # produce), the sweep is a true fixpoint: no mergeable pair survives
    def overlap_free(ts):
        by_key = {}
        for t in ts:
            by_key.setdefault(merge_key(t), []).append(t.task_range)
        for rs in by_key.values():
            rs.sort(key=lambda r: (r.start, r.end))
            if any(b.start < a.end for a, b in zip(rs, rs[1:])):
                return False
        return True

    if overlap_free(parts):
        for a in out:
            for b in out:
                if a is not b:
                    assert not mergeable(a, b)


# -- buffer ---------------------------------------------------------------------

def test_buffer_respects_window():
    buf = CoalesceBuffer(window=2)
    assert buf.add(tok(0, 1)) and buf.add(tok(5, 6))
    assert not buf.has_space
    assert not buf.add(tok(9, 10))
    assert buf.pending_count == 2


def test_buffer_merges_before_release():
    buf = CoalesceBuffer(window=8)
    for piece in (tok(2, 4), tok(0, 2), tok(4, 8)):
        assert buf.add(piece)
    released = []
    merges, count = buf.step(lambda t: (released.append(t), True)[1])
    assert merges == 2
    assert count == 1                      # one token per step by default
    assert released == [tok(0, 8)]
    assert buf.pending_count == 0


def test_buffer_release_is_oldest_first():
    buf = CoalesceBuffer(window=8)
    buf.add(tok(20, 24))
    buf.add(tok(0, 4))
    released = []
    buf.step(lambda t: (released.append(t), True)[1])
    buf.step(lambda t: (released.append(t), True)[1])
    assert released == [tok(20, 24), tok(0, 4)]   # arrival order, not address


def test_merged_token_keeps_oldest_seq():
    buf = CoalesceBuffer(window=8)
    buf.add(tok(20, 24))        # seq 0
    buf.add(tok(4, 8))          # seq 1
    buf.add(tok(0, 4))          # seq 2, merges into seq 1's token
    released = []
    for _ in range(3):
        buf.step(lambda t: (released.append(t), True)[1])
    assert released == [tok(20, 24), tok(0, 8)]


def test_buffer_drain_all():
    buf = CoalesceBuffer(window=8, drain_all=True)
    for i in (0, 2, 9):
        buf.add(tok(i * 2, i * 2 + 1))
    released = []
    merges, count = buf.step(lambda t: (released.append(t), True)[1])
    assert count == 3 and buf.pending_count == 0


def test_refused_tokens_stay_pending():
    buf = CoalesceBuffer(window=4)
    buf.add(tok(0, 2))
    merges, count = buf.step(lambda t: False)
    assert count == 0 and buf.pending_count == 1
    released = []
    buf.step(lambda t: (released.append(t), True)[1])
    assert released == [tok(0, 2)]


def test_buffer_matches_closure_when_batched():
    parts = [tok(i * 3, i * 3 + 3) for i in range(5)]      # one big run
    parts += [tok(40, 41, param=2), tok(41, 44, param=2)]
    buf = CoalesceBuffer(window=16, drain_all=True)
    for p in parts:
        assert buf.add(p)
    released = []
    buf.step(lambda t: (released.append(t), True)[1])
    assert canon(released) == canon(merge_closure(parts))

import random

from slreach.heaps import Heap, MemoryState
from slreach.support import (
    SupportGraph,
    all_terms,
    build_support_graph,
    dump_support_graph,
    meet_point,
    meet_term,
    taxonomy,
    term_value,
    var_term,
)

from oracle import all_states, naive_meet


def test_term_count():
    assert len(all_terms(2)) == 2 * 2 + 2
    assert len(all_terms(3)) == 3 * 3 + 3


def test_meet_point_examples(merge_states):
    a, _ = merge_states
    assert meet_point(a, 1, 2) == 21
    assert meet_point(a, 2, 1) == 23
    shared = MemoryState(2, {1: 1, 2: 1}, Heap({1: 1}))
    assert meet_point(shared, 1, 2) == 1
    disconnected = MemoryState(2, {1: 1, 2: 2}, Heap())
    assert meet_point(disconnected, 1, 2) is None


def test_meet_point_degenerate():
    # m(x1,x1) denotes s(x1) exactly when s(x1) reaches a variable value
    m = MemoryState(1, {1: 1}, Heap())
    assert meet_point(m, 1, 1) == 1
    assert term_value(m, meet_term(1, 1)) == 1
    assert term_value(m, var_term(1)) == 1
    loop = MemoryState(1, {1: 1}, Heap({1: 2, 2: 1}))
    assert term_value(loop, meet_term(1, 1)) == 1
    dangling = MemoryState(2, {1: 1, 2: 9}, Heap({1: 2, 2: 3}))
    assert meet_point(dangling, 1, 1) == 1  # reaches itself in zero steps


def test_meet_against_three_condition_scan():
    rng = random.Random(11)
    states = list(all_states(2, range(5), 3))
    rng.shuffle(states)
    for m in states[:400]:
        for i, j in ((1, 1), (1, 2), (2, 1), (2, 2)):
            cands = naive_meet(m, i, j)
            assert len(cands) <= 1  # uniqueness
            got = meet_point(m, i, j)
            assert got == (cands[0] if cands else None), (m, i, j)


def test_build_example_empty_heap():
    g = build_support_graph(MemoryState(1, {1: 1}, Heap()))
    assert g.vertices == {1}
    assert g.edges == {}
    assert g.rho == frozenset()
    assert g.labels[1] == frozenset({var_term(1), meet_term(1, 1)})
    assert g.rem == frozenset()


def test_build_example_chain():
    g = build_support_graph(MemoryState(2, {1: 1, 2: 4}, Heap({1: 2, 2: 3, 3: 4})))
    assert g.vertices == {1, 4}
    assert g.edge_pairs() == {(1, 4)}
    assert g.btw(1, 4) == (2, 3)
    assert g.rho == {1}
    assert g.rem == frozenset()


def test_build_example_unreachable_cell():
    g = build_support_graph(MemoryState(1, {1: 1}, Heap({5: 6})))
    assert g.vertices == {1}
    assert g.rem == {5}


def test_partition_property():
    rng = random.Random(3)
    states = list(all_states(2, range(6), 4))
    rng.shuffle(states)
    for m in states[:500]:
        g = build_support_graph(m)
        pieces = [set(g.rho), set(g.rem)]
        pieces.extend(set(btw) for _, (_, btw) in g.edges.items())
        union = set()
        total = 0
        for p in pieces:
            union |= p
            total += len(p)
        assert union == set(m.heap.domain())
        assert total == len(m.heap)  # pairwise disjoint


def test_labels_shrink_under_subheaps():
    rng = random.Random(5)
    states = list(all_states(2, range(5), 3))
    rng.shuffle(states)
    from slreach.heaps import subheaps

    for m in states[:120]:
        full = build_support_graph(m).vertices
        for h in subheaps(m.heap):
            sub = build_support_graph(m.with_heap(h)).vertices
            assert sub <= full, (m, h)


def test_taxonomy(merge_states):
    a, b = merge_states
    assert taxonomy(a, 1, 2) == 3
    assert taxonomy(b, 1, 2) == 3
    # simple merge onto a variable that dangles
    m = MemoryState(3, {1: 0, 2: 1, 3: 3}, Heap({0: 2, 1: 2, 2: 3}))
    assert taxonomy(m, 1, 2) == 1
    # merge into a loop carrying the meet itself
    m2 = MemoryState(3, {1: 0, 2: 1, 3: 2}, Heap({0: 2, 1: 2, 2: 2}))
    assert taxonomy(m2, 1, 2) == 2
    assert taxonomy(MemoryState(2, {1: 0, 2: 1}, Heap()), 1, 2) is None


def test_taxonomy_exhaustive():
    rng = random.Random(13)
    states = list(all_states(2, range(5), 3))
    rng.shuffle(states)
    for m in states[:400]:
        for i, j in ((1, 2), (2, 1)):
            t = taxonomy(m, i, j)
            if meet_point(m, i, j) is None:
                assert t is None
            else:
                assert t in (1, 2, 3)
                if t == 2:
                    assert meet_point(m, i, j) == meet_point(m, j, i)
                if t == 3:
                    assert meet_point(m, i, j) != meet_point(m, j, i)


def test_dump_is_stable():
    m = MemoryState(2, {1: 1, 2: 4}, Heap({1: 2, 2: 3, 3: 4, 9: 9}))
    text = dump_support_graph(build_support_graph(m))
    assert text == dump_support_graph(build_support_graph(m))
    assert "vertex 1 [alloc]" in text
    assert "edge 1 -> 4 (btw 2)" in text
    assert "rem: 1" in text

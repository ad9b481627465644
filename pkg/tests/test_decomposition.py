"""Peeling, chain suppression, bushes, and component classification.

Oracles here are small graphs whose structure can be verified by hand,
plus a brute-force maximal-subgraph search for graphs up to 16 vertices
(two_core_bruteforce enumerates all vertex subsets).
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perclab.pairing import DegreeSequence, Multigraph, sample_configuration, project
from perclab.decomposition import (
    bushes,
    classify_components,
    count_deg2_paths,
    decompose,
    deg2_runs,
    kernel,
    longest_deg2_run,
    two_core,
    two_core_bruteforce,
)


def cycle(n: int) -> Multigraph:
    return Multigraph(n, np.array([[i, (i + 1) % n] for i in range(n)]))


def path(n: int) -> Multigraph:
    return Multigraph(n, np.array([[i, i + 1] for i in range(n - 1)]))


def k4() -> Multigraph:
    return Multigraph(4, np.array([[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]))


def theta_122() -> Multigraph:
    # two branch vertices 0,1 joined by a direct edge, a path through 2,
    # and a path through 3: internal chain lengths 0, 1, 1
    return Multigraph(4, np.array([[0, 1], [0, 2], [2, 1], [0, 3], [3, 1]]))


def triangle_with_tail() -> Multigraph:
    # triangle 0-1-2, tail 0-3-4, and the isolated vertex 5
    return Multigraph(6, np.array([[0, 1], [1, 2], [2, 0], [0, 3], [3, 4]]))


# ---------------------------------------------------------------------------
# peeling


def test_tree_peels_to_nothing():
    core = two_core(path(7))
    assert core.size == 0
    assert not core.edge_mask.any()


def test_cycle_is_its_own_core():
    core = two_core(cycle(6))
    assert core.size == 6
    assert core.edge_mask.all()


def test_triangle_with_tail_core():
    core = two_core(triangle_with_tail())
    assert sorted(np.flatnonzero(core.alive).tolist()) == [0, 1, 2]
    assert core.edge_count == 3
    sub, labels = core.subgraph()
    assert sub.n == 3 and sub.m == 3
    assert np.array_equal(labels, [0, 1, 2])


def test_loop_survives_peeling():
    # a loop provides degree 2 by itself
    g = Multigraph(2, np.array([[0, 0], [0, 1]]))
    core = two_core(g)
    assert np.array_equal(core.alive, [True, False])


def test_peel_order_does_not_matter():
    rng = np.random.default_rng(0)
    for trial in range(25):
        n = int(rng.integers(3, 14))
        degs = rng.integers(0, 4, size=n)
        if degs.sum() % 2:
            degs[0] += 1
        cfg = sample_configuration(DegreeSequence(degs), seed=int(rng.integers(2**31)))
        g = project(cfg)
        a = two_core(g, order="ascending")
        b = two_core(g, order="random", seed=trial)
        assert np.array_equal(a.alive, b.alive)
        assert np.array_equal(a.edge_mask, b.edge_mask)


def test_peel_matches_bruteforce():
    rng = np.random.default_rng(1)
    for trial in range(40):
        n = int(rng.integers(2, 11))
        degs = rng.integers(0, 4, size=n)
        if degs.sum() % 2:
            degs[0] += 1
        g = project(sample_configuration(DegreeSequence(degs), seed=trial))
        assert np.array_equal(two_core(g).alive, two_core_bruteforce(g))


# ---------------------------------------------------------------------------
# kernel


def test_theta_kernel():
    k = kernel(theta_122())
    assert k.graph.n == 2
    assert k.graph.m == 3
    assert sorted(k.internal.tolist()) == [0, 1, 1]
    assert k.cycles == []
    assert np.array_equal(k.labels, [0, 1])


def test_subdivided_k4_contracts_back():
    # put one extra vertex on every edge of K4: kernel must be K4 again
    base = k4()
    edges = []
    nxt = 4
    for u, v in base.edges:
        edges.append([u, nxt])
        edges.append([nxt, v])
        nxt += 1
    g = Multigraph(nxt, np.array(edges))
    k = kernel(g)
    assert k.graph.n == 4
    assert k.graph.m == 6
    assert np.all(k.internal == 1)
    from perclab.pairing import canonical_edges

    assert np.array_equal(canonical_edges(k.graph.edges), canonical_edges(k4().edges))


def test_pure_cycle_leaves_no_kernel():
    k = kernel(cycle(9))
    assert k.graph.n == 0
    assert k.graph.m == 0
    assert len(k.cycles) == 1
    assert sorted(k.cycles[0].tolist()) == list(range(9))
    assert k.cycle_lengths == [9]


def test_kernel_rejects_degree_one():
    with pytest.raises(ValueError):
        kernel(path(3))


def test_kernel_conservation_random():
    # vertices and edges split exactly into kernel / chain / cycle parts,
    # which the implementation asserts internally; exercise it broadly
    rng = np.random.default_rng(2)
    for trial in range(30):
        n = 2 * int(rng.integers(2, 8))  # even, so a cubic sequence pairs up
        g = project(sample_configuration(DegreeSequence.regular(n, 3), seed=trial))
        core_sub, _ = two_core(g).subgraph()
        if core_sub.n == 0:
            continue
        k = kernel(core_sub)
        assert k.graph.m + int(k.internal.sum()) + sum(k.cycle_lengths) == core_sub.m
        # kernel has min degree 3 unless everything sat on cycles
        if k.graph.n:
            assert int(k.graph.degree.min()) >= 3


# ---------------------------------------------------------------------------
# degree-2 runs


def test_runs_on_theta():
    runs = deg2_runs(theta_122())
    assert sorted(runs.chain_internal.tolist()) == [0, 1, 1]
    assert runs.longest == 1
    assert count_deg2_paths(theta_122(), 1) == (2, False)
    assert count_deg2_paths(theta_122(), 2) == (0, False)


def test_runs_on_pure_cycle():
    # a cycle of length L counts as a run of L-1, flagged as cyclic
    runs = deg2_runs(cycle(6))
    assert runs.longest == 5
    assert count_deg2_paths(cycle(6), 2) == (1, True)
    assert count_deg2_paths(cycle(6), 6) == (0, False)


def test_runs_on_k4():
    assert longest_deg2_run(k4()) == 0
    assert count_deg2_paths(k4(), 1) == (0, False)


# ---------------------------------------------------------------------------
# bushes


def test_bushes_of_triangle_with_tail():
    out = bushes(triangle_with_tail())
    got = sorted((sorted(b.vertices.tolist()), b.root) for b in out)
    # the tail hangs off core vertex 0; vertex 5 is a rootless singleton
    assert got == [([0, 3, 4], 0), ([5], None)]
    assert [b.size for b in out if b.root is not None] == [3]


def test_bare_core_has_no_bushes():
    assert bushes(cycle(5)) == []
    assert bushes(k4()) == []


def test_isolated_tree_is_a_rootless_bush():
    out = bushes(path(4))
    assert len(out) == 1
    assert out[0].root is None
    assert sorted(out[0].vertices.tolist()) == [0, 1, 2, 3]


# ---------------------------------------------------------------------------
# component classification


def test_classify_mixed():
    # giant = path on 0..4; then a triangle with a tail (cyclic but not a
    # cycle), a plain 3-cycle, and two trees (a 2-path and a singleton)
    edges = [
        [0, 1], [1, 2], [2, 3], [3, 4],
        [5, 6], [6, 7], [7, 5], [5, 8],
        [9, 10], [10, 11], [11, 9],
        [12, 13],
    ]
    g = Multigraph(15, np.array(edges))
    rep = classify_components(g, K=3)
    assert rep.n_components == 5
    assert rep.giant_size == 5
    assert not rep.connected
    assert rep.isolated_cycle_count == 1
    assert rep.max_isolated_tree_size == 2
    assert rep.other_count == 1
    assert sorted(rep.other_comps[0].tolist()) == [5, 6, 7, 8]


def test_lone_cycle_is_the_giant():
    # a connected graph has no non-giant components to classify
    g = Multigraph(3, np.array([[0, 1], [1, 2], [2, 0]]))
    rep = classify_components(g)
    assert rep.connected
    assert rep.giant_size == 3
    assert rep.cycle_comps == [] and rep.tree_comps == [] and rep.other_comps == []


def test_giant_tiebreak_is_first_vertex():
    # two components of equal size: the one containing vertex 0 wins
    g = Multigraph(6, np.array([[0, 1], [1, 2], [3, 4], [4, 5]]))
    rep = classify_components(g)
    assert rep.giant_size == 3
    assert rep.labels[0] == rep.giant_label


def test_trees_within_K():
    # giant = 4-cycle; the only leftover is a 3-vertex tree
    g = Multigraph(7, np.array([[0, 1], [1, 2], [2, 3], [3, 0], [4, 5], [5, 6]]))
    assert classify_components(g, K=3).all_trees_within_K
    assert not classify_components(g, K=2).all_trees_within_K
    assert classify_components(g).all_trees_within_K is None
    # a stray cycle or denser component spoils the property at any K
    g2 = Multigraph(8, np.array([[0, 1], [1, 2], [2, 3], [3, 0], [5, 6], [6, 7], [7, 5]]))
    assert not classify_components(g2, K=99).all_trees_within_K


def test_prufer_trees_have_many_low_degree_vertices():
    # every tree on k >= 2 vertices has more than k/2 vertices of degree <= 2;
    # random trees from Prufer strings exercise classify at the same time
    rng = np.random.default_rng(3)
    for _ in range(30):
        k = int(rng.integers(2, 40))
        if k == 2:
            edges = np.array([[0, 1]])
        else:
            prufer = rng.integers(0, k, size=k - 2)
            degree = np.ones(k, dtype=np.int64)
            for x in prufer:
                degree[x] += 1
            edges = []
            avail = degree.copy()
            for x in prufer:
                leaf = int(np.flatnonzero(avail == 1).min())
                edges.append([leaf, int(x)])
                avail[leaf] -= 1
                avail[x] -= 1
            last = np.flatnonzero(avail == 1)
            edges.append([int(last[0]), int(last[1])])
            edges = np.array(edges)
        g = Multigraph(k, edges)
        rep = classify_components(g)
        assert rep.connected
        assert rep.giant_size == k and g.m == k - 1
        assert int((g.degree <= 2).sum()) > k / 2


# ---------------------------------------------------------------------------
# full decomposition


def test_decompose_triangle_with_tail():
    dec = decompose(triangle_with_tail(), K=5)
    assert dec.two_core_size == 3
    assert dec.kernel_size == 0
    assert dec.longest_deg2_run == 2  # the core is a 3-cycle: run 3-1
    assert [sorted(c.tolist()) for c in dec.core_cycles] == [[0, 1, 2]]
    assert dec.max_bush_size == 3
    rep = dec.report()
    assert rep["n"] == 6
    assert rep["two_core_size"] == 3
    assert rep["giant_size"] == 5
    assert rep["connected"] is False
    assert rep["isolated_cycles"] == []
    assert rep["core_cycles"] == [[1, 2, 3]]  # 1-based lifted labels


def test_decompose_empty_graph():
    g = Multigraph(0, np.zeros((0, 2), dtype=np.int64))
    dec = decompose(g)
    assert dec.two_core_size == 0
    assert dec.report()["giant_size"] == 0


# ---------------------------------------------------------------------------
# hypothesis invariants

degree_lists = st.lists(st.integers(min_value=0, max_value=4), min_size=1, max_size=14)


@st.composite
def random_multigraph(draw):
    degs = draw(degree_lists)
    if sum(degs) % 2 == 1:
        degs[0] += 1
    seed = draw(st.integers(min_value=0, max_value=2**31))
    return project(sample_configuration(DegreeSequence(np.array(degs)), seed=seed))


@given(random_multigraph())
@settings(max_examples=120, deadline=None)
def test_core_minimum_degree(g):
    core = two_core(g)
    sub, labels = core.subgraph()
    if sub.n:
        assert int(sub.degree.min()) >= 2
    # peeled-off edges touch at least one peeled vertex
    acyclic = g.edges[~core.edge_mask]
    if acyclic.size:
        dead = ~core.alive
        assert np.all(dead[acyclic[:, 0]] | dead[acyclic[:, 1]])


@given(random_multigraph())
@settings(max_examples=120, deadline=None)
def test_bush_partition(g):
    core = two_core(g)
    out = bushes(g, core)
    roots = [b.root for b in out if b.root is not None]
    assert len(roots) == len(set(roots))
    non_root = []
    for b in out:
        non_root.extend(v for v in b.vertices.tolist() if v != b.root)
    # bushes minus their roots are exactly the peeled vertices
    assert sorted(non_root) == np.flatnonzero(~core.alive).tolist()
    for b in out:
        if b.root is not None:
            assert core.alive[b.root]


@given(random_multigraph())
@settings(max_examples=120, deadline=None)
def test_component_sizes_partition(g):
    rep = classify_components(g)
    assert int(rep.sizes.sum()) == g.n
    classified = len(rep.tree_comps) + len(rep.cycle_comps) + len(rep.other_comps)
    # every non-giant component lands in exactly one bucket
    assert classified == max(rep.n_components - 1, 0)
    covered = [v for c in rep.tree_comps + rep.cycle_comps + rep.other_comps for v in c]
    assert len(covered) + rep.giant_size == g.n

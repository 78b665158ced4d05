import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import lapdiag as ld
from lapdiag.graph import EdgeListError

import oracles


def test_load_two_edge_path():
    g = ld.load_edge_list(io.StringIO("0 1\n1 2\n"))
    assert g.n == 3 and g.m == 2
    assert g.degrees().tolist() == [1, 2, 1]


def test_load_dedup_counts():
    g = ld.load_edge_list(io.StringIO("0 1\n0 1\n1 0\n"))
    assert g.n == 2 and g.m == 1
    assert g.dropped_duplicates == 2


def test_load_self_loop_dropped():
    g = ld.load_edge_list(io.StringIO("0 1\n1 1\n"))
    assert g.m == 1 and g.dropped_self_loops == 1


def test_load_parse_error_line_number():
    with pytest.raises(EdgeListError) as err:
        ld.load_edge_list(io.StringIO("a b\n"))
    assert err.value.line == 1
    with pytest.raises(EdgeListError) as err:
        ld.load_edge_list(io.StringIO("0 1\nx 2\n"))
    assert err.value.line == 2


def test_load_nonpositive_weight_rejected():
    with pytest.raises(ValueError):
        ld.load_edge_list(io.StringIO("0 1 -2.0\n"), weighted=True)
    with pytest.raises(ValueError):
        ld.load_edge_list(io.StringIO("0 1 0\n"), weighted=True)


def test_load_empty_graph_rejected():
    with pytest.raises(ValueError):
        ld.load_edge_list(io.StringIO("% only a comment\n"))


def test_load_comments_and_label_compaction():
    g = ld.load_edge_list(io.StringIO("% konect header\n# other\n5 9\n9 3\n"))
    assert g.vertex_labels.tolist() == [5, 9, 3]
    assert g.n == 3 and g.m == 2


def test_load_weighted_third_column():
    g = ld.load_edge_list(io.StringIO("0 1 2.5\n1 2 0.5\n"), weighted=True)
    assert g.weighted
    assert sorted(g.edge_weights.tolist()) == [0.5, 2.5]


def test_csr_invariants_on_samples(k4, bowtie, weighted_triangle):
    for g in (k4, bowtie, weighted_triangle):
        g.validate()
        assert int(np.diff(g.offsets).sum()) == 2 * g.m


def test_round_trip_text(weighted_triangle):
    text = ld.to_edge_list_text(weighted_triangle)
    back = ld.load_edge_list(io.StringIO(text), weighted=True)
    assert np.array_equal(back.offsets, weighted_triangle.offsets)
    assert np.array_equal(back.neighbors, weighted_triangle.neighbors)
    assert np.allclose(back.weights, weighted_triangle.weights)


def test_binary_cache_round_trip(tmp_path, weighted_triangle, k4):
    for g in (weighted_triangle, k4):
        path = tmp_path / "g.bin"
        ld.save_csr_cache(g, path)
        back = ld.load_csr_cache(path)
        assert np.array_equal(back.offsets, g.offsets)
        assert np.array_equal(back.neighbors, g.neighbors)
        if g.weighted:
            assert np.allclose(back.weights, g.weights)
        else:
            assert back.weights is None
    with open(tmp_path / "bad.bin", "wb") as fh:
        fh.write(b"NOPE" + b"\0" * 32)
    with pytest.raises(ValueError):
        ld.load_csr_cache(tmp_path / "bad.bin")


def test_lcc_keeps_path_drops_isolated():
    g = ld.from_edges([(0, 1), (1, 2)], n=4)
    sub, mapping = ld.largest_connected_component(g)
    assert sub.n == 3 and sub.m == 2
    assert mapping.tolist() == [0, 1, 2, -1]


def test_lcc_tie_break_smallest_label():
    g = ld.from_edges([(0, 1), (2, 3)])
    sub, mapping = ld.largest_connected_component(g)
    assert sub.n == 2
    assert sub.vertex_labels.tolist() == [0, 1]


def test_lcc_connected_identity(k4):
    sub, mapping = ld.largest_connected_component(k4)
    assert sub.n == 4 and sub.m == 6
    assert mapping.tolist() == [0, 1, 2, 3]


def test_lcc_singleton_component():
    g = ld.from_edges([], n=3)
    sub, mapping = ld.largest_connected_component(g)
    assert sub.n == 1 and sub.m == 0
    assert (mapping >= 0).sum() == 1


def test_bfs_tree_examples(p3, k3, s3):
    t = ld.bfs_tree(p3, 0)
    assert t.depth.tolist() == [0, 1, 2] and t.ecc_root == 2
    t = ld.bfs_tree(k3, 0)
    assert t.depth.tolist() == [0, 1, 1] and t.ecc_root == 1
    assert ld.bfs_tree(s3, 3).ecc_root == 1
    assert ld.bfs_tree(s3, 0).ecc_root == 2


def test_bfs_root_out_of_range(p3):
    with pytest.raises(ValueError):
        ld.bfs_tree(p3, 5)


def test_bfs_depth_triangle_property():
    rng = np.random.default_rng(3)
    for _ in range(5):
        g = ld.generate_test_graph("erdos_renyi", 80, seed=int(rng.integers(1e9)), p=0.06)
        t = ld.bfs_tree(g, 0)
        for e in range(g.m):
            a, b = g.edge_array[e]
            assert abs(int(t.depth[a]) - int(t.depth[b])) <= 1


def test_bcc_path(p3):
    d = ld.biconnected_components(p3)
    assert len(d.components) == 2
    assert d.articulation_points.tolist() == [1]
    assert sorted(len(c.edge_ids) for c in d.components) == [1, 1]


def test_bcc_complete(k4):
    d = ld.biconnected_components(k4)
    assert len(d.components) == 1
    assert d.articulation_points.size == 0


def test_bcc_bowtie(bowtie):
    d = ld.biconnected_components(bowtie)
    assert len(d.components) == 2
    assert d.articulation_points.tolist() == [2]
    for comp in d.components:
        assert len(comp.edge_ids) == 3 and len(comp.vertices) == 3


def test_bcc_partitions_edges_and_matches_removal_oracle():
    rng = np.random.default_rng(11)
    for _ in range(6):
        n = int(rng.integers(8, 40))
        g = ld.generate_test_graph("erdos_renyi", n, seed=int(rng.integers(1e9)),
                                   p=min(1.0, 2.2 * np.log(n) / n))
        d = ld.biconnected_components(g)
        counts = np.zeros(g.m, dtype=int)
        for comp in d.components:
            counts[comp.edge_ids] += 1
        assert np.all(counts == 1)
        assert np.all(d.component_of_edge >= 0)
        # articulation oracle: removing v disconnects the remainder
        expected = []
        for v in range(g.n):
            keep = [e for e in range(g.m)
                    if v not in (g.edge_array[e, 0], g.edge_array[e, 1])]
            others = [u for u in range(g.n) if u != v]
            adj = {u: [] for u in others}
            for e in keep:
                a, b = map(int, g.edge_array[e])
                adj[a].append(b)
                adj[b].append(a)
            seen = {others[0]}
            stack = [others[0]]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            if len(seen) != len(others):
                expected.append(v)
        assert d.articulation_points.tolist() == expected


def test_bridges_are_singleton_components():
    # two triangles joined by a bridge
    g = ld.from_edges([(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)])
    d = ld.biconnected_components(g)
    sizes = sorted(len(c.edge_ids) for c in d.components)
    assert sizes == [1, 3, 3]


def test_block_cut_identity():
    # on connected graphs every component beyond the first is opened by an
    # articulation split: sum over articulation points of (#components
    # containing it - 1) equals #components - 1
    rng = np.random.default_rng(29)
    for _ in range(8):
        n = int(rng.integers(5, 50))
        g = ld.generate_test_graph("erdos_renyi", n, seed=int(rng.integers(1e9)),
                                   p=min(1.0, 1.5 * np.log(n) / n))
        d = ld.biconnected_components(g)
        splits = 0
        for v in d.articulation_points:
            containing = sum(1 for c in d.components if v in c.vertices)
            assert containing >= 2
            splits += containing - 1
        assert splits == len(d.components) - 1


def test_volume_examples(k3):
    assert ld.volume(k3) == 6.0
    p3w = ld.from_edges([(0, 1), (1, 2)], weights=[2.0, 3.0])
    assert ld.volume(p3w) == 10.0
    assert ld.volume(ld.from_edges([(0, 1)])) == 2.0


def test_generate_families():
    assert ld.generate_test_graph("complete", 4).m == 6
    assert ld.generate_test_graph("path", 3).m == 2
    assert ld.generate_test_graph("cycle", 5).m == 5
    assert ld.generate_test_graph("star", 4).degrees().tolist() == [3, 1, 1, 1]
    a = ld.generate_test_graph("erdos_renyi", 20, seed=1, p=0.5)
    b = ld.generate_test_graph("erdos_renyi", 20, seed=1, p=0.5)
    assert np.array_equal(a.neighbors, b.neighbors)
    ws = ld.generate_test_graph("watts_strogatz", 30, seed=2, k=4, beta=0.2)
    assert ld.is_connected(ws)


def test_generate_invalid_parameters():
    with pytest.raises(ValueError):
        ld.generate_test_graph("erdos_renyi", 10, seed=0, p=0.0)
    with pytest.raises(ValueError):
        ld.generate_test_graph("watts_strogatz", 10, seed=0, k=3, beta=0.1)
    with pytest.raises(ValueError):
        ld.generate_test_graph("path", 1)
    with pytest.raises(ValueError):
        ld.generate_test_graph("mystery", 5)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(2, 40))
def test_round_trip_random_graphs(seed, n):
    # reloading compacts ids by first appearance; the graphs must agree after
    # mapping back through vertex_labels
    g = ld.generate_test_graph("erdos_renyi", n, seed=seed, p=min(1.0, 3.0 / n + 0.2))
    assert int(np.diff(g.offsets).sum()) == 2 * g.m
    back = ld.load_edge_list(io.StringIO(ld.to_edge_list_text(g)))
    assert back.n == g.n and back.m == g.m
    relabeled = {tuple(sorted((int(back.vertex_labels[u]), int(back.vertex_labels[v]))))
                 for u, v in back.edge_array}
    original = {tuple(sorted(map(int, e))) for e in g.edge_array}
    assert relabeled == original

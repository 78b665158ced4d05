"""Spanning tree sampling via Wilson's loop-erased random walks.

Trees are drawn with probability proportional to the product of their edge
conductances (uniform on unweighted graphs). Every sample is a pure function of
(seed, stream), so concurrent sampling stays reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

_EMPTY_CUMW = np.zeros(1, dtype=np.float64)

# Streams for per-component sampling inside wilson_sample_bcc are derived as
# stream * _BCC_STREAM_STRIDE + component_index, so they never collide with
# each other; callers should keep their stream ids below 2**43.
_BCC_STREAM_STRIDE = 1 << 20


@dataclass(frozen=True)
class RngState:
    """Counter-seedable PCG32 stream: identical (seed, stream) => identical draws."""

    seed: int
    stream: int = 0


@dataclass
class SpanningTree:
    root: int
    parent: np.ndarray        # -1 at root
    parent_edge: np.ndarray   # undirected edge id of (parent[v], v), -1 at root
    first_child: np.ndarray
    next_sibling: np.ndarray
    log_weight: float         # sum of ln w(e) over tree edges, 0 for unweighted
    walk_steps: int = 0

    def edge_id_set(self):
        return self.parent_edge[self.parent_edge >= 0]


@dataclass
class DfsTimestamps:
    root: int
    alpha: np.ndarray   # discovery order, 0..n-1
    omega: np.ndarray   # finish order, 0..n-1


def _sampling_arrays(g):
    if g.weighted:
        return g.cumulative_weights(), True
    return _EMPTY_CUMW, False


def _tree_from_parent(g, root, par, arcs, steps):
    n = g.n
    parent_edge = np.where(arcs >= 0, g.edge_ids[np.maximum(arcs, 0)], -1).astype(np.int32)
    first_child = np.empty(n, dtype=np.int32)
    next_sibling = np.empty(n, dtype=np.int32)
    _link_children_py(par, root, first_child, next_sibling)
    log_weight = 0.0
    if g.edge_weights is not None:
        eids = parent_edge[parent_edge >= 0]
        log_weight = float(np.log(g.edge_weights[eids]).sum())
    return SpanningTree(root=root, parent=par, parent_edge=parent_edge,
                        first_child=first_child, next_sibling=next_sibling,
                        log_weight=log_weight, walk_steps=int(steps))


def _link_children_py(par, root, first_child, next_sibling):
    first_child[:] = -1
    next_sibling[:] = -1
    for v in range(len(par) - 1, -1, -1):
        if v != root:
            p = par[v]
            next_sibling[v] = first_child[p]
            first_child[p] = v


def wilson_sample(g, root, rng):
    """One spanning tree sample rooted at `root`.

    The walk leaves v through an edge chosen with probability w(v,.)/deg_w(v);
    tree vertices are attached in vertex-id order via loop-erased walks. The
    graph must be connected or the walk never terminates, so that is checked.
    """
    from .graph import is_connected

    if not 0 <= root < g.n:
        raise ValueError(f"root {root} out of range")
    if not is_connected(g):
        raise ValueError("graph is not connected")
    n = g.n
    cumw, use_w = _sampling_arrays(g)
    parents = np.empty((1, n), dtype=np.int32)
    arcs = np.empty((1, n), dtype=np.int32)
    in_tree = np.zeros(n, dtype=np.bool_)
    nxt = np.empty(n, dtype=np.int32)
    nxt_arc = np.empty(n, dtype=np.int32)
    steps = _kernels.wilson_chunk(g.offsets, g.neighbors, cumw, use_w, root,
                                  np.uint64(rng.seed), np.uint64(rng.stream), 1,
                                  parents, arcs, in_tree, nxt, nxt_arc)
    return _tree_from_parent(g, root, parents[0], arcs[0], steps)


def wilson_sample_bcc(g, decomposition, rng, root=0):
    """Sample a spanning tree by running Wilson inside each biconnected component.

    Component walks are rooted at a maximum-degree vertex of the component
    (smallest id on ties); the component trees are merged on the articulation
    vertices and re-oriented from `root`. The resulting distribution is the
    same as wilson_sample's because spanning trees factor across components.
    """
    n = g.n
    tree_edges = []          # (global u, global v, edge id)
    total_steps = 0
    for ci, comp in enumerate(decomposition.components):
        if len(comp.edge_ids) == 1:
            e = int(comp.edge_ids[0])
            u, v = g.edge_array[e]
            tree_edges.append((int(u), int(v), e))
            continue
        sub, local_root, arc_to_global = _component_subgraph(g, comp)
        sub_rng = RngState(rng.seed, rng.stream * _BCC_STREAM_STRIDE + ci)
        cumw, use_w = _sampling_arrays(sub)
        ns = sub.n
        parents = np.empty((1, ns), dtype=np.int32)
        arcs = np.empty((1, ns), dtype=np.int32)
        in_tree = np.zeros(ns, dtype=np.bool_)
        nxt = np.empty(ns, dtype=np.int32)
        nxt_arc = np.empty(ns, dtype=np.int32)
        total_steps += _kernels.wilson_chunk(
            sub.offsets, sub.neighbors, cumw, use_w, local_root,
            np.uint64(sub_rng.seed), np.uint64(sub_rng.stream), 1,
            parents, arcs, in_tree, nxt, nxt_arc)
        verts = comp.vertices
        for lv in range(ns):
            if lv == local_root:
                continue
            gu = int(verts[parents[0, lv]])
            gv = int(verts[lv])
            tree_edges.append((gu, gv, int(arc_to_global[arcs[0, lv]])))
    return _stitch_tree(g, tree_edges, root=root, steps=total_steps)


def _component_subgraph(g, comp):
    """Local CSR for one biconnected component plus the arc -> global edge map."""
    if getattr(comp, "_sub_cache", None) is not None:
        return comp._sub_cache
    verts = comp.vertices
    local = {int(v): i for i, v in enumerate(verts)}
    eu = g.edge_array[comp.edge_ids, 0]
    ev = g.edge_array[comp.edge_ids, 1]
    lu = np.array([local[int(u)] for u in eu], dtype=np.int64)
    lv = np.array([local[int(v)] for v in ev], dtype=np.int64)
    from .graph import _build_graph
    ew = g.edge_weights[comp.edge_ids] if g.edge_weights is not None else None
    sub = _build_graph(len(verts), lu, lv, ew, verts)
    # map each local arc back to the global undirected edge id
    sorted_comp = np.sort(comp.edge_ids)
    arc_to_global = sorted_comp[sub.edge_ids]
    # component root: maximal degree inside the component, smallest id on ties
    degs = sub.degrees()
    local_root = int(np.flatnonzero(degs == degs.max())[0])
    comp._sub_cache = (sub, local_root, arc_to_global)
    return comp._sub_cache


def _stitch_tree(g, tree_edges, root, steps):
    n = g.n
    if len(tree_edges) != n - 1:
        raise ValueError("component trees do not stitch into a spanning tree")
    # tree adjacency, then orient away from the requested root
    adj_off = np.zeros(n + 1, dtype=np.int64)
    for u, v, _ in tree_edges:
        adj_off[u + 1] += 1
        adj_off[v + 1] += 1
    adj_off = np.cumsum(adj_off)
    cursor = adj_off[:-1].copy()
    adj_v = np.empty(2 * (n - 1), dtype=np.int32)
    adj_e = np.empty(2 * (n - 1), dtype=np.int32)
    for u, v, e in tree_edges:
        adj_v[cursor[u]] = v
        adj_e[cursor[u]] = e
        cursor[u] += 1
        adj_v[cursor[v]] = u
        adj_e[cursor[v]] = e
        cursor[v] += 1
    par = np.full(n, -1, dtype=np.int32)
    pedge = np.full(n, -1, dtype=np.int32)
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    stack = [root]
    while stack:
        v = stack.pop()
        for k in range(adj_off[v], adj_off[v + 1]):
            w = adj_v[k]
            if not seen[w]:
                seen[w] = True
                par[w] = v
                pedge[w] = adj_e[k]
                stack.append(w)
    if not seen.all():
        raise ValueError("stitched edges do not span the graph")
    first_child = np.empty(n, dtype=np.int32)
    next_sibling = np.empty(n, dtype=np.int32)
    _link_children_py(par, root, first_child, next_sibling)
    log_weight = 0.0
    if g.edge_weights is not None:
        log_weight = float(np.log(g.edge_weights[pedge[pedge >= 0]]).sum())
    return SpanningTree(root=root, parent=par, parent_edge=pedge,
                        first_child=first_child, next_sibling=next_sibling,
                        log_weight=log_weight, walk_steps=int(steps))


def dfs_timestamps(tree):
    """Discovery/finish stamps; children are visited in child/sibling list order."""
    n = len(tree.parent)
    alpha = np.empty(n, dtype=np.int32)
    omega = np.empty(n, dtype=np.int32)
    cursor = np.empty(n, dtype=np.int32)
    stack = np.empty(n, dtype=np.int32)
    _kernels.dfs_stamps_kernel(tree.root, tree.first_child, tree.next_sibling,
                               cursor, stack, alpha, omega)
    return DfsTimestamps(root=tree.root, alpha=alpha, omega=omega)


def is_descendant(ts, v, b):
    """True when v lies in b's subtree; a vertex counts as its own descendant."""
    return bool(ts.alpha[b] <= ts.alpha[v] and ts.omega[v] <= ts.omega[b])


def is_proper_descendant(ts, v, b):
    return bool(ts.alpha[b] < ts.alpha[v] and ts.omega[v] < ts.omega[b])

"""Compiled hot loops: PCG32 streams, BFS, Wilson walks, DFS stamps, aggregation.

All kernels release the GIL so sampling blocks can run on a thread pool.
Randomness is drawn from PCG32 with one stream per sample index, which makes
every result independent of how samples are partitioned across threads.
"""

import numpy as np
from numba import njit

PCG_MULT = np.uint64(6364136223846793005)
_INV_2_32 = 1.0 / 4294967296.0


_MASK32 = np.uint64(0xFFFFFFFF)


@njit(cache=True, nogil=True, inline="always")
def _pcg32_next(state, inc):
    # 32-bit output carried in a uint64; numba widens scalar shifts, so the
    # rotate must mask back down explicitly
    old = state
    state = old * PCG_MULT + inc
    xs = (((old >> np.uint64(18)) ^ old) >> np.uint64(27)) & _MASK32
    rot = old >> np.uint64(59)
    out = ((xs >> rot) | (xs << ((np.uint64(32) - rot) & np.uint64(31)))) & _MASK32
    return state, out


@njit(cache=True, nogil=True, inline="always")
def _pcg32_init(seed, stream):
    # reference seeding: state=0, advance, add seed, advance
    inc = (stream << np.uint64(1)) | np.uint64(1)
    state = np.uint64(0) * PCG_MULT + inc
    state = state + seed
    state = state * PCG_MULT + inc
    return state, inc


@njit(cache=True, nogil=True)
def pcg32_sequence(seed, stream, out):
    """Fill `out` (uint32) with the stream's outputs; used by RNG tests."""
    state, inc = _pcg32_init(np.uint64(seed), np.uint64(stream))
    for i in range(out.size):
        state, x = _pcg32_next(state, inc)
        out[i] = np.uint32(x)


@njit(cache=True, nogil=True)
def bfs_kernel(offsets, neighbors, root, parent, depth):
    """CSR-order BFS. Returns (eccentricity of root, number of visited vertices)."""
    n = parent.size
    for i in range(n):
        parent[i] = -1
        depth[i] = -1
    queue = np.empty(n, dtype=np.int32)
    head = 0
    tail = 1
    queue[0] = root
    depth[root] = 0
    ecc = 0
    while head < tail:
        v = queue[head]
        head += 1
        dv = depth[v] + 1
        for k in range(offsets[v], offsets[v + 1]):
            w = neighbors[k]
            if depth[w] < 0:
                depth[w] = dv
                parent[w] = v
                if dv > ecc:
                    ecc = dv
                queue[tail] = w
                tail += 1
    return ecc, tail


@njit(cache=True, nogil=True, inline="always")
def _step(offsets, neighbors, cumw, use_weights, v, state, inc):
    """One random-walk step out of v; returns (state, arc index taken)."""
    lo = offsets[v]
    hi = offsets[v + 1]
    state, x = _pcg32_next(state, inc)
    if use_weights:
        # inverse-CDF over the prefix sums of this vertex's adjacency slice
        t = (np.float64(x) * _INV_2_32) * cumw[hi - 1]
        a = lo
        b = hi - 1
        while a < b:
            mid = (a + b) >> 1
            if cumw[mid] > t:
                b = mid
            else:
                a = mid + 1
        k = a
    else:
        d = np.uint64(hi - lo)
        k = lo + np.int64((x * d) >> np.uint64(32))
    return state, k


@njit(cache=True, nogil=True)
def wilson_chunk(offsets, neighbors, cumw, use_weights, root, seed, s0, count,
                 parents, arcs, in_tree, nxt, nxt_arc):
    """Sample `count` spanning trees (streams s0..s0+count-1) into row buffers.

    parents[c, v] is v's tree parent (-1 at root); arcs[c, v] the CSR arc index
    of the edge (parent, v) as traversed v -> parent. Returns total walk steps.
    """
    n = in_tree.size
    total_steps = 0
    for c in range(count):
        state, inc = _pcg32_init(np.uint64(seed), np.uint64(s0 + c))
        par = parents[c]
        arc = arcs[c]
        for v in range(n):
            in_tree[v] = False
        in_tree[root] = True
        par[root] = -1
        arc[root] = -1
        for v0 in range(n):
            if in_tree[v0]:
                continue
            v = v0
            while not in_tree[v]:
                state, k = _step(offsets, neighbors, cumw, use_weights, v, state, inc)
                nxt[v] = neighbors[k]
                nxt_arc[v] = np.int32(k)
                v = neighbors[k]
                total_steps += 1
            v = v0
            while not in_tree[v]:
                in_tree[v] = True
                par[v] = nxt[v]
                arc[v] = nxt_arc[v]
                v = nxt[v]
    return total_steps


@njit(cache=True, nogil=True, inline="always")
def _link_children(par, root, first_child, next_sibling):
    n = par.size
    for v in range(n):
        first_child[v] = -1
        next_sibling[v] = -1
    # reverse order so child lists come out in ascending vertex id
    for v in range(n - 1, -1, -1):
        if v != root:
            p = par[v]
            next_sibling[v] = first_child[p]
            first_child[p] = v


@njit(cache=True, nogil=True)
def dfs_stamps_kernel(root, first_child, next_sibling, cursor, stack, alpha, omega):
    """Iterative DFS; discovery times alpha and finish times omega, each 0..n-1."""
    ta = 0
    to = 0
    sp = 0
    stack[0] = root
    alpha[root] = 0
    ta = 1
    cursor[root] = first_child[root]
    while sp >= 0:
        v = stack[sp]
        ch = cursor[v]
        if ch != -1:
            cursor[v] = next_sibling[ch]
            alpha[ch] = ta
            ta += 1
            cursor[ch] = first_child[ch]
            sp += 1
            stack[sp] = ch
        else:
            omega[v] = to
            to += 1
            sp -= 1


@njit(cache=True, nogil=True)
def aggregate_chunk(parents, count, root, bfs_parent, first_child, next_sibling,
                    cursor, stack, alpha, omega, racc, contribs, inv_w):
    """Add each tree's signed path-crossing contribution into racc.

    For every v and every BFS-path edge (a, b) with b nearer v: +contrib/w(a,b)
    if the tree path root..v traverses a->b, -contrib/w(a,b) if it traverses
    b->a (the potential drop over an edge is its current over its conductance).
    inv_w[b] holds 1/w(parent_bfs(b), b); all-ones when unweighted.
    """
    n = alpha.size
    for c in range(count):
        par = parents[c]
        _link_children(par, root, first_child, next_sibling)
        dfs_stamps_kernel(root, first_child, next_sibling, cursor, stack, alpha, omega)
        contrib = contribs[c]
        for v in range(n):
            if v == root:
                continue
            av = alpha[v]
            ov = omega[v]
            b = v
            while b != root:
                a = bfs_parent[b]
                if par[b] == a:
                    # v in b's subtree (b itself included) => path crosses a->b
                    if alpha[b] <= av and ov <= omega[b]:
                        racc[v] += contrib * inv_w[b]
                elif par[a] == b:
                    if alpha[a] <= av and ov <= omega[a]:
                        racc[v] -= contrib * inv_w[b]
                b = a


@njit(cache=True, nogil=True)
def edge_count_block(offsets, neighbors, cumw, use_weights, edge_ids, root,
                     seed, s0, s1, counts, in_tree, nxt, nxt_arc, par):
    """Sample streams s0..s1-1 and count per-edge tree membership into counts."""
    n = in_tree.size
    for s in range(s0, s1):
        state, inc = _pcg32_init(np.uint64(seed), np.uint64(s))
        for v in range(n):
            in_tree[v] = False
        in_tree[root] = True
        for v0 in range(n):
            if in_tree[v0]:
                continue
            v = v0
            while not in_tree[v]:
                state, k = _step(offsets, neighbors, cumw, use_weights, v, state, inc)
                nxt[v] = neighbors[k]
                nxt_arc[v] = np.int32(k)
                v = neighbors[k]
            v = v0
            while not in_tree[v]:
                in_tree[v] = True
                par[v] = nxt[v]
                counts[edge_ids[nxt_arc[v]]] += 1
                v = nxt[v]


_EMPTY_CUMW = np.zeros(1, dtype=np.float64)


def warmup():
    """Trigger compilation of every kernel on a two-edge path."""
    offsets = np.array([0, 1, 3, 4], dtype=np.int64)
    neighbors = np.array([1, 0, 2, 1], dtype=np.int32)
    edge_ids = np.array([0, 0, 1, 1], dtype=np.int32)
    cumw = np.cumsum(np.ones(4)) - np.array([0, 1, 1, 3], dtype=np.float64)
    n = 3
    parent = np.empty(n, dtype=np.int32)
    depth = np.empty(n, dtype=np.int32)
    bfs_kernel(offsets, neighbors, 0, parent, depth)
    out = np.empty(4, dtype=np.uint32)
    pcg32_sequence(7, 0, out)
    parents = np.empty((1, n), dtype=np.int32)
    arcs = np.empty((1, n), dtype=np.int32)
    in_tree = np.zeros(n, dtype=np.bool_)
    nxt = np.empty(n, dtype=np.int32)
    nxt_arc = np.empty(n, dtype=np.int32)
    for use_w, cw in ((False, _EMPTY_CUMW), (True, cumw)):
        wilson_chunk(offsets, neighbors, cw, use_w, 0, 1, 0, 1,
                     parents, arcs, in_tree, nxt, nxt_arc)
    scratch = [np.empty(n, dtype=np.int32) for _ in range(6)]
    first_child, next_sibling, cursor, stack, alpha, omega = scratch
    for racc, contribs, inv_w in (
        (np.zeros(n, dtype=np.int64), np.ones(1, dtype=np.int64),
         np.ones(n, dtype=np.int64)),
        (np.zeros(n, dtype=np.float64), np.ones(1, dtype=np.float64),
         np.ones(n, dtype=np.float64)),
    ):
        aggregate_chunk(parents, 1, 0, parent, first_child, next_sibling,
                        cursor, stack, alpha, omega, racc, contribs, inv_w)
    counts = np.zeros(2, dtype=np.int64)
    edge_count_block(offsets, neighbors, _EMPTY_CUMW, False, edge_ids, 0,
                     1, 0, 2, counts, in_tree, nxt, nxt_arc, parent)
    edge_count_block(offsets, neighbors, cumw, True, edge_ids, 0,
                     1, 0, 2, counts, in_tree, nxt, nxt_arc, parent)

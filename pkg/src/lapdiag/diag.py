"""Diagonal approximation pipeline: sample counts, tree aggregation, assembly.

The estimate for vertex v is R[v]/samples - x[u] + 2 x[v], where R accumulates
signed BFS-path crossings over sampled spanning trees rooted at the pivot u and
x is the pseudoinverse column of u from a single Laplacian solve.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graph import bfs_tree, is_connected
from .pivot import select_pivot
from .solver import (SolverConvergenceError, dense_pseudoinverse,
                     solve_pivot_column)
from .ust import _sampling_arrays

# The pivot solve never runs looser than this: eta alone can be coarse on tiny
# graphs where sampling adds no error at all, and a tighter solve only
# strengthens the guarantee.
SOLVER_TOL_CAP = 1e-10

_CHUNK = 64
_MAX_CHUNK_ROWS = 1024  # caps the partial-sum matrix at 1024 x n

AGGREGATION_MODES = ("frequency", "paper-weighted")


@dataclass
class ApproxParams:
    eps: float = 0.3
    delta: float | None = None      # None -> 1/n at run time
    kappa: float = 0.3
    seed: int = 1
    threads: int | None = None      # None -> hardware parallelism
    diam_bound: int | None = None   # None -> 2 * ecc(pivot)
    pivot: int | None = None        # None -> double-sweep selection
    aggregation: str = "frequency"
    cg_tol_override: float | None = None

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.delta is not None and not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not 0 < self.kappa < 1:
            raise ValueError("kappa must lie in (0, 1)")
        if self.aggregation not in AGGREGATION_MODES:
            raise ValueError(f"aggregation must be one of {AGGREGATION_MODES}")


@dataclass
class ResistanceAccumulator:
    """Signed path-crossing sums per vertex plus the normalization mass."""

    R: np.ndarray
    samples: float
    pivot: int

    @classmethod
    def zeros(cls, n, pivot):
        return cls(R=np.zeros(n, dtype=np.float64), samples=0.0, pivot=pivot)

    def estimate(self):
        out = self.R / self.samples
        out[self.pivot] = 0.0
        return out


@dataclass
class DiagEstimate:
    diag: np.ndarray
    pivot: int
    tau: int
    eps: float
    delta: float
    kappa: float
    seed: int
    ecc_pivot: int
    eta: float
    threads: int
    aggregation: str = "frequency"
    walk_steps: int = 0
    solver_iterations: int = 0
    solver_residual: float = 0.0
    timings: dict = field(default_factory=dict)

    @property
    def trace(self):
        return float(self.diag.sum())


def compute_tau(ecc_u, m, delta, eps, kappa):
    """Sample count ecc(u)^2 * ceil(ln(2m/delta) / (2 (1-kappa)^2 eps^2))."""
    if ecc_u < 1 or m < 1:
        raise ValueError("ecc_u and m must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if eps <= 0 or not 0 < kappa < 1:
        raise ValueError("eps must be positive and kappa in (0, 1)")
    inner = math.ceil(math.log(2.0 * m / delta) / (2.0 * (1.0 - kappa) ** 2 * eps ** 2))
    tau = float(ecc_u) ** 2 * inner
    if tau > 2**62:
        raise ValueError(f"required sample count {tau:.3e} is not representable")
    return int(ecc_u) ** 2 * int(inner)


def compute_eta(eps, kappa, n, m, diam_bound):
    """Solver tolerance kappa*eps / (3 sqrt(m n ln n) * diam_bound)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if diam_bound < 1:
        raise ValueError("diam_bound must be >= 1")
    return kappa * eps / (3.0 * math.sqrt(m * n * math.log(n)) * diam_bound)


def aggregate(tree_ts, tree_parent, bfs, acc, contribution=1.0):
    """Add one tree's signed contribution to the accumulator (library surface).

    For each v != root and each BFS-path edge (a, b) with b closer to v:
    +contribution/w(a,b) when the tree path crosses a->b above v, minus that
    when it crosses b->a. On unweighted graphs the edge factor is 1.
    """
    if tree_ts.root != bfs.root:
        raise ValueError("tree and BFS tree have different roots")
    n = len(tree_parent)
    parents = np.ascontiguousarray(tree_parent, dtype=np.int32).reshape(1, n)
    scratch = [np.empty(n, dtype=np.int32) for _ in range(6)]
    first_child, next_sibling, cursor, stack, alpha, omega = scratch
    contribs = np.full(1, contribution, dtype=np.float64)
    if bfs.parent_edge_weight is not None:
        inv_w = 1.0 / bfs.parent_edge_weight
        inv_w[bfs.root] = 1.0
    else:
        inv_w = np.ones(n, dtype=np.float64)
    # the kernel recomputes the stamps from the parent array; the descendant
    # relation does not depend on sibling order, so this matches tree_ts
    _kernels.aggregate_chunk(parents, 1, bfs.root, bfs.parent, first_child,
                             next_sibling, cursor, stack, alpha, omega,
                             acc.R, contribs, inv_w)
    acc.samples += contribution
    return acc


def _resolve_threads(threads):
    if threads is not None and threads >= 1:
        return int(threads)
    return os.cpu_count() or 1


def _sample_and_accumulate(g, root, bfs, tau, seed, threads, mode):
    """Parallel sampling loop. Returns (R float64, mass, steps, t_sample, t_agg).

    Sample index = RNG stream. Workers own whole chunks of _CHUNK consecutive
    samples and write each chunk's partial sums into a slot indexed by chunk
    position; the final reduction runs over that fixed layout. Chunk
    boundaries do not move with the thread count, so even the float
    accumulations of the weighted modes are bitwise thread-invariant.
    """
    n = g.n
    cumw, use_w = _sampling_arrays(g)
    paper_weighted = mode == "paper-weighted" and g.weighted
    ln_w_arc = np.log(g.arc_weights()) if paper_weighted else None
    # deterministic reference keeps exp() in range; any fixed value would do
    ref_logw = float((n - 1) * ln_w_arc.mean()) if paper_weighted else 0.0
    if g.weighted:
        inv_w = 1.0 / bfs.parent_edge_weight
        inv_w[bfs.root] = 1.0
        acc_dtype = np.float64
    else:
        inv_w = np.ones(n, dtype=np.int64)
        acc_dtype = np.int64

    # chunk size depends only on tau, never on the thread count
    chunk = max(_CHUNK, -(-tau // _MAX_CHUNK_ROWS))
    num_chunks = (tau + chunk - 1) // chunk
    chunk_partials = np.zeros((num_chunks, n), dtype=acc_dtype)
    chunk_masses = np.zeros(num_chunks, dtype=np.float64)
    bounds = np.linspace(0, num_chunks, threads + 1).astype(np.int64)

    def worker(block_id):
        parents = np.empty((chunk, n), dtype=np.int32)
        arcs = np.empty((chunk, n), dtype=np.int32)
        in_tree = np.zeros(n, dtype=np.bool_)
        nxt = np.empty(n, dtype=np.int32)
        nxt_arc = np.empty(n, dtype=np.int32)
        first_child = np.empty(n, dtype=np.int32)
        next_sibling = np.empty(n, dtype=np.int32)
        cursor = np.empty(n, dtype=np.int32)
        stack = np.empty(n, dtype=np.int32)
        alpha = np.empty(n, dtype=np.int32)
        omega = np.empty(n, dtype=np.int32)
        ones = np.ones(chunk, dtype=acc_dtype)
        steps = 0
        t_sample = 0.0
        t_agg = 0.0
        for ci in range(int(bounds[block_id]), int(bounds[block_id + 1])):
            s = ci * chunk
            count = min(chunk, tau - s)
            t0 = time.perf_counter()
            steps += _kernels.wilson_chunk(g.offsets, g.neighbors, cumw, use_w,
                                           root, np.uint64(seed), np.uint64(s),
                                           count, parents, arcs, in_tree, nxt, nxt_arc)
            t1 = time.perf_counter()
            if paper_weighted:
                rows = ln_w_arc[np.maximum(arcs[:count], 0)]
                rows[:, root] = 0.0
                contribs = np.exp(rows.sum(axis=1) - ref_logw)
                chunk_masses[ci] = float(contribs.sum())
            else:
                contribs = ones[:count]
                chunk_masses[ci] = count
            _kernels.aggregate_chunk(parents, count, root, bfs.parent,
                                     first_child, next_sibling, cursor, stack,
                                     alpha, omega, chunk_partials[ci], contribs,
                                     inv_w)
            t2 = time.perf_counter()
            t_sample += t1 - t0
            t_agg += t2 - t1
        return steps, t_sample, t_agg

    if threads == 1:
        results = [worker(0)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(worker, range(threads)))

    racc_total = chunk_partials.sum(axis=0, dtype=np.float64)
    mass = float(chunk_masses.sum())
    steps = sum(r[0] for r in results)
    t_sample = max(r[1] for r in results)
    t_agg = max(r[2] for r in results)
    return racc_total, mass, steps, t_sample, t_agg


def _approx_diag_impl(g, params, weighted):
    if g.n < 2:
        raise ValueError("graph must have at least two vertices")
    if not is_connected(g):
        raise ValueError("graph is not connected")
    timings = {}

    t0 = time.perf_counter()
    if params.pivot is not None:
        if not 0 <= params.pivot < g.n:
            raise ValueError(f"pivot {params.pivot} out of range")
        u = int(params.pivot)
    else:
        u = select_pivot(g, iterations=10, seed=params.seed).vertex
    timings["pivot"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    bfs = bfs_tree(g, u)
    timings["bfs"] = time.perf_counter() - t0

    n, m = g.n, g.m
    delta = params.delta if params.delta is not None else 1.0 / n
    ecc_u = bfs.ecc_root
    tau = compute_tau(ecc_u, m, delta, params.eps, params.kappa)
    diam_bound = params.diam_bound if params.diam_bound is not None else 2 * ecc_u
    eta = compute_eta(params.eps, params.kappa, n, m, diam_bound)

    threads = _resolve_threads(params.threads)
    mode = params.aggregation if weighted else "frequency"
    racc, mass, walk_steps, t_sample, t_agg = _sample_and_accumulate(
        g, u, bfs, tau, params.seed, threads, mode)
    timings["sampling"] = t_sample
    timings["aggregation"] = t_agg

    t0 = time.perf_counter()
    tol = min(eta, SOLVER_TOL_CAP) if params.cg_tol_override is None \
        else params.cg_tol_override
    solve = solve_pivot_column(g, u, tol)
    timings["solve"] = time.perf_counter() - t0
    if not solve.converged:
        raise SolverConvergenceError(
            f"pivot-column solve stalled at residual {solve.residual:.3e} "
            f"(target {tol:.3e}, pivot {u}, tau {tau})", result=solve)
    x = solve.x

    t0 = time.perf_counter()
    diag = racc / mass - x[u] + 2.0 * x
    diag[u] = x[u]
    timings["assembly"] = time.perf_counter() - t0

    return DiagEstimate(diag=diag, pivot=u, tau=tau, eps=params.eps, delta=delta,
                        kappa=params.kappa, seed=params.seed, ecc_pivot=ecc_u,
                        eta=eta, threads=threads, aggregation=mode,
                        walk_steps=walk_steps, solver_iterations=solve.iterations,
                        solver_residual=solve.residual, timings=timings)


def approx_diag(g, params=None):
    """Estimate diag of pinv(L) for an unweighted graph (Algorithm: tau tree
    samples aggregated over BFS paths plus one pivot-column solve)."""
    params = params or ApproxParams()
    if g.weighted:
        raise ValueError("approx_diag expects an unweighted graph; "
                         "use approx_diag_weighted")
    return _approx_diag_impl(g, params, weighted=False)


def approx_diag_weighted(g, params=None):
    """Weighted variant: walk transitions follow conductances.

    Default aggregation averages tree frequencies (the sampler already draws
    trees proportionally to their weight); `aggregation="paper-weighted"`
    additionally multiplies each tree's contribution by its relative weight for
    comparison.
    """
    params = params or ApproxParams()
    if not g.weighted:
        raise ValueError("approx_diag_weighted expects per-edge weights")
    if np.any(g.weights <= 0):
        raise ValueError("weights must be strictly positive")
    return _approx_diag_impl(g, params, weighted=True)


def exact_diag_estimate(g, limit=None):
    """Wrap the dense oracle in a DiagEstimate, for exact centrality scores."""
    pinv = dense_pseudoinverse(g, limit=limit)
    return DiagEstimate(diag=pinv.diag.copy(), pivot=-1, tau=0, eps=0.0,
                        delta=0.0, kappa=0.0, seed=0, ecc_pivot=0, eta=0.0,
                        threads=1, aggregation="exact")

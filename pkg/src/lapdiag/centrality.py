"""Electrical centrality measures derived from the pseudoinverse diagonal and
from spanning-tree edge statistics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graph import is_connected
from .pivot import select_pivot
from .solver import (SolverConfig, SolverConvergenceError, cg_solve,
                     dense_pseudoinverse)
from .ust import _sampling_arrays


@dataclass
class Scores:
    values: np.ndarray
    kind: str
    provenance: dict = field(default_factory=dict)


def electrical_farness(estimate):
    """f(v) = n * diag[v] + trace: the sum of effective resistances from v."""
    diag = estimate.diag
    n = len(diag)
    values = n * diag + estimate.trace
    return Scores(values=values, kind="electrical_farness",
                  provenance={"pivot": estimate.pivot, "tau": estimate.tau})


def electrical_closeness(estimate):
    """(n - 1) / farness."""
    farness = electrical_farness(estimate)
    n = len(estimate.diag)
    return Scores(values=(n - 1) / farness.values, kind="electrical_closeness",
                  provenance=farness.provenance)


def nrwb(estimate):
    """Normalized random-walk betweenness 1/n + trace / ((n-1) * farness)."""
    diag = estimate.diag
    n = len(diag)
    if n < 2:
        raise ValueError("nrwb needs n >= 2")
    farness = n * diag + estimate.trace
    values = 1.0 / n + estimate.trace / ((n - 1) * farness)
    return Scores(values=values, kind="nrwb",
                  provenance={"pivot": estimate.pivot, "tau": estimate.tau})


def kirchhoff_index(estimate):
    """n * trace, the sum of effective resistances over all vertex pairs."""
    return len(estimate.diag) * estimate.trace


def spanning_edge_resistance(g, eps=0.1, delta=None, seed=1, threads=1):
    """Per-edge effective resistance from tree-inclusion frequencies.

    Samples q = ceil(2 eps^-2 ln(2m/delta)) trees; Pr[e in T] = w(e) r(e), so
    the inclusion frequency divided by w(e) estimates r(e) within +-eps with
    probability 1 - delta.
    """
    if not is_connected(g):
        raise ValueError("graph is not connected")
    m = g.m
    delta = 1.0 / g.n if delta is None else delta
    q = math.ceil(2.0 * math.log(2.0 * m / delta) / eps**2)
    counts = _count_tree_edges(g, q, seed, threads)
    values = counts / q
    if g.edge_weights is not None:
        values = values / g.edge_weights
    return Scores(values=values, kind="spanning_edge_resistance",
                  provenance={"q": q, "eps": eps, "delta": delta, "seed": seed})


def _count_tree_edges(g, q, seed, threads=1):
    """Edge-inclusion counts over q Wilson samples (streams 0..q-1)."""
    from concurrent.futures import ThreadPoolExecutor

    n = g.n
    root = select_pivot(g, iterations=10, seed=seed).vertex
    cumw, use_w = _sampling_arrays(g)
    threads = max(1, int(threads))
    bounds = np.linspace(0, q, threads + 1).astype(np.int64)

    def worker(b):
        counts = np.zeros(g.m, dtype=np.int64)
        in_tree = np.zeros(n, dtype=np.bool_)
        nxt = np.empty(n, dtype=np.int32)
        nxt_arc = np.empty(n, dtype=np.int32)
        par = np.empty(n, dtype=np.int32)
        _kernels.edge_count_block(g.offsets, g.neighbors, cumw, use_w, g.edge_ids,
                                  root, np.uint64(seed), int(bounds[b]),
                                  int(bounds[b + 1]), counts, in_tree, nxt,
                                  nxt_arc, par)
        return counts

    if threads == 1:
        blocks = [worker(0)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(worker, range(threads)))
    total = np.zeros(g.m, dtype=np.int64)
    for c in blocks:
        total += c
    return total


def kirchhoff_edge_centrality(g, theta, eps=0.3, delta=None, num_hutchinson=None,
                              seed=1, oracle_mode=False, threads=1):
    """Kirchhoff-index change when an edge is down-weighted to theta * w(e).

    Sherman-Morrison form: n (1-theta) w(e) ||pinv(L) b_e||^2 over
    1 - (1-theta) w(e) r(e). The numerator trace is estimated with centered
    +-1 probe vectors solved through CG; oracle_mode routes both parts through
    the dense pseudoinverse instead.
    """
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    n, m = g.n, g.m
    w_e = g.edge_weights if g.edge_weights is not None else np.ones(m)
    eu = g.edge_array[:, 0].astype(np.int64)
    ev = g.edge_array[:, 1].astype(np.int64)

    if oracle_mode:
        pinv = dense_pseudoinverse(g)
        cols = pinv.matrix
        numer = ((cols[:, eu] - cols[:, ev]) ** 2).sum(axis=0)
        r_hat = cols[eu, eu] - 2 * cols[eu, ev] + cols[ev, ev]
        prov = {"mode": "oracle", "theta": theta}
    else:
        scores = spanning_edge_resistance(g, eps=eps, delta=delta, seed=seed,
                                          threads=threads)
        r_hat = scores.values
        k = num_hutchinson if num_hutchinson is not None \
            else math.ceil(math.log(n) / eps**2)
        rng = np.random.Generator(np.random.PCG64(seed))
        cfg = SolverConfig(tolerance=eps / 10.0)
        numer = np.zeros(m)
        for _ in range(k):
            z = rng.integers(0, 2, size=n).astype(np.float64) * 2.0 - 1.0
            z -= z.mean()
            res = cg_solve(g, z, cfg)
            if not res.converged:
                raise SolverConvergenceError("probe solve did not converge",
                                             result=res)
            y = res.x
            numer += (y[eu] - y[ev]) ** 2
        numer /= k
        prov = {"mode": "sampling", "theta": theta, "eps": eps, "seed": seed,
                "num_hutchinson": k, "q": scores.provenance["q"]}

    denom = 1.0 - (1.0 - theta) * w_e * r_hat
    floor = theta / 2.0
    clipped = denom < floor
    if clipped.any():
        warnings.warn(f"{int(clipped.sum())} edge denominators below theta/2; "
                      "clamped (sampling noise)", stacklevel=2)
        denom = np.maximum(denom, floor)
    values = n * (1.0 - theta) * w_e * numer / denom
    return Scores(values=values, kind="kirchhoff_edge", provenance=prov)

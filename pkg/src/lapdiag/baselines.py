"""Stochastic diagonal estimators used as reference baselines: random probe
vectors and Hadamard-row probing, both driven by CG solves."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import hadamard

from .solver import SolverConfig, SolverConvergenceError, cg_solve


@dataclass
class BaselineConfig:
    method: str = "random"          # "random" or "hadamard"
    num_vectors: int = 100
    solver_tol: float = 1e-6
    seed: int = 1

    def __post_init__(self):
        if self.method not in ("random", "hadamard"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.num_vectors < 1:
            raise ValueError("num_vectors must be >= 1")
        if self.method == "hadamard" and self.num_vectors % 4 != 0:
            raise ValueError("hadamard probing needs num_vectors to be a multiple of 4")


def _probe_vectors(n, config):
    if config.method == "random":
        rng = np.random.Generator(np.random.PCG64(config.seed))
        for _ in range(config.num_vectors):
            yield rng.integers(0, 2, size=n).astype(np.float64) * 2.0 - 1.0
    else:
        order = 1 << max(n - 1, config.num_vectors - 1).bit_length()
        rows = hadamard(order).astype(np.float64)
        for k in range(config.num_vectors):
            yield rows[k, :n].copy()


def bekas_diag(g, config):
    """diag estimate (sum_k z_k * y_k) / (sum_k z_k * z_k) with y_k = pinv(L) z_k.

    The probe z_k enters the products as drawn; only the solver right-hand side
    is centered to mean zero (pinv(L) annihilates the all-ones direction, and CG
    needs a consistent system). Hadamard mode is deterministic; with a full row
    set it reproduces the diagonal up to solver error.
    """
    n = g.n
    cfg = SolverConfig(tolerance=config.solver_tol)
    numer = np.zeros(n)
    denom = np.zeros(n)
    for z in _probe_vectors(n, config):
        rhs = z - z.mean()
        res = cg_solve(g, rhs, cfg)
        if not res.converged:
            raise SolverConvergenceError(
                f"baseline solve stalled at residual {res.residual:.3e}", result=res)
        numer += z * res.x
        denom += z * z
    zero = denom == 0.0
    if zero.any():
        warnings.warn(f"{int(zero.sum())} entries had zero probe mass; set to 0",
                      stacklevel=2)
    out = np.zeros(n)
    np.divide(numer, denom, out=out, where=~zero)
    return out


def default_sweep_counts(method):
    """Conventional probe-count sweeps for benchmark grids."""
    return {"random": (50, 100, 200), "hadamard": (64, 128, 256)}[method]

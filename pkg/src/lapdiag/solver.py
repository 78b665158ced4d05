"""Laplacian matvec, Jacobi-preconditioned CG on the mean-zero subspace,
and a dense pseudoinverse oracle for small graphs."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .graph import is_connected

DEFAULT_ORACLE_LIMIT = 4000
ORACLE_LIMIT_ENV = "LAPDIAG_ORACLE_LIMIT"


class SolverConvergenceError(RuntimeError):
    """CG failed to reach the requested tolerance; carries the partial result."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass
class SolverConfig:
    tolerance: float
    max_iterations: int | None = None   # defaults to 20 * n
    preconditioner: str = "jacobi"      # "jacobi" or "none"

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.preconditioner not in ("jacobi", "none"):
            raise ValueError(f"unknown preconditioner {self.preconditioner!r}")


@dataclass
class SolveResult:
    x: np.ndarray
    iterations: int
    residual: float     # relative 2-norm of b - Lx
    converged: bool


def laplacian_matvec(g, x):
    """y = L x with L = D - A on the conductance-weighted graph."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise ValueError(f"vector has shape {x.shape}, expected ({g.n},)")
    return g.weighted_degrees() * x - g.adjacency_matrix() @ x


def cg_solve(g, b, config):
    """Conjugate gradient for L x = b restricted to vectors orthogonal to 1.

    The right-hand side must sum to zero (the singular system is consistent
    only there). Iterates are re-projected to mean zero every step, so the
    returned solution is the unique representative orthogonal to the all-ones
    kernel. Deterministic.
    """
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (g.n,):
        raise ValueError(f"rhs has shape {b.shape}, expected ({g.n},)")
    bnorm = float(np.linalg.norm(b))
    if abs(b.sum()) > 1e-9 * max(bnorm, 1e-300):
        raise ValueError("rhs is not orthogonal to the all-ones vector")
    n = g.n
    if bnorm == 0.0:
        return SolveResult(x=np.zeros(n), iterations=0, residual=0.0, converged=True)

    degw = g.weighted_degrees()
    adj = g.adjacency_matrix()
    minv = 1.0 / degw if config.preconditioner == "jacobi" else np.ones(n)
    max_iter = config.max_iterations if config.max_iterations is not None else 20 * n
    tol = config.tolerance

    x = np.zeros(n)
    r = b.copy()
    z = minv * r
    p = z.copy()
    rz = float(r @ z)
    iterations = 0
    while iterations < max_iter:
        q = degw * p - adj @ p
        pq = float(p @ q)
        if pq <= 0.0:
            break
        alpha = rz / pq
        x += alpha * p
        x -= x.mean()
        r -= alpha * q
        iterations += 1
        if np.linalg.norm(r) <= tol * bnorm:
            # guard against accumulated drift before declaring victory
            r = b - (degw * x - adj @ x)
            if np.linalg.norm(r) <= tol * bnorm:
                break
        z = minv * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new

    x -= x.mean()
    residual = float(np.linalg.norm(b - (degw * x - adj @ x)) / bnorm)
    return SolveResult(x=x, iterations=iterations, residual=residual,
                       converged=residual <= tol)


def solve_pivot_column(g, u, eta):
    """Solve L x = e_u - 1/n for the mean-zero x, i.e. the u-th pseudoinverse column."""
    if not 0 <= u < g.n:
        raise ValueError(f"pivot {u} out of range")
    if eta <= 0:
        raise ValueError("eta must be positive")
    b = np.full(g.n, -1.0 / g.n)
    b[u] += 1.0
    return cg_solve(g, b, SolverConfig(tolerance=eta))


def oracle_limit():
    value = os.environ.get(ORACLE_LIMIT_ENV)
    return int(value) if value else DEFAULT_ORACLE_LIMIT


@dataclass
class DensePseudoinverse:
    """Exact pseudoinverse of the Laplacian, for oracle checks on small graphs."""

    matrix: np.ndarray

    @property
    def diag(self):
        return np.ascontiguousarray(np.diagonal(self.matrix))

    @property
    def trace(self):
        return float(np.trace(self.matrix))

    def entry(self, i, j):
        return float(self.matrix[i, j])

    def column(self, u):
        return self.matrix[:, u].copy()

    def resistance(self, u, v):
        m = self.matrix
        return float(m[u, u] - 2.0 * m[u, v] + m[v, v])


def dense_laplacian(g):
    lap = np.zeros((g.n, g.n))
    src = np.repeat(np.arange(g.n), np.diff(g.offsets))
    lap[src, g.neighbors] = -g.arc_weights()
    np.fill_diagonal(lap, g.weighted_degrees())
    return lap


def dense_pseudoinverse(g, limit=None):
    """pinv(L) = (L + J/n)^{-1} - J/n via a symmetric positive-definite factorization."""
    limit = oracle_limit() if limit is None else limit
    if g.n > limit:
        raise ValueError(f"n={g.n} exceeds dense oracle limit {limit}")
    if not is_connected(g):
        raise ValueError("dense pseudoinverse oracle requires a connected graph")
    shifted = dense_laplacian(g)
    shifted += 1.0 / g.n
    cho = scipy.linalg.cho_factor(shifted, overwrite_a=True)
    inv = scipy.linalg.cho_solve(cho, np.eye(g.n), overwrite_b=True)
    inv -= 1.0 / g.n
    return DensePseudoinverse(matrix=inv)


def dense_pinv_diag(g, limit=None):
    """(diag, trace, full handle) of the exact pseudoinverse."""
    pinv = dense_pseudoinverse(g, limit=limit)
    return pinv.diag, pinv.trace, pinv

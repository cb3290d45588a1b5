"""Forward eigenvector centrality via power iteration on ``A_w^T``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import DiGraph, is_strongly_connected


class NotStronglyConnectedError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float, iterations: int) -> None:
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class CentralityResult:
    rho: float
    c: np.ndarray
    iterations: int
    residual: float
    shifted: bool = False

    def to_record(self) -> dict:
        return {
            "rho": float(self.rho),
            "c": [float(x) for x in self.c],
            "iterations": int(self.iterations),
            "residual": float(self.residual),
        }


def transpose_operator(g: DiGraph, weights: Sequence[float] | None = None) -> sp.csr_matrix:
    """CSR form of ``A_w^T``: row ``j`` holds the in-arcs of ``j``, tails ascending."""
    w = g.weights if weights is None else np.asarray(weights, dtype=float)
    rows = [h - 1 for _, h in g.arcs]
    cols = [t - 1 for t, _ in g.arcs]
    M = sp.csr_matrix((w, (rows, cols)), shape=(g.n, g.n))
    M.sort_indices()
    return M


def _residual(M, c: np.ndarray) -> tuple[float, float]:
    y = M @ c
    rho = y.sum() / c.sum()
    return rho, float(np.max(np.abs(y - rho * c)))


def _refine(M, c: np.ndarray, steps: int) -> np.ndarray:
    n = M.shape[0]
    _, best_res = _residual(M, c)
    for _ in range(steps):
        rho, _ = _residual(M, c)
        mu = rho * (1.0 + 1e-10)
        try:
            lu = spla.splu((M - mu * sp.identity(n)).tocsc())
            y = lu.solve(c)
        except RuntimeError:  # exactly singular shift
            break
        y = y / y.sum()
        if not np.all(y > 0):
            break
        _, res = _residual(M, y)
        if res >= best_res:
            break
        c, best_res = y, res
    return c


def power_iteration(
    g: DiGraph,
    weights: Sequence[float] | None = None,
    tol: float = 1e-12,
    max_iter: int = 1_000_000,
    start: Sequence[float] | None = None,
    plateau_window: int = 100,
    polish: int = 2,
) -> CentralityResult:
    """Perron vector and spectral radius of ``A_w^T``.

    Plain power iteration with l1 renormalisation. If the residual fails to
    halve over ``plateau_window`` steps (periodic or nearly periodic matrices,
    e.g. a pure cycle with a non-uniform start),
    the iteration restarts on ``A_w^T + I`` from the mean of the last
    ``plateau_window`` iterates; the shift keeps the Perron vector and
    removes the periodicity, and is subtracted from the reported rho.

    Once within ``tol`` the vector gets up to ``polish`` steps of shifted
    inverse iteration, which takes it to machine precision; downstream exact
    comparisons such as ``rho c_j == sum c_i`` depend on that.
    """
    if not is_strongly_connected(g):
        raise NotStronglyConnectedError("graph is not strongly connected; centrality is undefined")
    w = g.weights if weights is None else np.asarray(weights, dtype=float)
    if w.shape[0] != g.m:
        raise ValueError(f"expected {g.m} weights, got {w.shape[0]}")
    if np.any(w <= 0):
        raise ValueError("all arc weights must be positive")

    M = transpose_operator(g, w)
    if start is None:
        c = np.full(g.n, 1.0 / g.n)
    else:
        c = np.asarray(start, dtype=float)
        if c.shape != (g.n,) or np.any(c <= 0):
            raise ValueError("start vector must be positive with one entry per node")
        c = c / c.sum()

    shift = 0.0
    op = M
    recent: list[np.ndarray] = []
    history: list[float] = []
    rho, res = _residual(op, c)
    it = 0
    while res > tol:
        if it >= max_iter:
            raise ConvergenceError(
                f"power iteration did not converge in {max_iter} iterations (residual {res:.3e})",
                res, it)
        y = op @ c
        c = y / y.sum()
        it += 1
        rho, res = _residual(op, c)
        if shift:
            continue
        recent.append(c)
        history.append(res)
        if len(recent) > plateau_window:
            recent.pop(0)
        # (nearly) periodic: the residual oscillates or decays too slowly to be worth continuing
        if len(history) > plateau_window and min(history[-plateau_window:]) > 0.5 * history[-plateau_window - 1]:
            shift = 1.0
            op = M + sp.identity(g.n, format="csr")
            c = np.mean(recent, axis=0)
            c = c / c.sum()
            rho, res = _residual(op, c)

    if polish:
        c = _refine(M, c, steps=polish)
    rho, res = _residual(M, c)
    return CentralityResult(rho=float(rho), c=c, iterations=it, residual=res, shifted=bool(shift))


@dataclass(frozen=True)
class RealizationReport:
    residual: float
    per_node: np.ndarray
    passed: bool

    def to_record(self) -> dict:
        return {
            "residual_inf": float(self.residual),
            "per_node": [float(x) for x in self.per_node],
            "pass": bool(self.passed),
        }


def verify_realization(
    g: DiGraph,
    c: Sequence[float],
    rho: float,
    weights: Sequence[float] | None = None,
    threshold: float = 1e-8,
) -> RealizationReport:
    """Residuals ``(A_w^T c - rho c)_j``; passes iff the max-norm is within ``threshold``."""
    c = np.asarray(c, dtype=float)
    w = g.weights if weights is None else np.asarray(weights, dtype=float)
    if c.shape != (g.n,):
        raise ValueError(f"centrality vector has {c.size} entries, graph has {g.n} nodes")
    if w.shape != (g.m,):
        raise ValueError(f"weight vector has {w.size} entries, graph has {g.m} arcs")
    if np.any(w <= 0) or np.any(c <= 0) or rho <= 0:
        raise ValueError("weights, centralities and rho must be positive")
    per_node = transpose_operator(g, w) @ c - rho * c
    res = float(np.max(np.abs(per_node)))
    return RealizationReport(res, per_node, res <= threshold)

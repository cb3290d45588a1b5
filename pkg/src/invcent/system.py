"""The linear system ``B w = rho c`` behind the inverse centrality problem.

Row ``j`` of ``B`` carries the coefficient ``c_i`` for every arc ``(i, j)``
entering ``j``; each arc appears in exactly one row, so the system splits
into one independent equation per node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import DiGraph

# relative tolerance for "exact data" comparisons (e.g. rho*c_j == sum of c_i)
EXACT_RTOL = 1e-12


class InfeasibleError(ValueError):
    """The instance has no weights in the feasible set (or epsilon is too large)."""

    def __init__(self, message: str, epsilon_max: float | None = None) -> None:
        super().__init__(message)
        self.epsilon_max = epsilon_max


@dataclass(frozen=True, eq=False)
class CentralitySpec:
    """Target centrality ``c`` (need not be normalised), scale ``rho`` and weight floor ``epsilon``."""

    c: np.ndarray
    rho: float
    epsilon: float = 1e-3

    def __post_init__(self) -> None:
        c = np.array(self.c, dtype=float).reshape(-1)
        if c.size == 0 or not np.all(np.isfinite(c)) or np.any(c <= 0):
            raise ValueError("centrality entries must be positive and finite")
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "epsilon", float(self.epsilon))


@dataclass(frozen=True, eq=False)
class NodeRow:
    """One equation ``sum_i c_i w_ij = rho c_j`` of the system."""

    head: int
    tails: tuple[int, ...]
    arcs: np.ndarray  # 0-based arc indices, same order as tails
    coeffs: np.ndarray
    rhs: float

    @property
    def k(self) -> int:
        return len(self.tails)

    @property
    def deficit(self) -> float:
        """Signed slack ``rho c_j - sum c_i`` of the all-ones weights."""
        return self.rhs - float(self.coeffs.sum())

    @property
    def balanced(self) -> bool:
        """All-ones weights satisfy the row up to float noise."""
        total = float(self.coeffs.sum())
        return abs(self.rhs - total) <= EXACT_RTOL * max(self.rhs, total)


@dataclass(frozen=True, eq=False)
class InverseSystem:
    graph: DiGraph
    spec: CentralitySpec
    rows: tuple[NodeRow, ...]
    big_m: float

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def c(self) -> np.ndarray:
        return self.spec.c

    @property
    def rho(self) -> float:
        return self.spec.rho

    @property
    def epsilon(self) -> float:
        return self.spec.epsilon

    @property
    def rhs(self) -> np.ndarray:
        return self.spec.rho * self.spec.c

    def apply(self, w: Sequence[float]) -> np.ndarray:
        """``B w`` assembled row by row."""
        w = np.asarray(w, dtype=float)
        return np.array([float(row.coeffs @ w[row.arcs]) for row in self.rows])

    def residual(self, w: Sequence[float]) -> float:
        return float(np.max(np.abs(self.apply(w) - self.rhs)))

    def matrix(self) -> np.ndarray:
        B = np.zeros((self.n, self.m))
        for row in self.rows:
            B[row.head - 1, row.arcs] = row.coeffs
        return B


def epsilon_max(g: DiGraph, c: Sequence[float], rho: float) -> float:
    """Largest admissible floor: ``min_j rho c_j / sum_{i in BS(j)} c_i`` (exclusive)."""
    c = np.asarray(c, dtype=float)
    best = np.inf
    for j in range(1, g.n + 1):
        bs = g.back_star(j)
        if not bs:
            raise InfeasibleError(f"node {j} has no incoming arc")
        best = min(best, rho * c[j - 1] / sum(c[i - 1] for i in bs))
    return float(best)


def big_m_value(c: Sequence[float], rho: float) -> float:
    c = np.asarray(c, dtype=float)
    return float(rho * c.max() / c.min() - 1.0)


def build_system(g: DiGraph, spec: CentralitySpec) -> InverseSystem:
    if spec.c.shape[0] != g.n:
        raise ValueError(f"centrality vector has {spec.c.shape[0]} entries, graph has {g.n} nodes")
    for j in range(1, g.n + 1):
        if not g.back_star(j):
            raise InfeasibleError(f"node {j} has no incoming arc; no positive weights can realize c_{j}")
    eps_max = epsilon_max(g, spec.c, spec.rho)
    if spec.epsilon >= eps_max:
        raise InfeasibleError(
            f"epsilon={spec.epsilon:g} is not below epsilon_max={eps_max:.6g}", epsilon_max=eps_max)
    rows = []
    for j in range(1, g.n + 1):
        tails = g.back_star(j)
        rows.append(NodeRow(
            head=j,
            tails=tails,
            arcs=np.array([g.arc_index(i, j) for i in tails], dtype=int),
            coeffs=np.array([spec.c[i - 1] for i in tails]),
            rhs=spec.rho * spec.c[j - 1],
        ))
    return InverseSystem(g, spec, tuple(rows), big_m_value(spec.c, spec.rho))


def feasible_point(sys: InverseSystem) -> np.ndarray:
    """Explicit point of the feasible set.

    Per node, every in-arc gets ``epsilon`` except the one from the tail with
    the largest centrality (smallest id on ties), which takes up the rest.
    """
    eps = sys.epsilon
    w = np.empty(sys.m)
    for row in sys.rows:
        star = int(np.argmax(row.coeffs))  # first max = smallest tail id
        others = float(np.delete(row.coeffs, star).sum())
        w[row.arcs] = eps
        w[row.arcs[star]] = (row.rhs - eps * others) / row.coeffs[star]
    return w

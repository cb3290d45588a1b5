"""A priori bounds on feasible weights and on the optimal objective values."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .system import InverseSystem


@dataclass(frozen=True)
class Bounds:
    lower: float
    upper: float
    trivial: bool = False

    def contains(self, value: float, tol: float = 1e-9) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    def to_record(self) -> dict:
        rec = {"lower": float(self.lower), "upper": float(self.upper)}
        if self.trivial:
            rec["trivial"] = True
        return rec


@dataclass(frozen=True, eq=False)
class LemmaBounds:
    caps: np.ndarray          # per arc: w_ij <= rho c_j / c_i
    sum_lower: np.ndarray     # per node: rho c_j / max_{BS(j)} c_i
    sum_upper: np.ndarray     # per node: rho c_j / min_{BS(j)} c_i

    def check(self, sys: InverseSystem, w: Sequence[float], tol: float = 1e-9) -> bool:
        w = np.asarray(w, dtype=float)
        if np.any(w > self.caps + tol):
            return False
        sums = np.array([w[row.arcs].sum() for row in sys.rows])
        return bool(np.all(sums >= self.sum_lower - tol) and np.all(sums <= self.sum_upper + tol))


def lemma_bounds(sys: InverseSystem) -> LemmaBounds:
    c, rho = sys.c, sys.rho
    caps = np.array([rho * c[h - 1] / c[t - 1] for t, h in sys.graph.arcs])
    lo = np.array([row.rhs / row.coeffs.max() for row in sys.rows])
    hi = np.array([row.rhs / row.coeffs.min() for row in sys.rows])
    return LemmaBounds(caps, lo, hi)


def objective_bounds(sys: InverseSystem, problem: str, beta: Sequence[float] | None = None) -> Bounds:
    """Lower/upper bounds on the optimal value of ``problem``.

    The lower bounds for P1-P3 come from dropping the floor ``w >= eps``, so
    they can sit strictly below the constrained optimum. P6 has no such pair;
    ``(0, m)`` is returned and flagged trivial.
    """
    from .solvers import normalize_problem

    problem = normalize_problem(problem)
    rows = sys.rows
    c, rho = sys.c, sys.rho
    ratios = np.array([rho * c[h - 1] / c[t - 1] for t, h in sys.graph.arcs])
    deficits = np.array([row.deficit for row in rows])

    if problem == "P1":
        lower = sum(abs(d) / row.coeffs.max() for d, row in zip(deficits, rows))
        upper = float(np.maximum(1.0, ratios - 1.0).sum())
    elif problem == "P2":
        lower = sum(d * d / float(row.coeffs @ row.coeffs) for d, row in zip(deficits, rows))
        upper = (sys.m
                 + sum((row.rhs / row.coeffs.min()) ** 2 for row in rows)
                 - 2.0 * sum(row.rhs / row.coeffs.max() for row in rows))
    elif problem == "P3":
        lower = max(abs(d) / float(row.coeffs.sum()) for d, row in zip(deficits, rows))
        upper = max(1.0, float((ratios - 1.0).max()))
    elif problem == "P4":
        if beta is None:
            b = np.ones(sys.m)
        else:
            b = np.asarray(beta, dtype=float)
            if b.shape != (sys.m,):
                raise ValueError(f"beta has {b.size} entries, graph has {sys.m} arcs")
        lower = upper = 0.0
        for row in rows:
            per_unit = b[row.arcs] / row.coeffs
            lower += row.rhs * per_unit.min()
            upper += row.rhs * per_unit.max()
    elif problem == "P5":
        from .solvers import p5_mandatory
        lower, upper = len(p5_mandatory(sys)), sys.n
    else:
        return Bounds(0.0, float(sys.m), trivial=True)
    return Bounds(float(lower), float(upper))


def bounds_report(sys: InverseSystem, beta: Sequence[float] | None = None) -> dict:
    from .solvers import PROBLEMS

    lem = lemma_bounds(sys)
    return {
        "caps": [{"tail": t, "head": h, "cap": float(cap)} for (t, h), cap in zip(sys.graph.arcs, lem.caps)],
        "in_weight_sums": [
            {"node": row.head, "lower": float(lo), "upper": float(hi)}
            for row, lo, hi in zip(sys.rows, lem.sum_lower, lem.sum_upper)
        ],
        "objectives": {p: objective_bounds(sys, p, beta).to_record() for p in PROBLEMS},
    }

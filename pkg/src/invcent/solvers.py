"""Exact solvers for the six weight-selection problems over
``W = {w : B w = rho c, w >= epsilon}``.

P1-P4 and P6 split into one problem per node (each row of ``B`` touches its
own arcs only) and are solved row by row in closed form. P5 couples rows
through the tails and is solved by branch-and-bound over active node sets.
Ties are always broken towards the smallest node id.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from .system import EXACT_RTOL, InverseSystem, NodeRow

if TYPE_CHECKING:
    from .bounds import Bounds

PROBLEMS = ("P1", "P2", "P3", "P4", "P5", "P6")

# |w - 1| above this counts as "changed" in the P5/P6 objectives
UNIT_TOL = 1e-9


class SolverError(RuntimeError):
    pass


@dataclass(eq=False)
class WeightSolution:
    problem: str
    w: np.ndarray
    objective: float
    residual_inf: float
    active_nodes: np.ndarray | None = None
    changed_arcs: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)
    bounds: Bounds | None = None


def normalize_problem(tag: str) -> str:
    t = str(tag).strip().upper()
    if not t.startswith("P"):
        t = "P" + t
    if t not in PROBLEMS:
        raise ValueError(f"unknown problem {tag!r}; expected one of {', '.join(PROBLEMS)}")
    return t


def _beta(sys: InverseSystem, beta: Sequence[float] | None) -> np.ndarray:
    if beta is None:
        return np.ones(sys.m)
    b = np.asarray(beta, dtype=float)
    if b.shape != (sys.m,):
        raise ValueError(f"beta has {b.size} entries, graph has {sys.m} arcs")
    if np.any(~np.isfinite(b)) or np.any(b <= 0):
        raise ValueError("arc costs beta must be positive")
    return b


def changed_arcs(w: Sequence[float], tol: float = UNIT_TOL) -> np.ndarray:
    return np.abs(np.asarray(w, dtype=float) - 1.0) > tol


def active_nodes(sys: InverseSystem, w: Sequence[float], tol: float = UNIT_TOL) -> np.ndarray:
    """Boolean per node (index ``i-1``): some outgoing arc has weight != 1."""
    changed = changed_arcs(w, tol)
    act = np.zeros(sys.n, dtype=bool)
    for k, (t, _) in enumerate(sys.graph.arcs):
        if changed[k]:
            act[t - 1] = True
    return act


def objective_value(problem: str, sys: InverseSystem, w: Sequence[float],
                    beta: Sequence[float] | None = None) -> float:
    """Objective of ``problem`` evaluated at ``w``."""
    problem = normalize_problem(problem)
    w = np.asarray(w, dtype=float)
    d = w - 1.0
    if problem == "P1":
        return float(np.abs(d).sum())
    if problem == "P2":
        return float(d @ d)
    if problem == "P3":
        return float(np.abs(d).max()) if d.size else 0.0
    if problem == "P4":
        return float(_beta(sys, beta) @ w)
    if problem == "P5":
        return float(active_nodes(sys, w).sum())
    return float(changed_arcs(w).sum())


def _finish(problem: str, sys: InverseSystem, w: np.ndarray, beta=None, **extra) -> WeightSolution:
    return WeightSolution(
        problem=problem,
        w=w,
        objective=objective_value(problem, sys, w, beta),
        residual_inf=sys.residual(w),
        **extra,
    )


def _by_coeff_desc(row: NodeRow) -> list[int]:
    return sorted(range(row.k), key=lambda r: (-row.coeffs[r], row.tails[r]))


def _by_coeff_asc(row: NodeRow) -> list[int]:
    return sorted(range(row.k), key=lambda r: (row.coeffs[r], row.tails[r]))


# --- P1: min ||w - 1||_1 -------------------------------------------------

def p1_row(row: NodeRow, eps: float) -> np.ndarray:
    """Per-node l1 problem as a fractional knapsack.

    Moving ``w_i`` by one unit changes the row sum by ``c_i``, so both raising
    and lowering are cheapest on the largest coefficients.
    """
    base = max(1.0, eps)
    w = np.full(row.k, base)
    if base == 1.0 and row.balanced:
        return w
    order = _by_coeff_desc(row)
    gap = row.rhs - base * float(row.coeffs.sum())
    if gap >= 0:
        top = order[0]
        w[top] = base + gap / row.coeffs[top]
        return w
    need = -gap
    for r in order:
        take = min(need, row.coeffs[r] * (1.0 - eps))
        w[r] = 1.0 - take / row.coeffs[r]
        need -= take
        if need <= 0:
            break
    return w


# --- P2: min ||w - 1||_2^2 -----------------------------------------------

def p2_row(row: NodeRow, eps: float) -> tuple[np.ndarray, float]:
    """Projection of the all-ones vector onto ``{c.w = rhs, w >= eps}``.

    The minimiser is ``w_i = max(eps, 1 + lam c_i)``; the row sum is
    piecewise linear and non-decreasing in ``lam`` with kinks at
    ``(eps - 1)/c_i``, so ``lam`` is found exactly on the right segment.
    Returns the weights and the multiplier.
    """
    c = row.coeffs
    if eps <= 1.0 and row.balanced:
        return np.ones(row.k), 0.0

    def total(lam: float) -> float:
        return float(c @ np.maximum(eps, 1.0 + lam * c))

    own = (eps - 1.0) / c
    kinks = np.sort(own)
    # at the lowest kink every arc is on the floor and the sum eps*sum(c) < rhs
    lo = kinks[0]
    for kink in kinks[1:]:
        if total(kink) >= row.rhs:
            break
        lo = kink
    free = own <= lo
    floor_sum = eps * float(c[~free].sum())
    lam = (row.rhs - floor_sum - float(c[free].sum())) / float(c[free] @ c[free])
    w = np.where(free, np.maximum(eps, 1.0 + lam * c), eps)
    return w, lam


# --- P3: min ||w - 1||_inf -----------------------------------------------

def p3_row(row: NodeRow, eps: float) -> np.ndarray:
    """Uniform shift ``1 + deficit / sum(c)``; never below ``eps`` for admissible eps."""
    if row.balanced:
        return np.ones(row.k)
    return np.full(row.k, row.rhs / float(row.coeffs.sum()))


# --- P4: min beta.w ------------------------------------------------------

def p4_row(row: NodeRow, eps: float, beta: np.ndarray) -> np.ndarray:
    """Every arc at ``eps`` except the cheapest per unit of row sum (min beta/c)."""
    ratio = beta / row.coeffs
    star = min(range(row.k), key=lambda r: (ratio[r], row.tails[r]))
    w = np.full(row.k, eps)
    w[star] = (row.rhs - eps * float(np.delete(row.coeffs, star).sum())) / row.coeffs[star]
    return w


def _rowwise(problem: str, sys: InverseSystem, fn) -> WeightSolution:
    w = np.empty(sys.m)
    for row in sys.rows:
        w[row.arcs] = fn(row)
    return _finish(problem, sys, w)


def solve_p1(sys: InverseSystem) -> WeightSolution:
    return _rowwise("P1", sys, lambda row: p1_row(row, sys.epsilon))


def solve_p2(sys: InverseSystem) -> WeightSolution:
    sol = _rowwise("P2", sys, lambda row: p2_row(row, sys.epsilon)[0])
    sol.diagnostics["multipliers"] = [p2_row(row, sys.epsilon)[1] for row in sys.rows]
    return sol


def solve_p3(sys: InverseSystem) -> WeightSolution:
    return _rowwise("P3", sys, lambda row: p3_row(row, sys.epsilon))


def solve_p4(sys: InverseSystem, beta: Sequence[float] | None = None) -> WeightSolution:
    b = _beta(sys, beta)
    w = np.empty(sys.m)
    for row in sys.rows:
        w[row.arcs] = p4_row(row, sys.epsilon, b[row.arcs])
    return _finish("P4", sys, w, b)


# --- P5: min number of nodes with a changed outgoing arc -----------------

def _row_tol(row: NodeRow, *vals: float) -> float:
    return EXACT_RTOL * max(row.rhs, *vals)


def _p5_row_feasible(row: NodeRow, fixed: float, active: float, eps: float, upper: float) -> bool:
    """Can the active tails (coefficient sum ``active``) fill ``rhs - fixed``?"""
    rest = row.rhs - fixed
    tol = _row_tol(row, fixed)
    if active <= 0.0:
        return abs(rest) <= tol
    return eps * active - tol <= rest <= upper * active + tol


def p5_feasible(sys: InverseSystem, active: set[int] | Sequence[int]) -> bool:
    """Whether some ``w`` in the feasible set keeps every arc out of an inactive node at 1."""
    act = set(active)
    upper = 1.0 + sys.big_m
    for row in sys.rows:
        fixed = sum(c for t, c in zip(row.tails, row.coeffs) if t not in act)
        on = sum(c for t, c in zip(row.tails, row.coeffs) if t in act)
        if not _p5_row_feasible(row, fixed, on, sys.epsilon, upper):
            return False
    return True


def p5_witness(sys: InverseSystem, active: set[int] | Sequence[int]) -> np.ndarray:
    """Weights for a feasible active set: 1 on inactive tails, a uniform fill on active ones."""
    act = set(active)
    w = np.ones(sys.m)
    for row in sys.rows:
        mask = np.array([t in act for t in row.tails])
        on = float(row.coeffs[mask].sum())
        if on > 0:
            fixed = float(row.coeffs[~mask].sum())
            rest = row.rhs - fixed
            if abs(rest - on) > _row_tol(row, fixed, on):
                w[row.arcs[mask]] = rest / on
    return w


def p5_mandatory(sys: InverseSystem) -> set[int]:
    """Tails forced below 1: some out-arc ``(i, j)`` has ``c_i > rho c_j``.

    Equality up to float noise does not count; there the arc can stay at 1.
    """
    c, rho = sys.c, sys.rho
    return {t for t, h in sys.graph.arcs if c[t - 1] > rho * c[h - 1] * (1.0 + EXACT_RTOL)}


class _P5Search:
    """Depth-first search over node activations with interval pruning.

    Per row the decided-inactive tails contribute exactly their coefficient,
    active tails anything in ``[eps, 1+M]`` times theirs, and undecided tails
    anything in the hull of both; a row whose target falls outside that
    range kills the branch.
    """

    def __init__(self, sys: InverseSystem) -> None:
        self.sys = sys
        self.eps = sys.epsilon
        self.upper = 1.0 + sys.big_m
        self.hi_undecided = max(1.0, self.upper)
        n = sys.n
        # per node: list of (row index, coefficient) for its out-arcs
        self.out: list[list[tuple[int, float]]] = [[] for _ in range(n + 1)]
        for ri, row in enumerate(sys.rows):
            for t, cf in zip(row.tails, row.coeffs):
                self.out[t].append((ri, float(cf)))
        self.explored = 0

    def _reset(self) -> None:
        nrows = len(self.sys.rows)
        self.fixed = [0.0] * nrows
        self.on = [0.0] * nrows
        self.undecided = [float(row.coeffs.sum()) for row in self.sys.rows]
        self.count_open = [row.k for row in self.sys.rows]  # active or undecided tails

    def _decide(self, node: int, active: bool, sign: float) -> None:
        for ri, cf in self.out[node]:
            self.undecided[ri] -= sign * cf
            if active:
                self.on[ri] += sign * cf
            else:
                self.fixed[ri] += sign * cf
                self.count_open[ri] -= int(sign)

    def _rows_ok(self, rows) -> bool:
        eps, hi, hu = self.eps, self.upper, self.hi_undecided
        for ri in rows:
            row = self.sys.rows[ri]
            f, a, u = self.fixed[ri], self.on[ri], max(self.undecided[ri], 0.0)
            tol = _row_tol(row, f + u)
            if self.count_open[ri] == 0:
                if abs(row.rhs - f) > tol:
                    return False
                continue
            if not (f + eps * (a + u) - tol <= row.rhs <= f + hi * a + hu * u + tol):
                return False
        return True

    def _rest_inactive_ok(self) -> bool:
        """Would switching every undecided node off still be feasible?"""
        for ri, row in enumerate(self.sys.rows):
            f = self.fixed[ri] + max(self.undecided[ri], 0.0)
            if not _p5_row_feasible(row, f, self.on[ri], self.eps, self.upper):
                return False
        return True

    def minimum(self, forced: set[int], order: list[int], budget: int) -> tuple[int, set[int]] | None:
        """Smallest active set (``|S| < budget``), exploring 'inactive' first."""
        self._reset()
        for v in forced:
            self._decide(v, True, 1.0)
        if not self._rows_ok(range(len(self.sys.rows))):
            return None
        best: list = [budget, None]
        chosen = set(forced)

        def dfs(depth: int) -> None:
            self.explored += 1
            count = len(chosen)
            if count >= best[0]:
                return
            if depth == len(order):
                best[0], best[1] = count, set(chosen)
                return
            if count + 1 >= best[0] and not self._rest_inactive_ok():
                return
            v = order[depth]
            touched = [ri for ri, _ in self.out[v]]
            for act in (False, True):
                self._decide(v, act, 1.0)
                if act:
                    chosen.add(v)
                if self._rows_ok(touched):
                    dfs(depth + 1)
                if act:
                    chosen.discard(v)
                self._decide(v, act, -1.0)

        dfs(0)
        return None if best[1] is None else (best[0], best[1])

    def lexmin(self, forced: set[int], order: list[int], size: int) -> set[int] | None:
        """Lexicographically smallest active set of exactly ``size`` nodes."""
        self._reset()
        for v in forced:
            self._decide(v, True, 1.0)
        chosen = set(forced)
        result: list = [None]

        def dfs(depth: int) -> bool:
            self.explored += 1
            if len(chosen) > size:
                return False
            if depth == len(order):
                if len(chosen) == size:
                    result[0] = set(chosen)
                    return True
                return False
            v = order[depth]
            touched = [ri for ri, _ in self.out[v]]
            for act in (True, False):
                self._decide(v, act, 1.0)
                if act:
                    chosen.add(v)
                ok = self._rows_ok(touched) and dfs(depth + 1)
                if act:
                    chosen.discard(v)
                self._decide(v, act, -1.0)
                if ok:
                    return True
            return False

        dfs(0)
        return result[0]


def solve_p5(sys: InverseSystem) -> WeightSolution:
    """Exact P5 by branch-and-bound.

    Nodes forced active by the lower-bound argument are fixed first; the rest
    are branched on in order of decreasing out-degree. A second pass returns
    the lexicographically smallest active set among the optimal ones so the
    output does not depend on search order.
    """
    g = sys.graph
    forced = p5_mandatory(sys)
    free = [v for v in range(1, sys.n + 1) if v not in forced and g.out_degree(v) > 0]
    order = sorted(free, key=lambda v: (-g.out_degree(v), v))
    search = _P5Search(sys)
    found = search.minimum(forced, order, sys.n + 1)
    if found is None:
        raise SolverError("no feasible active node set; the instance should have been rejected")
    size, _ = found
    explored_bb = search.explored
    canonical = search.lexmin(forced, sorted(free), size)
    if canonical is None:  # pragma: no cover - both passes test the same predicate
        raise SolverError("lexicographic pass failed to reproduce the optimum")
    w = p5_witness(sys, canonical)
    act = np.zeros(sys.n, dtype=bool)
    act[[v - 1 for v in canonical]] = True
    sol = _finish("P5", sys, w, active_nodes=act)
    sol.objective = float(size)
    sol.diagnostics.update({
        "nodes_explored": explored_bb,
        "nodes_explored_lexmin": search.explored - explored_bb,
        "mandatory_nodes": sorted(forced),
        "active_nodes": sorted(canonical),
    })
    return sol


def solve_p5_oracle(sys: InverseSystem, max_nodes: int = 12) -> int:
    """Minimum active-set size by enumerating all ``2^n`` node subsets."""
    if sys.n > max_nodes:
        raise ValueError(f"exhaustive P5 limited to n <= {max_nodes} (got {sys.n})")
    for size in range(sys.n + 1):
        for subset in itertools.combinations(range(1, sys.n + 1), size):
            if p5_feasible(sys, subset):
                return size
    raise SolverError("no subset is feasible")


# --- P6: min number of changed arcs --------------------------------------

@dataclass(frozen=True)
class P6NodePlan:
    order: tuple[int, ...]   # positions into the row, coefficients non-decreasing
    h: int
    d: int


def p6_plan(row: NodeRow, eps: float) -> P6NodePlan:
    order = tuple(_by_coeff_asc(row))
    k = row.k
    if row.balanced:
        return P6NodePlan(order, k - 1, k)
    c = row.coeffs[list(order)]
    h = 0
    for cand in range(k):
        lhs = float(c[:cand].sum()) + eps * float(c[cand:].sum())
        if lhs <= row.rhs + _row_tol(row, lhs):
            h = cand
    return P6NodePlan(order, h, h)


def p6_row(row: NodeRow, eps: float) -> tuple[np.ndarray, P6NodePlan]:
    plan = p6_plan(row, eps)
    if plan.d == row.k:
        return np.ones(row.k), plan
    w = np.empty(row.k)
    pos = list(plan.order)
    w[pos[:plan.h]] = 1.0
    w[pos[plan.h + 1:]] = eps
    pivot = pos[plan.h]
    c = row.coeffs
    w[pivot] = (row.rhs - float(c[pos[:plan.h]].sum()) - eps * float(c[pos[plan.h + 1:]].sum())) / c[pivot]
    return w, plan


def solve_p6_closed_form(sys: InverseSystem) -> WeightSolution:
    """Per node keep the smallest-centrality in-arcs at 1 as long as the rest
    can still absorb the remainder at the floor; one pivot arc closes the row."""
    if not sys.epsilon < 1.0:
        raise ValueError("closed-form P6 needs epsilon < 1")
    w = np.empty(sys.m)
    h, d = [], []
    for row in sys.rows:
        wr, plan = p6_row(row, sys.epsilon)
        w[row.arcs] = wr
        h.append(plan.h)
        d.append(plan.d)
    sol = _finish("P6", sys, w, changed_arcs=changed_arcs(w))
    sol.diagnostics.update({"h": h, "d": d, "closed_form_objective": sys.m - sum(d)})
    return sol


def solve_p6_oracle(sys: InverseSystem, max_in_degree: int = 20) -> int:
    """``m - sum_j max |I|`` over subsets ``I`` of in-arcs pinned to 1, by enumeration."""
    upper = 1.0 + sys.big_m
    kept = 0
    for row in sys.rows:
        if row.k > max_in_degree:
            raise ValueError(f"node {row.head} has in-degree {row.k} > {max_in_degree}")
        best = 0
        idx = range(row.k)
        for size in range(row.k, -1, -1):
            if any(
                _p5_row_feasible(row, float(row.coeffs[list(I)].sum()),
                                 float(row.coeffs.sum() - row.coeffs[list(I)].sum()),
                                 sys.epsilon, upper)
                for I in itertools.combinations(idx, size)
            ):
                best = size
                break
        kept += best
    return sys.m - kept


# --- dispatch ------------------------------------------------------------

def solve(sys: InverseSystem, problem: str, beta: Sequence[float] | None = None,
          with_bounds: bool = True) -> WeightSolution:
    from .bounds import objective_bounds

    problem = normalize_problem(problem)
    if problem == "P1":
        sol = solve_p1(sys)
    elif problem == "P2":
        sol = solve_p2(sys)
    elif problem == "P3":
        sol = solve_p3(sys)
    elif problem == "P4":
        sol = solve_p4(sys, beta)
    elif problem == "P5":
        sol = solve_p5(sys)
    else:
        sol = solve_p6_closed_form(sys)
    if with_bounds:
        sol.bounds = objective_bounds(sys, problem, beta)
    return sol


def solve_all(sys: InverseSystem, problems: Sequence[str] = PROBLEMS,
              beta: Sequence[float] | None = None) -> dict[str, WeightSolution]:
    return {normalize_problem(p): solve(sys, p, beta) for p in problems}


def cross_objective_matrix(sys: InverseSystem, solutions: Mapping[str, WeightSolution],
                           beta: Sequence[float] | None = None) -> np.ndarray:
    """Entry ``[p, q]``: objective of problem ``p`` at the solution of problem ``q``."""
    tags = list(solutions)
    return np.array([[objective_value(p, sys, solutions[q].w, beta) for q in tags] for p in tags])

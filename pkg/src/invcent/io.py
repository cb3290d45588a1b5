"""Reading centrality/cost vectors and writing solution records (JSON, CSV, DOT)."""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Mapping, Sequence

import numpy as np

from .bounds import Bounds
from .graph import DiGraph, to_dot
from .solvers import WeightSolution


def parse_vector(text: str, what: str = "vector") -> np.ndarray:
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for tok in line.split():
            try:
                values.append(float(tok))
            except ValueError:
                raise ValueError(f"{what}, line {lineno}: not a number: {tok!r}") from None
    arr = np.array(values, dtype=float)
    if arr.size == 0:
        raise ValueError(f"{what} is empty")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError(f"{what} entries must be positive")
    return arr


def read_vector(path, what: str = "vector") -> np.ndarray:
    with open(path) as fh:
        return parse_vector(fh.read(), what)


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def solution_record(sol: WeightSolution, graph: DiGraph, rho: float, epsilon: float) -> dict:
    rec = {
        "problem": sol.problem,
        "rho": float(rho),
        "epsilon": float(epsilon),
        "objective": float(sol.objective),
        "residual_inf": float(sol.residual_inf),
        "weights": [{"tail": t, "head": h, "w": float(w)} for (t, h), w in zip(graph.arcs, sol.w)],
        "bounds": sol.bounds.to_record() if sol.bounds is not None else None,
        "diagnostics": _jsonable(sol.diagnostics),
    }
    if sol.active_nodes is not None:
        rec["active_nodes"] = [i + 1 for i in np.flatnonzero(sol.active_nodes)]
    if sol.changed_arcs is not None:
        rec["changed_arcs"] = [list(graph.arcs[k]) for k in np.flatnonzero(sol.changed_arcs)]
    return _jsonable(rec)


def write_solution_json(sol: WeightSolution, graph: DiGraph, rho: float, epsilon: float) -> str:
    return json.dumps(solution_record(sol, graph, rho, epsilon), indent=2) + "\n"


def solution_from_record(rec: Mapping, graph: DiGraph | None = None) -> tuple[WeightSolution, DiGraph]:
    """Inverse of :func:`solution_record`; rebuilds the graph from the weight list if not given."""
    arcs = [(int(e["tail"]), int(e["head"])) for e in rec["weights"]]
    w = np.array([float(e["w"]) for e in rec["weights"]])
    if graph is None:
        graph = DiGraph.from_arcs(arcs)
    if list(graph.arcs) != arcs:
        raise ValueError("weight list does not follow the graph's arc order")
    b = rec.get("bounds")
    act = None
    if "active_nodes" in rec:
        act = np.zeros(graph.n, dtype=bool)
        act[[i - 1 for i in rec["active_nodes"]]] = True
    changed = None
    if "changed_arcs" in rec:
        changed = np.zeros(graph.m, dtype=bool)
        for t, h in rec["changed_arcs"]:
            changed[graph.arc_index(t, h)] = True
    sol = WeightSolution(
        problem=rec["problem"],
        w=w,
        objective=float(rec["objective"]),
        residual_inf=float(rec["residual_inf"]),
        active_nodes=act,
        changed_arcs=changed,
        diagnostics=dict(rec.get("diagnostics") or {}),
        bounds=None if b is None else Bounds(b["lower"], b["upper"], bool(b.get("trivial", False))),
    )
    return sol, graph


def parse_solution_json(text: str, graph: DiGraph | None = None) -> WeightSolution:
    return solution_from_record(json.loads(text), graph)[0]


def write_weights_csv(graph: DiGraph, columns: Mapping[str, Sequence[float]]) -> str:
    """CSV ``tail,head,weight`` for one column; one weight column per problem otherwise."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    header = ["tail", "head"] + (["weight"] if len(names) == 1 else names)
    writer.writerow(header)
    for k, (t, h) in enumerate(graph.arcs):
        writer.writerow([t, h] + [repr(float(columns[name][k])) for name in names])
    return buf.getvalue()


def write_solution_csv(sol: WeightSolution, graph: DiGraph) -> str:
    return write_weights_csv(graph, {sol.problem: sol.w})


def write_solutions_dot(graph: DiGraph, solutions: Iterable[WeightSolution], highlight_tol: float = 1e-6) -> str:
    return "".join(to_dot(graph, s.w, name=s.problem, highlight_tol=highlight_tol) for s in solutions)

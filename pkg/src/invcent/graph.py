"""Directed simple graphs: edge-list parsing, back-stars and strong connectivity.

Node ids are 1-based everywhere in the public API. Arcs are kept in
row-major order of the adjacency matrix (by tail, then by head), which is
also the order of the weight vector used by the inverse solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np


class GraphError(ValueError):
    """Invalid graph data (parse failure, self-loop, duplicate arc...)."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class DiGraph:
    """Immutable directed simple graph on nodes ``1..n``.

    ``arcs[k]`` is the ``k``-th arc (0-based storage of the 1-based arc index
    ``k+1``) and ``weights[k]`` its weight.
    """

    n: int
    arcs: tuple[tuple[int, int], ...]
    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GraphError("empty graph")
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != len(self.arcs):
            raise GraphError(f"expected {len(self.arcs)} weights, got {w.shape[0]}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        seen = set()
        prev = (0, 0)
        for tail, head in self.arcs:
            if not (1 <= tail <= self.n and 1 <= head <= self.n):
                raise GraphError(f"arc ({tail},{head}) outside node range 1..{self.n}")
            if tail == head:
                raise GraphError(f"self-loop at node {tail}")
            if (tail, head) in seen:
                raise GraphError(f"duplicate arc ({tail},{head})")
            if (tail, head) < prev:
                raise GraphError("arcs must be in row-major order")
            seen.add((tail, head))
            prev = (tail, head)
        back: list[list[int]] = [[] for _ in range(self.n + 1)]
        out: list[list[int]] = [[] for _ in range(self.n + 1)]
        for k, (tail, head) in enumerate(self.arcs):
            back[head].append(tail)
            out[tail].append(k)
        object.__setattr__(self, "_back", tuple(tuple(b) for b in back))
        object.__setattr__(self, "_out", tuple(tuple(o) for o in out))
        object.__setattr__(self, "_index", {a: k for k, a in enumerate(self.arcs)})

    @classmethod
    def from_arcs(
        cls,
        arcs: Iterable[tuple[int, int]],
        n: int | None = None,
        weights: Sequence[float] | None = None,
    ) -> "DiGraph":
        """Build a graph from arcs in any order; arcs are re-sorted row-major."""
        arcs = [(int(t), int(h)) for t, h in arcs]
        if weights is None:
            weights = [1.0] * len(arcs)
        if len(weights) != len(arcs):
            raise GraphError(f"expected {len(arcs)} weights, got {len(weights)}")
        if not arcs and n is None:
            raise GraphError("empty graph")
        order = sorted(range(len(arcs)), key=lambda k: arcs[k])
        for a, b in zip(order, order[1:]):
            if arcs[a] == arcs[b]:
                raise GraphError(f"duplicate arc {arcs[a]}")
        if n is None:
            n = max(max(t, h) for t, h in arcs)
        return cls(n, tuple(arcs[k] for k in order), np.array([weights[k] for k in order], dtype=float))

    @classmethod
    def from_adjacency(cls, A) -> "DiGraph":
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise GraphError("adjacency matrix must be square")
        tails, heads = np.nonzero(A)
        arcs = [(int(i) + 1, int(j) + 1) for i, j in zip(tails, heads)]
        return cls.from_arcs(arcs, n=A.shape[0], weights=[float(A[t - 1, h - 1]) for t, h in arcs])

    @property
    def m(self) -> int:
        return len(self.arcs)

    def back_star(self, j: int) -> tuple[int, ...]:
        """Tails of the arcs entering ``j``, ascending."""
        return self._back[j]

    def out_arcs(self, i: int) -> tuple[int, ...]:
        """0-based arc indices leaving ``i``."""
        return self._out[i]

    def out_degree(self, i: int) -> int:
        return len(self._out[i])

    def in_degree(self, j: int) -> int:
        return len(self._back[j])

    def arc_index(self, tail: int, head: int) -> int:
        return self._index[(tail, head)]

    def successors(self, i: int) -> list[int]:
        return [self.arcs[k][1] for k in self._out[i]]

    def with_weights(self, weights: Sequence[float]) -> "DiGraph":
        return DiGraph(self.n, self.arcs, np.asarray(weights, dtype=float))

    def adjacency(self, weighted: bool = True) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for k, (t, h) in enumerate(self.arcs):
            A[t - 1, h - 1] = self.weights[k] if weighted else 1.0
        return A


def parse_edge_list(source: str | TextIO) -> DiGraph:
    """Parse a whitespace-separated edge list.

    Each non-comment line is ``tail head`` or ``tail head weight`` with 1-based
    integer node ids. Blank lines and lines starting with ``#`` are skipped.
    """
    text = source if isinstance(source, str) else source.read()
    arcs: list[tuple[int, int]] = []
    weights: list[float] = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphError(f"expected 'tail head [weight]', got {line!r}", lineno)
        try:
            tail, head = int(parts[0]), int(parts[1])
            weight = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise GraphError(f"malformed arc {line!r}", lineno) from None
        if tail < 1 or head < 1:
            raise GraphError("node ids are 1-based", lineno)
        if tail == head:
            raise GraphError(f"self-loop at node {tail}", lineno)
        if (tail, head) in seen:
            raise GraphError(f"duplicate arc ({tail},{head}), first seen on line {seen[tail, head]}", lineno)
        seen[tail, head] = lineno
        arcs.append((tail, head))
        weights.append(weight)
    if not arcs:
        raise GraphError("empty graph")
    return DiGraph.from_arcs(arcs, weights=weights)


def read_edge_list(path) -> DiGraph:
    with open(path) as fh:
        return parse_edge_list(fh)


@dataclass(frozen=True)
class SccPartition:
    components: tuple[frozenset[int], ...]
    component_of: dict[int, int]
    giant_index: int

    def __len__(self) -> int:
        return len(self.components)

    @property
    def giant(self) -> frozenset[int]:
        return self.components[self.giant_index]


def strongly_connected_components(g: DiGraph) -> SccPartition:
    """Iterative Tarjan; components ordered by their smallest node id."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    found: list[frozenset[int]] = []
    counter = 0

    for root in range(1, g.n + 1):
        if root in index:
            continue
        # frames: (node, iterator position over successors)
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            succ = g.successors(v)
            recursed = False
            while pos < len(succ):
                w = succ[pos]
                pos += 1
                if w not in index:
                    work.append((v, pos))
                    work.append((w, 0))
                    recursed = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recursed:
                continue
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                found.append(frozenset(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])

    components = tuple(sorted(found, key=min))
    component_of = {v: ci for ci, comp in enumerate(components) for v in comp}
    giant = max(range(len(components)), key=lambda ci: (len(components[ci]), -min(components[ci])))
    return SccPartition(components, component_of, giant)


def is_strongly_connected(g: DiGraph) -> bool:
    return len(strongly_connected_components(g)) == 1


def giant_scc_subgraph(g: DiGraph) -> tuple[DiGraph, dict[int, int]]:
    """Induced subgraph on the largest SCC, relabelled ``1..n'`` by ascending old id.

    Returns the subgraph and the old-to-new node map.
    """
    part = strongly_connected_components(g)
    nodes = sorted(part.giant)
    if len(nodes) < 2:
        raise GraphError("largest strongly connected component has a single node")
    relabel = {old: new for new, old in enumerate(nodes, start=1)}
    keep = [k for k, (t, h) in enumerate(g.arcs) if t in relabel and h in relabel]
    arcs = tuple((relabel[g.arcs[k][0]], relabel[g.arcs[k][1]]) for k in keep)
    return DiGraph(len(nodes), arcs, g.weights[keep]), relabel


def to_dot(g: DiGraph, weights: Sequence[float] | None = None, name: str = "",
           highlight_tol: float | None = None) -> str:
    """DOT text with weights printed to 4 decimals.

    With ``highlight_tol`` set, arcs whose weight differs from 1 by more than
    the tolerance are coloured red.
    """
    w = g.weights if weights is None else np.asarray(weights, dtype=float)
    head = f"digraph {name} {{" if name else "digraph {"
    lines = [head]
    for k, (t, h) in enumerate(g.arcs):
        attrs = f'label="{w[k]:.4f}"'
        if highlight_tol is not None and abs(w[k] - 1.0) > highlight_tol:
            attrs += ", color=red"
        lines.append(f"  {t} -> {h} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

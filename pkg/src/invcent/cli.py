"""``icx`` command line.

Exit codes: 0 success, 1 other errors, 2 graph not strongly connected,
3 epsilon not admissible (or a node without in-arcs).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bounds import bounds_report
from .graph import DiGraph, GraphError, giant_scc_subgraph, read_edge_list, strongly_connected_components, to_dot
from .io import read_vector, solution_record, write_solutions_dot, write_weights_csv
from .reference import CROSS_OBJECTIVES, NETWORK_SIZES
from .solvers import PROBLEMS, cross_objective_matrix, normalize_problem, solve_all
from .spectral import CentralityResult, NotStronglyConnectedError, power_iteration, verify_realization
from .system import CentralitySpec, InfeasibleError, build_system

log = logging.getLogger("invcent")

EXIT_OK, EXIT_ERROR, EXIT_NOT_SCC, EXIT_EPSILON = 0, 1, 2, 3
COMMANDS = ("centrality", "solve", "bounds", "verify", "export", "reproduce")


@dataclass
class RunConfig:
    command: str
    graph: str
    centrality: str | None = None
    swap: tuple[int, int] | None = None
    rho: float | None = None
    epsilon: float = 1e-3
    beta: str | None = None
    problems: tuple[str, ...] = PROBLEMS
    out: str | None = None
    format: str = "json"
    giant_scc: bool = False
    network: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if not self.epsilon > 0:
            raise ValueError("--epsilon must be positive")
        if self.rho is not None and not self.rho > 0:
            raise ValueError("--rho must be positive")
        self.problems = tuple(dict.fromkeys(normalize_problem(p) for p in self.problems))
        if self.swap is not None:
            a, b = self.swap
            if a == b:
                raise ValueError("--swap needs two distinct node ids")
        if self.centrality is not None and self.swap is not None:
            raise ValueError("--centrality and --swap are mutually exclusive")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icx", description="Inverse eigenvector centrality on directed graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--graph", required=True, metavar="FILE", help="edge list: 'tail head [weight]' per line")
    target = parser.add_mutually_exclusive_group()
    target.add_argument("--centrality", metavar="FILE", help="target centrality, n positive reals")
    target.add_argument("--swap", nargs=2, type=int, metavar=("A", "B"),
                        help="target = forward centrality with entries A and B exchanged")
    parser.add_argument("--rho", type=float, help="target scale (default: forward spectral radius)")
    parser.add_argument("--epsilon", type=float, default=1e-3, help="weight floor (default 1e-3)")
    parser.add_argument("--beta", metavar="FILE", help="P4 arc costs, m positive reals in arc order (default ones)")
    parser.add_argument("--problem", default=",".join(PROBLEMS), help="comma list of p1..p6 (default all)")
    parser.add_argument("--out", metavar="FILE", help="output file (default stdout)")
    parser.add_argument("--format", choices=("json", "csv", "dot"), default="json")
    parser.add_argument("--giant-scc", action="store_true", help="restrict to the largest strongly connected component")
    parser.add_argument("--network", choices=sorted(NETWORK_SIZES),
                        help="reproduce: compare against the reference table for this network")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        graph=ns.graph,
        centrality=ns.centrality,
        swap=tuple(ns.swap) if ns.swap else None,
        rho=ns.rho,
        epsilon=ns.epsilon,
        beta=ns.beta,
        problems=tuple(p for p in ns.problem.split(",") if p.strip()),
        out=ns.out,
        format=ns.format,
        giant_scc=ns.giant_scc,
        network=ns.network,
    )


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load_graph(cfg: RunConfig) -> DiGraph:
    g = read_edge_list(cfg.graph)
    if cfg.giant_scc:
        sub, relabel = giant_scc_subgraph(g)
        if sub.n != g.n:
            log.warning("restricted to giant SCC: %d of %d nodes", sub.n, g.n)
        return sub
    return g


def _require_scc(g: DiGraph) -> None:
    part = strongly_connected_components(g)
    if len(part) > 1:
        sizes = sorted((len(cm) for cm in part.components), reverse=True)
        raise NotStronglyConnectedError(
            f"graph has {len(part)} strongly connected components (sizes {sizes[:10]}); "
            f"rerun with --giant-scc")


def _forward(g: DiGraph, weighted: bool = False) -> CentralityResult:
    _require_scc(g)
    return power_iteration(g if weighted else g.with_weights(np.ones(g.m)))


def _target(cfg: RunConfig, g: DiGraph) -> tuple[np.ndarray, float, dict]:
    """Target (c, rho) and a provenance record."""
    prov: dict = {}
    forward = None
    if cfg.centrality:
        c = read_vector(cfg.centrality, "centrality")
        if c.size != g.n:
            raise ValueError(f"centrality file has {c.size} entries, graph has {g.n} nodes")
        prov["centrality"] = cfg.centrality
    else:
        forward = _forward(g)
        c = forward.c.copy()
        prov["centrality"] = "forward"
        if cfg.swap:
            a, b = cfg.swap
            if not (1 <= a <= g.n and 1 <= b <= g.n):
                raise ValueError(f"--swap indices must lie in 1..{g.n}")
            c[[a - 1, b - 1]] = c[[b - 1, a - 1]]
            prov["swap"] = [a, b]
    if cfg.rho is not None:
        rho = cfg.rho
        prov["rho_source"] = "given"
    else:
        if forward is None:
            forward = _forward(g)
        rho = forward.rho
        prov["rho_source"] = "forward"
    return c, rho, prov


def _beta(cfg: RunConfig, g: DiGraph) -> np.ndarray | None:
    if not cfg.beta:
        return None
    b = read_vector(cfg.beta, "beta")
    if b.size != g.m:
        raise ValueError(f"beta file has {b.size} entries, graph has {g.m} arcs")
    return b


def cmd_centrality(cfg: RunConfig) -> int:
    g = _load_graph(cfg)
    res = _forward(g, weighted=True)
    print(f"rho = {res.rho:.4f}", file=sys.stderr)
    print("c = (" + ", ".join(f"{x:.4f}" for x in res.c) + ")", file=sys.stderr)
    if cfg.format == "csv":
        _emit(cfg, "node,c\n" + "".join(f"{i},{x!r}\n" for i, x in enumerate(res.c.tolist(), start=1)))
    else:
        _emit(cfg, _dumps(res.to_record()))
    return EXIT_OK


def _system(cfg: RunConfig):
    g = _load_graph(cfg)
    c, rho, prov = _target(cfg, g)
    sys_ = build_system(g, CentralitySpec(c, rho, cfg.epsilon))
    return g, sys_, prov


def cmd_solve(cfg: RunConfig) -> int:
    g, sys_, prov = _system(cfg)
    beta = _beta(cfg, g)
    sols = solve_all(sys_, cfg.problems, beta)
    for tag, s in sols.items():
        print(f"{tag}: objective = {s.objective:.4f}  residual = {s.residual_inf:.1e}", file=sys.stderr)
    if cfg.format == "dot":
        _emit(cfg, write_solutions_dot(g, sols.values()))
    elif cfg.format == "csv":
        _emit(cfg, write_weights_csv(g, {t: s.w for t, s in sols.items()}))
    else:
        doc = {
            "graph": {"path": cfg.graph, "n": g.n, "m": g.m},
            "target": {"rho": sys_.rho, "c": sys_.c.tolist(), **prov},
            "epsilon": sys_.epsilon,
            "beta": cfg.beta or "ones",
            "epsilon_max": _eps_max(sys_),
            "big_m": sys_.big_m,
            "solutions": [solution_record(s, g, sys_.rho, sys_.epsilon) for s in sols.values()],
        }
        _emit(cfg, _dumps(doc))
    return EXIT_OK


def _eps_max(sys_) -> float:
    from .system import epsilon_max
    return epsilon_max(sys_.graph, sys_.c, sys_.rho)


def cmd_bounds(cfg: RunConfig) -> int:
    g, sys_, prov = _system(cfg)
    report = bounds_report(sys_, _beta(cfg, g))
    report = {"rho": sys_.rho, "epsilon": sys_.epsilon, "epsilon_max": _eps_max(sys_), "big_m": sys_.big_m, **report}
    _emit(cfg, _dumps(report))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    g = _load_graph(cfg)
    c, rho, prov = _target(cfg, g)
    rep = verify_realization(g, c, rho)
    record = {"rho": rho, **rep.to_record()}
    part = strongly_connected_components(g)
    if len(part) == 1:
        fwd = power_iteration(g)
        record["roundtrip"] = {
            "rho": fwd.rho,
            "rho_error": abs(fwd.rho - rho),
            "c_l1_error": float(np.abs(fwd.c - c / c.sum()).sum()),
        }
    print(f"residual = {rep.residual:.3e}  {'PASS' if rep.passed else 'FAIL'}", file=sys.stderr)
    _emit(cfg, _dumps(record))
    return EXIT_OK if rep.passed else EXIT_ERROR


def cmd_export(cfg: RunConfig) -> int:
    g = _load_graph(cfg)
    if cfg.format == "dot":
        _emit(cfg, to_dot(g))
    elif cfg.format == "csv":
        _emit(cfg, write_weights_csv(g, {"weight": g.weights}))
    else:
        _emit(cfg, _dumps({"n": g.n, "m": g.m,
                           "arcs": [{"tail": t, "head": h, "w": float(w)} for (t, h), w in zip(g.arcs, g.weights)]}))
    return EXIT_OK


def cmd_reproduce(cfg: RunConfig) -> int:
    if cfg.centrality is None and cfg.swap is None:
        cfg.swap = (1, 2)
    g, sys_, prov = _system(cfg)
    if cfg.network:
        n_exp, m_exp = NETWORK_SIZES[cfg.network]
        if (g.n, g.m) != (n_exp, m_exp):
            log.warning("%s: expected %d nodes / %d links, got %d / %d", cfg.network, n_exp, m_exp, g.n, g.m)
    beta = _beta(cfg, g)
    sols = solve_all(sys_, PROBLEMS, beta)
    mat = cross_objective_matrix(sys_, sols, beta)
    diag_ok = all(mat[p, p] <= mat[p, q] + 1e-9 for p in range(6) for q in range(6))
    _print_matrix(mat, cfg.network)
    doc = {
        "graph": {"path": cfg.graph, "n": g.n, "m": g.m},
        "network": cfg.network,
        "target": {"rho": sys_.rho, **prov},
        "epsilon": sys_.epsilon,
        "beta": cfg.beta or "ones",
        "problems": list(PROBLEMS),
        "matrix": mat.tolist(),
        "diagonal_minimal": diag_ok,
    }
    if cfg.network:
        doc["reference"] = CROSS_OBJECTIVES[cfg.network]
    _emit(cfg, _dumps(doc))
    if not diag_ok:
        log.error("cross-objective matrix is not diagonal-minimal")
        return EXIT_ERROR
    return EXIT_OK


def _print_matrix(mat: np.ndarray, network: str | None) -> None:
    head = "".join(f"{'sol ' + p:>12}" for p in PROBLEMS)
    print(f"{'':10}{head}", file=sys.stderr)
    for i, p in enumerate(PROBLEMS):
        print(f"{'obj ' + p:10}" + "".join(f"{v:12.4f}" for v in mat[i]), file=sys.stderr)
    if network:
        print(f"reference ({network}):", file=sys.stderr)
        for i, p in enumerate(PROBLEMS):
            print(f"{'obj ' + p:10}" + "".join(f"{v:12.4f}" for v in CROSS_OBJECTIVES[network][i]), file=sys.stderr)


HANDLERS = {
    "centrality": cmd_centrality,
    "solve": cmd_solve,
    "bounds": cmd_bounds,
    "verify": cmd_verify,
    "export": cmd_export,
    "reproduce": cmd_reproduce,
}


def run(cfg: RunConfig) -> int:
    try:
        return HANDLERS[cfg.command](cfg)
    except NotStronglyConnectedError as exc:
        print(f"icx: {exc}", file=sys.stderr)
        return EXIT_NOT_SCC
    except InfeasibleError as exc:
        print(f"icx: {exc}", file=sys.stderr)
        return EXIT_EPSILON
    except (GraphError, ValueError, OSError, RuntimeError) as exc:
        print(f"icx: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="icx: %(message)s")
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        print(f"icx: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

import numpy as np
import pytest

from invcent import (CentralitySpec, build_system, cross_objective_matrix, lemma_bounds, objective_value,
                     parse_edge_list, solve, solve_all, solve_p1, solve_p2, solve_p3, solve_p4, solve_p5,
                     solve_p5_oracle, solve_p6_closed_form, solve_p6_oracle)
from invcent.solvers import (PROBLEMS, NodeRow, normalize_problem, p1_row, p2_row, p3_row, p4_row, p5_feasible,
                             p6_plan)

from instances import near_forward_instance, random_instance
from oracles import row_p1_lp, row_p2_active_sets, row_p3_lp, row_p4_lp


def make_row(coeffs, rhs, tails=None):
    coeffs = np.asarray(coeffs, float)
    tails = tuple(range(1, len(coeffs) + 1)) if tails is None else tuple(tails)
    return NodeRow(head=99, tails=tails, arcs=np.arange(len(coeffs)), coeffs=coeffs, rhs=float(rhs))


def random_row(rng):
    k = int(rng.integers(1, 6))
    c = rng.uniform(0.05, 1.0, k)
    scale = rng.choice([rng.uniform(0.2, 0.99), 1.0, rng.uniform(1.01, 2.5)])
    rhs = scale * c.sum()
    eps = min(1e-3, 0.5 * rhs / c.sum())
    return make_row(c, rhs), eps


def test_normalize_problem():
    assert normalize_problem("p3") == "P3"
    assert normalize_problem("6") == "P6"
    with pytest.raises(ValueError):
        normalize_problem("p7")


# --- per-row solutions against small exact oracles -----------------------

def test_p1_row_examples():
    row = make_row([0.2, 0.5, 0.3], 1.2)   # deficit +0.2 -> biggest coefficient moves
    np.testing.assert_allclose(p1_row(row, 1e-3), [1, 1.4, 1])
    row = make_row([0.2, 0.5, 0.3], 0.4)   # deficit -0.6: drain 0.5 then 0.3
    w = p1_row(row, 1e-3)
    assert w[1] == pytest.approx(1e-3)
    assert row.coeffs @ w == pytest.approx(0.4)
    assert w[0] == 1.0


def test_p1_tie_break_smallest_tail():
    row = make_row([0.5, 0.5], 1.5, tails=(3, 7))
    np.testing.assert_allclose(p1_row(row, 1e-3), [2.0, 1.0])


def test_p2_single_arc_forced():
    w, _ = p2_row(make_row([0.5], 0.25), 1e-3)
    np.testing.assert_allclose(w, [0.5])
    assert ((w - 1) ** 2).sum() == pytest.approx(0.25)


def test_p2_unconstrained_projection():
    c = np.array([0.3, 0.5, 0.2])
    row = make_row(c, 0.8)
    w, lam = p2_row(row, 1e-3)
    np.testing.assert_allclose(w, 1 + (0.8 - 1.0) * c / (c @ c))


def test_p3_uniform_shift():
    np.testing.assert_allclose(p3_row(make_row([1, 1], 3), 1e-3), [1.5, 1.5])


def test_p4_mass_on_min_ratio():
    row = make_row([0.2, 0.4], 0.5)
    w = p4_row(row, 1e-3, np.array([1.0, 1.0]))
    np.testing.assert_allclose(w, [1e-3, (0.5 - 0.2e-3) / 0.4])
    w = p4_row(row, 1e-3, np.array([0.1, 1.0]))
    assert w[1] == 1e-3


@pytest.mark.parametrize("seed", range(3))
def test_rows_match_oracles(seed):
    rng = np.random.default_rng(seed)
    for _ in range(40):
        row, eps = random_row(rng)
        c, b = row.coeffs, row.rhs
        w1 = p1_row(row, eps)
        assert np.abs(w1 - 1).sum() == pytest.approx(row_p1_lp(c, b, eps), abs=1e-10)
        w3 = p3_row(row, eps)
        assert np.abs(w3 - 1).max() == pytest.approx(row_p3_lp(c, b, eps), abs=1e-10)
        beta = rng.uniform(0.5, 2, row.k)
        w4 = p4_row(row, eps, beta)
        assert beta @ w4 == pytest.approx(row_p4_lp(c, b, eps, beta), abs=1e-10)
        w2, _ = p2_row(row, eps)
        assert ((w2 - 1) ** 2).sum() == pytest.approx(row_p2_active_sets(c, b, eps), abs=1e-12)
        for w in (w1, w2, w3, w4):
            assert c @ w == pytest.approx(b, abs=1e-12)
            assert np.all(w >= eps - 1e-15)


def test_rows_with_large_floor():
    # eps above 1 is admissible when every row has spare mass
    row = make_row([0.3, 0.2], 1.0)
    eps = 1.5
    w1 = p1_row(row, eps)
    assert np.abs(w1 - 1).sum() == pytest.approx(row_p1_lp_large(row, eps))
    w2, _ = p2_row(row, eps)
    assert ((w2 - 1) ** 2).sum() == pytest.approx(row_p2_active_sets(row.coeffs, row.rhs, eps), abs=1e-12)
    assert np.all(w2 >= eps)


def row_p1_lp_large(row, eps):
    # all weights >= eps > 1, so the cost is sum(w) - k; min sum(w) puts the excess on max c
    c = row.coeffs
    top = int(np.argmax(c))
    w = np.full(row.k, eps)
    w[top] = (row.rhs - eps * (c.sum() - c[top])) / c[top]
    return float(np.abs(w - 1).sum())


# --- P6 -------------------------------------------------------------------

def test_p6_plan_invariants():
    rng = np.random.default_rng(5)
    for _ in range(100):
        row, eps = random_row(rng)
        plan = p6_plan(row, eps)
        c = row.coeffs[list(plan.order)]
        assert list(c) == sorted(c)
        assert 0 <= plan.h <= row.k - 1
        assert c[:plan.h].sum() + eps * c[plan.h:].sum() <= row.rhs * (1 + 1e-12)
        assert plan.d == (row.k if row.balanced else plan.h)


def test_p6_oracle_trivial_cases():
    g = parse_edge_list("1 2\n2 1")
    s = build_system(g, CentralitySpec([0.5, 0.5], 1.0, 1e-3))
    assert solve_p6_oracle(s) == 0
    assert solve_p6_closed_form(s).objective == 0


def test_p6_two_equal_tails_stay_at_one():
    # node 3 has BS = {1, 2}, c1 = c2 = 1 and rho c3 = 2
    g = parse_edge_list("1 3\n2 3\n3 1\n3 2")
    s = build_system(g, CentralitySpec([1.0, 1.0, 2.0], 1.0, 1e-3))
    row3 = s.rows[2]
    assert p6_plan(row3, 1e-3).d == 2


@pytest.mark.parametrize("seed", range(4))
def test_p6_closed_form_matches_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    for _ in range(25):
        s = random_instance(rng, 7) if seed % 2 else near_forward_instance(rng, 7)
        sol = solve_p6_closed_form(s)
        assert sol.objective == solve_p6_oracle(s)
        assert sol.objective == sol.diagnostics["closed_form_objective"]


def test_p6_rejects_floor_at_one():
    g = parse_edge_list("1 2\n2 1")
    s = build_system(g, CentralitySpec([1.0, 1.0], 3.0, 1.5))
    with pytest.raises(ValueError):
        solve_p6_closed_form(s)


# --- P5 -------------------------------------------------------------------

def test_p5_balanced_instance_is_empty():
    g = parse_edge_list("1 2\n2 3\n3 1\n1 3")
    from invcent import power_iteration
    fwd = power_iteration(g)
    s = build_system(g, CentralitySpec(fwd.c, fwd.rho, 1e-3))
    sol = solve_p5(s)
    assert sol.objective == 0
    np.testing.assert_array_equal(sol.w, np.ones(g.m))


@pytest.mark.parametrize("seed", range(4))
def test_p5_matches_exhaustive(seed):
    rng = np.random.default_rng(200 + seed)
    for _ in range(15):
        s = random_instance(rng, 9) if seed % 2 else near_forward_instance(rng, 9)
        sol = solve_p5(s)
        assert sol.objective == solve_p5_oracle(s)
        assert objective_value("P5", s, sol.w) == sol.objective
        assert p5_feasible(s, sol.diagnostics["active_nodes"])


def test_p5_returns_lexicographically_smallest_optimum():
    rng = np.random.default_rng(7)
    import itertools
    for _ in range(20):
        s = near_forward_instance(rng, 7)
        sol = solve_p5(s)
        k = int(sol.objective)
        first = next(sub for sub in itertools.combinations(range(1, s.n + 1), k) if p5_feasible(s, sub))
        assert tuple(sol.diagnostics["active_nodes"]) == first


def test_p5_oracle_size_guard():
    rng = np.random.default_rng(0)
    s = random_instance(rng, 14, n_min=14)
    with pytest.raises(ValueError):
        solve_p5_oracle(s)


# --- whole-solution invariants -------------------------------------------

def _instances(seed, count, n_max=7):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        out.append(random_instance(rng, n_max) if i % 2 else near_forward_instance(rng, n_max))
    return out


@pytest.mark.parametrize("s", _instances(300, 12))
def test_feasibility_caps_and_bounds(s):
    lem = lemma_bounds(s)
    for tag in PROBLEMS:
        sol = solve(s, tag)
        assert sol.residual_inf <= 1e-8
        assert np.all(sol.w >= s.epsilon - 1e-12)
        assert np.all(sol.w <= lem.caps + 1e-9)
        assert lem.check(s, sol.w)
        if tag != "P5":
            assert sol.objective == pytest.approx(objective_value(tag, s, sol.w), abs=1e-10)
        assert sol.bounds.contains(sol.objective)


@pytest.mark.parametrize("s", _instances(400, 12))
def test_cross_optimality(s):
    sols = solve_all(s)
    mat = cross_objective_matrix(s, sols)
    for p in range(6):
        assert mat[p, p] <= mat[p].min() + 1e-9


@pytest.mark.parametrize("lam", [1e-3, 1e3])
def test_scaling_invariance(lam):
    for s in _instances(500, 8):
        scaled = build_system(s.graph, CentralitySpec(lam * s.c, s.rho, s.epsilon))
        for tag in PROBLEMS:
            a, b = solve(s, tag), solve(scaled, tag)
            np.testing.assert_allclose(b.w, a.w, atol=1e-9)
            assert b.objective == pytest.approx(a.objective, abs=1e-9)


def test_forced_single_arc_rows_identical(system8):
    sols = solve_all(system8)
    for row in system8.rows:
        if row.k == 1:
            vals = {float(s.w[row.arcs[0]]) for s in sols.values()}
            assert len(vals) == 1


def test_p4_beta_validation(system8):
    with pytest.raises(ValueError):
        solve_p4(system8, np.zeros(system8.m))
    with pytest.raises(ValueError):
        solve_p4(system8, np.ones(3))


def test_identity_target_gives_unit_weights(graph8, forward8):
    s = build_system(graph8, CentralitySpec(forward8.c, forward8.rho, 1e-3))
    for sol in (solve_p1(s), solve_p2(s), solve_p3(s), solve_p5(s), solve_p6_closed_form(s)):
        assert sol.objective == 0
        np.testing.assert_array_equal(sol.w, np.ones(graph8.m))
    p4 = solve_p4(s)
    # P4 at the forced solution: per node rho c_j / max c_i on one arc, eps on the rest
    expected = sum((row.rhs - 1e-3 * (row.coeffs.sum() - row.coeffs.max())) / row.coeffs.max()
                   + 1e-3 * (row.k - 1) for row in s.rows)
    assert p4.objective == pytest.approx(expected, rel=1e-12)

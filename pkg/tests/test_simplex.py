import random
from dataclasses import replace

import pytest

from coverpack.genbench import gen_random_cpip
from coverpack.model import normalize_width, parse_instance
from coverpack.simplex import (
    GE,
    IterationLimitError,
    LpProblem,
    NumericalInstabilityError,
    dual_objective,
    lp_from_instance,
    solve_lp,
    verify_certificate,
)
from conftest import F, vertex_enum_optimum


GAP_DOC = '{"A": [[0.9, 1]], "a": [1], "c": [0, 1], "d": [1, null]}'


def test_gap_instance_relaxation():
    p = lp_from_instance(parse_instance(GAP_DOC))
    s = solve_lp(p)
    assert s.status == "OPTIMAL"
    assert s.objective_value == F(1, 10)
    assert s.primal.values == (F(1), F(1, 10))
    assert verify_certificate(p, s, 0) == []


def test_contradictory_bounds_infeasible_with_ray():
    p = LpProblem.from_data([0], [((1,), GE, 1)], [F(1, 2)])
    s = solve_lp(p)
    assert s.status == "INFEASIBLE"
    # Farkas: combining rows by the ray proves 0 >= positive demand.
    combo = s.ray_rows[0] * p.rows[0].coeffs[0] + s.ray_bounds[0]
    assert combo <= 0
    rhs_combo = s.ray_rows[0] * p.rows[0].rhs + s.ray_bounds[0] * p.var_bounds[0]
    assert rhs_combo > 0
    assert s.ray_rows[0] >= 0  # >= row
    assert s.ray_bounds[0] <= 0  # upper bound


def test_matches_vertex_enumeration_oracle():
    # 200 random instances, sized so exhaustive vertex enumeration stays honest
    rng = random.Random(2024)
    for trial in range(200):
        n = 4 if trial % 10 == 0 else rng.randint(1, 3)
        m = rng.randint(1, 5)
        r = rng.randint(0, 2)
        inst = gen_random_cpip(m, n, r, seed=trial, d_max=3)
        p = lp_from_instance(inst)
        s = solve_lp(p)
        assert s.status == "OPTIMAL"
        assert verify_certificate(p, s, 0) == []
        assert s.objective_value == vertex_enum_optimum(p)


def test_matches_scipy_on_larger_instances():
    scipy_opt = pytest.importorskip("scipy.optimize")
    rng = random.Random(77)
    for trial in range(50):
        m, n, r = rng.randint(2, 10), rng.randint(2, 10), rng.randint(0, 3)
        inst = gen_random_cpip(m, n, r, seed=1000 + trial)
        p = lp_from_instance(inst)
        s = solve_lp(p)
        assert s.status == "OPTIMAL"
        A_ub, b_ub = [], []
        for row in p.rows:
            sign = -1 if row.sense == GE else 1
            A_ub.append([sign * float(v) for v in row.coeffs])
            b_ub.append(sign * float(row.rhs))
        bounds = [(0, None if u is None else float(u)) for u in p.var_bounds]
        res = scipy_opt.linprog(
            [float(v) for v in p.objective],
            A_ub=A_ub,
            b_ub=b_ub,
            bounds=bounds,
            method="highs",
        )
        assert res.status == 0
        mine = float(s.objective_value)
        assert abs(mine - res.fun) <= 1e-6 * (1 + abs(mine))


def test_certificate_flags_perturbed_primal():
    p = lp_from_instance(parse_instance(GAP_DOC))
    s = solve_lp(p)
    bad = replace(
        s, primal=type(s.primal)((F(1), F(1, 10) - F(1, 1000)))
    )
    report = verify_certificate(p, bad, 1e-7)
    kinds = {v.kind for v in report}
    assert "primal_row" in kinds  # the tight covering row is named
    assert any(v.kind == "primal_row" and v.index == 0 for v in report)


def test_certificate_flags_gap():
    p = lp_from_instance(parse_instance(GAP_DOC))
    s = solve_lp(p)
    bad = replace(s, objective_value=s.objective_value + 1)
    assert any(v.kind == "duality_gap" for v in verify_certificate(p, bad, 1e-7))


def test_duality_gap_zero_exactly():
    for seed in range(10):
        inst = gen_random_cpip(4, 4, 1, seed=seed)
        p = lp_from_instance(inst)
        s = solve_lp(p)
        assert s.objective_value == dual_objective(p, s)


def test_deterministic():
    inst = gen_random_cpip(5, 6, 2, seed=3)
    p = lp_from_instance(inst)
    s1, s2 = solve_lp(p), solve_lp(p)
    assert s1 == s2


def test_adding_row_never_decreases_optimum():
    inst = normalize_width(gen_random_cpip(3, 4, 0, seed=9))
    p = lp_from_instance(inst)
    base = solve_lp(p).objective_value
    # demand a little more of everything
    extra = ((F(1),) * inst.n, GE, F(1))
    p2 = LpProblem.from_data(p.objective, list(p.rows) + [extra], p.var_bounds)
    assert solve_lp(p2).objective_value >= base


def test_unbounded_detected():
    p = LpProblem.from_data([-1, 0], [((0, 1), "<=", 5)], [None, None])
    assert solve_lp(p).status == "UNBOUNDED"


def test_iteration_limit_carries_bound():
    inst = gen_random_cpip(6, 6, 2, seed=4)
    p = lp_from_instance(inst)
    with pytest.raises(IterationLimitError) as err:
        solve_lp(p, max_iters=1)
    assert err.value.best_objective is not None


def test_non_finite_input_rejected():
    with pytest.raises(NumericalInstabilityError):
        LpProblem.from_data([float("inf")], [], [None])

import random

from coverpack.genbench import gen_random_cpip, knapsack_gap
from coverpack.kc import floor_bounds, kc_system
from coverpack.model import IntegerVector, dot, normalize_width
from coverpack.oracle import (
    OracleBudget,
    SolveReport,
    brute_force_opt,
    check_kc_validity,
    check_solution,
    effective_bounds,
    validate_kc_system,
)
from conftest import F, make_inst


class TestBruteForce:
    def test_gap_instance_lex_tiebreak(self):
        res = brute_force_opt(knapsack_gap(F(1, 10)))
        assert res.status == "OPTIMAL"
        assert res.cost == 1
        # (0,1) and (1,1) both cost 1; lexicographic order keeps (0,1)
        assert res.x.values == (0, 1)

    def test_zero_demand_gives_zero_vector(self):
        inst = make_inst(A=[[1, 1]], a=[0], c=[1, 1], d=[3, 3])
        res = brute_force_opt(inst)
        assert res.cost == 0
        assert res.x.values == (0, 0)

    def test_unbounded_variable_capped_by_demand(self):
        inst = make_inst(A=[["1/2", 1]], a=[1], c=[0, 1], d=[None, None])
        bounds = effective_bounds(inst)
        assert bounds == (2, 1)  # ceil(1/(1/2)), ceil(1/1)
        res = brute_force_opt(inst)
        assert res.cost == 0
        assert res.x.values == (2, 0)

    def test_budget_refusal_reports_space(self):
        inst = make_inst(A=[[1] * 4], a=[3], c=[1] * 4, d=[9] * 4)
        res = brute_force_opt(inst, OracleBudget(max_points=100))
        assert res.status == "BUDGET_EXCEEDED"
        assert res.space_size == 10**4

    def test_infeasible_detected(self):
        inst = make_inst(
            A=[[1, 1]], a=[5], c=[1, 1], d=[1, 1], B=[[1, 1]], b=[1]
        )
        assert brute_force_opt(inst).status == "INFEASIBLE"

    def test_lower_bounds_every_feasible_solver_output(self):
        # without packing rows the strict output is fully feasible, so the
        # enumerated optimum is a true floor on its cost
        from coverpack.kc import solve_cip_strict

        for seed in range(15):
            inst = normalize_width(gen_random_cpip(2, 4, 0, seed=800 + seed, d_max=3))
            xhat, report = solve_cip_strict(inst, 1)
            oracle = brute_force_opt(inst)
            assert oracle.status == "OPTIMAL"
            assert report.cost >= oracle.cost


class TestCheckSolution:
    def test_feasible_strict_solution_clean(self):
        inst = knapsack_gap(F(1, 10))
        report = check_solution(inst, IntegerVector((1, 1)), F(1))
        assert report.ok_strict and report.ok_bicriteria

    def test_relaxed_multiplicity_violation_names_variable(self):
        inst = make_inst(A=[[1, 1]], a=[1], c=[1, 1], d=[1, 1])
        # ceil((1+1) * 1) = 2, so 3 exceeds the relaxed cap by 1
        report = check_solution(inst, IntegerVector((3, 0)), F(1))
        assert report.multiplicity_relaxed == ((0, F(1)),)
        assert report.multiplicity_strict == ((0, F(2)),)

    def test_mutations_always_detected(self):
        # checker completeness: perturb a known-feasible solution in every
        # family direction and demand a named violation
        rng = random.Random(13)
        for seed in range(10):
            inst = normalize_width(gen_random_cpip(2, 3, 1, seed=900 + seed, d_max=3))
            res = brute_force_opt(inst)
            if res.status != "OPTIMAL":
                continue
            base = list(res.x.values)
            eps = F(1, 2)
            clean = check_solution(inst, IntegerVector(tuple(base)), eps)
            assert clean.ok_strict
            # drop coverage below a tight row
            i = rng.randrange(inst.m)
            j = max(range(inst.n), key=lambda k: inst.A[i][k])
            need = dot(inst.A[i], base) - inst.a[i]
            drop = int(need / inst.A[i][j]) + 1
            lowered = base.copy()
            lowered[j] = max(0, lowered[j] - drop)
            if dot(inst.A[i], lowered) < inst.a[i]:
                assert check_solution(inst, IntegerVector(tuple(lowered)), eps).covering
            # exceed a multiplicity bound
            bumped = base.copy()
            j = rng.randrange(inst.n)
            bumped[j] = int((1 + eps) * inst.d[j]) + 2
            report = check_solution(inst, IntegerVector(tuple(bumped)), eps)
            assert any(v[0] == j for v in report.multiplicity_relaxed)


class TestKcValidity:
    def test_gap_instance_all_pin_sets_valid(self):
        report = check_kc_validity(knapsack_gap(F(1, 10)))
        assert report.status == "OK"
        assert report.checked_sets == 2  # subsets of the finite-bound variable

    def test_empty_pin_set_matches_original_rows(self):
        inst = make_inst(A=[[1, 1]], a=[1], c=[1, 1], d=[1, 1])
        system = kc_system(inst, frozenset(), floor_bounds(inst))
        assert system.A_F == inst.A and system.a_F == inst.a
        assert check_kc_validity(inst).status == "OK"

    def test_budget_refusal(self):
        inst = make_inst(A=[[1] * 6], a=[3], c=[1] * 6, d=[2] * 6)
        report = check_kc_validity(inst, OracleBudget(max_points=50))
        assert report.status == "BUDGET_EXCEEDED"

    def test_skipping_truncation_is_flagged(self):
        # corrupted system: raw coefficients where the residual demand is
        # smaller; the width check must name the offending entry
        inst = knapsack_gap(F(1, 4))
        df = floor_bounds(inst)
        system = kc_system(inst, {0}, df)
        raw = tuple(
            tuple(F(0) if j in {0} else inst.A[i][j] for j in range(inst.n))
            for i in range(inst.m)
        )
        assert raw[0][1] > system.a_F[0]
        bad, defects = validate_kc_system(inst, frozenset({0}), raw, system.a_F, [])
        assert defects and defects[0][1] == 0 and defects[0][2] == 1

    def test_inflated_residual_is_caught_by_feasible_point(self):
        # corrupted residual demand: a feasible integer point must violate it
        inst = knapsack_gap(F(1, 4))
        df = floor_bounds(inst)
        system = kc_system(inst, {0}, df)
        inflated = tuple(v + 1 for v in system.a_F)
        feasible = [(1, 1), (0, 1)]
        bad, _ = validate_kc_system(inst, frozenset({0}), system.A_F, inflated, feasible)
        assert bad

    def test_random_small_instances_valid(self):
        for seed in range(15):
            inst = normalize_width(gen_random_cpip(2, 3, 0, seed=40 + seed, d_max=2))
            assert check_kc_validity(inst).status == "OK"


def test_report_serializes_rationals():
    report = SolveReport(mode="lp", cost=F(1, 3), fopt=F(2), elapsed_s=0.25)
    d = report.to_dict()
    assert d["cost"] == "1/3"
    assert d["fopt"] == 2
    assert "opt" not in d

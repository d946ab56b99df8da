"""Knapsack-cover cuts and the solver that meets multiplicity bounds exactly.

For a set F of variables imagined pinned at their (floored) bounds, each
covering row keeps a residual demand

    a_F[i] = max(0, a[i] - sum_{j in F} A[i][j] d'[j])

and truncated coefficients A_F[i][j] = min(A[i][j], a_F[i]) for j not in
F (zero on F itself).  The inequalities A_F x >= a_F hold for every
integer point satisfying the covering and multiplicity constraints, and
adding them can close the (arbitrarily large) integrality gap of the
plain relaxation.  Truncation keeps the width of every residual row at
least 1, which is what lets the rounding machinery run on the residual
system at full strength.

Because there are exponentially many sets F, the relaxation is solved to
lambda-relaxed form by a cutting-plane loop: solve the current LP,
separate cuts for the set of variables at least d'/lambda in the current
point, add them, repeat.  Only valid rows are ever added, so every
iterate's value is a lower bound on the cut-strengthened relaxation
optimum, and there are finitely many (F, row) pairs, so the loop
terminates.

``solve_cip_strict`` then pins the high variables of a (1+eps)-relaxed
point at their floored bounds and rounds the rest against the residual
system, giving an integer solution with x <= d exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from coverpack.model import (
    CoverpackError,
    CpipInstance,
    FractionalVector,
    InstanceError,
    IntegerVector,
    Matrix,
    Vector,
    dot,
    is_width_normalized,
)
from coverpack.oracle import SolveReport, Timer, check_solution
from coverpack.simplex import (
    InfeasibleError,
    lp_from_instance,
    solve_lp,
    verify_certificate,
)
from coverpack.rounding import bicriteria_round

ZERO = Fraction(0)


class CutLoopLimitError(CoverpackError):
    """Cutting-plane round limit hit; carries the last iterate and leftovers."""

    def __init__(self, message, last_x, outstanding):
        super().__init__(message)
        self.last_x = last_x
        self.outstanding = outstanding


@dataclass(frozen=True)
class KcSystem:
    """Residual covering system for a pinned set F."""

    F: frozenset
    a_F: Vector
    A_F: Matrix


@dataclass(frozen=True)
class PinningPlan:
    """Working data for the strict solver: floored bounds, pinned set, residual vectors."""

    d_floor: tuple[int | None, ...]
    F: frozenset
    d_doubleprime: Vector
    xbar_restricted: FractionalVector


def floor_bounds(inst: CpipInstance) -> tuple[int | None, ...]:
    """d' = floor(d); unbounded entries stay unbounded.

    Leaves the integer solution set untouched, since integer x satisfies
    x_j <= d_j iff x_j <= floor(d_j).
    """
    return tuple(None if v is None else floor(v) for v in inst.d)


def residual_demand(inst: CpipInstance, F, d_floor) -> Vector:
    """a_F[i] = max(0, a[i] - sum_{j in F} A[i][j] d'[j])."""
    for j in F:
        if d_floor[j] is None:
            raise InstanceError(f"cannot pin variable {j}: its multiplicity is unbounded")
    return tuple(
        max(ZERO, inst.a[i] - sum((inst.A[i][j] * d_floor[j] for j in F), ZERO))
        for i in range(inst.m)
    )


def kc_system(inst: CpipInstance, F, d_floor) -> KcSystem:
    """Residual system: coefficients truncated at the residual demand, zero on F."""
    F = frozenset(F)
    a_F = residual_demand(inst, F, d_floor)
    A_F = tuple(
        tuple(
            ZERO if j in F else min(inst.A[i][j], a_F[i]) for j in range(inst.n)
        )
        for i in range(inst.m)
    )
    return KcSystem(F=F, a_F=a_F, A_F=A_F)


def cut_rows(system: KcSystem) -> list[tuple[int, Vector, Fraction]]:
    """Rows worth emitting: positive residual demand only (others are vacuous)."""
    return [
        (i, system.A_F[i], system.a_F[i])
        for i in range(len(system.a_F))
        if system.a_F[i] > 0
    ]


def high_set(x, d_floor, lam, margin=ZERO) -> frozenset:
    """Variables at or above d'/lambda in x (finite bounds only).

    ``margin`` relaxes the threshold multiplicatively toward inclusion;
    float-mode pipelines use 1e-12 so borderline coordinates are pinned,
    the safe direction for the multiplicity guarantee.
    """
    lam = Fraction(lam)
    scale = (1 - Fraction(margin)) / lam
    return frozenset(
        j
        for j in range(len(d_floor))
        if d_floor[j] is not None and Fraction(x[j]) >= Fraction(d_floor[j]) * scale
    )


def find_violated_kc(
    inst: CpipInstance, x, lam, d_floor, tol=ZERO, margin=ZERO
) -> list[tuple[frozenset, int, Fraction]]:
    """Residual rows the point violates, for its own high-variable set.

    Empty means x satisfies the cut family required of a lambda-relaxed
    solution.
    """
    lam = Fraction(lam)
    if lam <= 1:
        raise InstanceError(f"lambda = {lam} must exceed 1")
    xv = tuple(Fraction(v) for v in x)
    F = high_set(xv, d_floor, lam, margin)
    system = kc_system(inst, F, d_floor)
    out = []
    for i, coeffs, rhs in cut_rows(system):
        lhs = dot(coeffs, xv)
        if lhs < rhs - tol:
            out.append((F, i, rhs - lhs))
    return out


def solve_lp_kc(
    inst: CpipInstance,
    lam,
    max_rounds: int = 1000,
    *,
    tol=ZERO,
    margin=ZERO,
    info: dict | None = None,
) -> FractionalVector:
    """Lambda-relaxed point for the cut-strengthened relaxation.

    Returns x with A x >= a, B x <= b, x <= d', no violated residual rows
    for its own high set, and cost at most the optimum of the relaxation
    with all cuts (each round solves a relaxation of that program, and
    values only grow as cuts are added).
    """
    lam = Fraction(lam)
    if lam <= 1:
        raise InstanceError(f"lambda = {lam} must exceed 1")
    if max_rounds < 1:
        raise InstanceError(f"max_rounds = {max_rounds} must be >= 1")
    if not is_width_normalized(inst):
        raise InstanceError("normalize width first")
    d_floor = floor_bounds(inst)
    bounds = tuple(None if v is None else Fraction(v) for v in d_floor)
    cuts: list[tuple[Vector, Fraction]] = []
    seen: set[tuple[frozenset, int]] = set()
    last_objective = None
    pin_sets: list[tuple[int, ...]] = []
    for round_no in range(1, max_rounds + 1):
        problem = lp_from_instance(inst, upper_bounds=bounds, cut_rows=cuts)
        sol = solve_lp(problem)
        if sol.status == "INFEASIBLE":
            raise InfeasibleError("no fractional solution", sol)
        if sol.status != "OPTIMAL":
            raise InstanceError(f"relaxation returned {sol.status}")
        # only valid rows were added, so values never decrease
        assert last_objective is None or sol.objective_value >= last_objective
        last_objective = sol.objective_value
        x = sol.primal
        violated = find_violated_kc(inst, x, lam, d_floor, tol=tol, margin=margin)
        fresh = [(F, i, amt) for F, i, amt in violated if (F, i) not in seen]
        if not fresh:
            if info is not None:
                info.update(
                    {
                        "rounds": round_no,
                        "cut_rows_added": len(cuts),
                        "pin_sets_seen": tuple(pin_sets),
                        "objective": sol.objective_value,
                        "problem": problem,
                        "solution": sol,
                    }
                )
            return x
        Fset = fresh[0][0]  # one separation call, one high set
        system = kc_system(inst, Fset, d_floor)
        for _, i, _ in fresh:
            cuts.append((system.A_F[i], system.a_F[i]))
            seen.add((Fset, i))
        fs = tuple(sorted(Fset))
        if fs not in pin_sets:
            pin_sets.append(fs)
    raise CutLoopLimitError(
        f"no lambda-relaxed point after {max_rounds} rounds",
        last_x=x,
        outstanding=violated,
    )


def pinning_plan(inst: CpipInstance, xbar, epsilon, *, margin=ZERO) -> PinningPlan:
    """Pin set and residual vectors for a fractional point at slack epsilon.

    F collects every finite-bound variable with xbar_j >= d'_j / (1+eps);
    variables with d'_j = 0 always land in F (pinned to zero).  The margin
    must match the one used when certifying the point's cuts, so that the
    pinned set is exactly the certified one.
    """
    eps = Fraction(epsilon)
    d_floor = floor_bounds(inst)
    xv = tuple(Fraction(v) for v in xbar)
    F = high_set(xv, d_floor, 1 + eps, margin)
    d_dp = tuple(ZERO if j in F else xv[j] for j in range(inst.n))
    return PinningPlan(
        d_floor=d_floor,
        F=F,
        d_doubleprime=d_dp,
        xbar_restricted=FractionalVector(d_dp),
    )


def solve_cip_strict(
    inst: CpipInstance, epsilon, *, arithmetic: str = "rational", max_rounds: int = 1000
) -> tuple[IntegerVector, SolveReport]:
    """Integer solution meeting the multiplicity constraints exactly.

    Pipeline: take a (1+eps)-relaxed point xbar of the cut-strengthened
    relaxation, pin every variable with xbar_j >= d'_j/(1+eps) at d'_j,
    and round the rest against the residual system (whose width is at
    least 1 by truncation).  Guarantees, all checked exactly: A xhat >= a,
    xhat <= d with zero tolerance, B xhat <= (1+eps) b + beta, and
    cost <= (1 + eps + 4K) times the relaxed point's cost.
    """
    eps = Fraction(epsilon)
    if not (0 < eps <= 1):
        raise InstanceError(f"epsilon {eps} outside (0, 1]")
    if not is_width_normalized(inst):
        raise InstanceError("normalize width first")
    lam = 1 + eps
    # the same inclusion margin must govern cut separation and pinning
    margin = Fraction(1, 10**12) if arithmetic == "float" else ZERO
    with Timer() as timer:
        kc_info: dict = {}
        xbar = solve_lp_kc(inst, lam, max_rounds=max_rounds, margin=margin, info=kc_info)
        certificate_ok = not verify_certificate(
            kc_info["problem"], kc_info["solution"], 0
        )
        plan = pinning_plan(inst, xbar, eps, margin=margin)
        system = kc_system(inst, plan.F, plan.d_floor)
        xres = plan.xbar_restricted
        residual_rows = cut_rows(system)
        for i, coeffs, rhs in residual_rows:
            # the relaxed point satisfies its own cuts, so this cannot fail
            assert dot(coeffs, xres.values) >= rhs, f"residual row {i} uncovered"

        info: dict = {}
        if residual_rows:
            A_res = tuple(coeffs for _, coeffs, _ in residual_rows)
            a_res = tuple(rhs for _, _, rhs in residual_rows)
            xhat_rest = bicriteria_round(
                xres, A_res, a_res, inst.c, plan.d_doubleprime, eps, info_out=info
            )
        else:
            xhat_rest = IntegerVector(tuple(0 for _ in range(inst.n)))
            info = {"K": 0, "L": Fraction(1)}

        xhat = IntegerVector(
            tuple(
                plan.d_floor[j] if j in plan.F else xhat_rest[j]
                for j in range(inst.n)
            )
        )
        relaxed_cost = dot(inst.c, xbar.values)
        pinned_cost = sum((inst.c[j] * plan.d_floor[j] for j in plan.F), ZERO)
        assert pinned_cost <= (1 + eps) * relaxed_cost, "pinned cost above (1+eps) bound"
        cost = dot(inst.c, xhat.values)
        K = info.get("K", 0)
        assert cost <= (1 + eps + 4 * K) * relaxed_cost, "cost above the (1 + eps + 4K) bound"
        violations = check_solution(inst, xhat, eps)
        if not violations.ok_strict:
            raise InstanceError(f"strict guarantees violated: {violations}")

        # plain relaxation value, for gap reporting
        base = solve_lp(lp_from_instance(inst))
        fopt = base.objective_value if base.status == "OPTIMAL" else None
    report = SolveReport(
        mode="strict",
        arithmetic=arithmetic,
        cost=cost,
        fopt=fopt,
        fopt_kc=relaxed_cost,
        ratio_cost_fopt=float(cost / fopt) if fopt else None,
        epsilon=eps,
        lam=lam,
        K=K,
        L=info.get("L"),
        x=xhat.values,
        violations=violations,
        guarantees_ok=violations.ok_strict,
        certificate_ok=certificate_ok,
        pinned=tuple(sorted(plan.F)),
        pin_sets_seen=kc_info.get("pin_sets_seen"),
        cut_rows_added=kc_info.get("cut_rows_added"),
        lp_rounds=kc_info.get("rounds"),
        elapsed_s=timer.elapsed,
    )
    return xhat, report

"""Dense exact-arithmetic LP solver with primal/dual certificates.

Two-phase primal simplex over ``fractions.Fraction``.  Everything is
computed exactly, so an OPTIMAL result carries a primal point and a dual
vector whose objectives agree with zero gap, and an INFEASIBLE result
carries an exact Farkas ray.  Dense tableaus are fine at the scales this
package targets (a few hundred rows including cut rows).

Row order inside an ``LpProblem`` built from an instance is fixed and
documented: covering rows, then packing rows, then any cut rows in
insertion order.  Variable upper bounds are handled as bound rows after
all user rows, never as big-M terms.

Dual sign convention (minimization): duals of >= rows are >= 0, duals of
<= rows and of upper bounds are <= 0, and the dual objective is
``sum_i y_i rhs_i + sum_j ybound_j u_j``.

Solver state is confined to a single ``solve_lp`` call; concurrent
solves on distinct problems are safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from coverpack.model import (
    CoverpackError,
    CpipInstance,
    FractionalVector,
    InstanceError,
    as_fraction,
    dot,
)

GE = ">="
LE = "<="

ZERO = Fraction(0)
ONE = Fraction(1)


class LpError(CoverpackError):
    """Solver failure unrelated to problem status."""


class IterationLimitError(LpError):
    """Pivot budget exhausted; carries the best objective bound reached."""

    def __init__(self, message: str, best_objective):
        super().__init__(message)
        self.best_objective = best_objective


class NumericalInstabilityError(LpError):
    """Non-finite input detected; re-run with exact rational data."""


class InfeasibleError(CoverpackError):
    """Raised by callers that require a feasible LP."""

    def __init__(self, message: str, solution: "LpSolution | None" = None):
        super().__init__(message)
        self.solution = solution


@dataclass(frozen=True)
class LpRow:
    coeffs: tuple[Fraction, ...]
    sense: str
    rhs: Fraction


@dataclass(frozen=True)
class LpProblem:
    """min objective . x  s.t.  rows, 0 <= x_j <= var_bounds[j] (None = free above)."""

    objective: tuple[Fraction, ...]
    rows: tuple[LpRow, ...]
    var_bounds: tuple[Fraction | None, ...]

    @classmethod
    def from_data(cls, objective, rows, var_bounds) -> "LpProblem":
        def num(v, where):
            if isinstance(v, float) and (v != v or v in (float("inf"), float("-inf"))):
                raise NumericalInstabilityError(
                    f"{where} is not finite; supply exact rational data"
                )
            return as_fraction(v, where)

        obj = tuple(num(v, f"objective[{j}]") for j, v in enumerate(objective))
        n = len(obj)
        out_rows = []
        for i, row in enumerate(rows):
            coeffs, sense, rhs = (
                (row.coeffs, row.sense, row.rhs) if isinstance(row, LpRow) else row
            )
            if sense not in (GE, LE):
                raise InstanceError(f"row {i}: sense must be '>=' or '<='")
            cf = tuple(num(v, f"row {i} coeff {j}") for j, v in enumerate(coeffs))
            if len(cf) != n:
                raise InstanceError(f"row {i} has {len(cf)} coeffs, expected {n}")
            out_rows.append(LpRow(cf, sense, num(rhs, f"row {i} rhs")))
        ub = tuple(
            None if v is None else num(v, f"bound[{j}]") for j, v in enumerate(var_bounds)
        )
        if len(ub) != n:
            raise InstanceError(f"var_bounds has {len(ub)} entries, expected {n}")
        return cls(objective=obj, rows=tuple(out_rows), var_bounds=ub)


@dataclass(frozen=True)
class LpSolution:
    status: str  # OPTIMAL | INFEASIBLE | UNBOUNDED
    primal: FractionalVector | None
    objective_value: Fraction | None
    dual_rows: tuple[Fraction, ...] | None
    dual_bounds: tuple[Fraction, ...] | None
    ray_rows: tuple[Fraction, ...] | None
    ray_bounds: tuple[Fraction, ...] | None
    iterations: int


def lp_from_instance(
    inst: CpipInstance,
    upper_bounds: Sequence[Fraction | None] | None = None,
    cut_rows: Sequence[tuple[Sequence[Fraction], Fraction]] = (),
) -> LpProblem:
    """Standard relaxation of an instance plus optional >= cut rows.

    Row order: covering rows, packing rows, then cut rows in insertion
    order.  ``upper_bounds`` defaults to the instance multiplicity vector.
    """
    rows: list[tuple] = []
    for i in range(inst.m):
        rows.append((inst.A[i], GE, inst.a[i]))
    for i in range(inst.r):
        rows.append((inst.B[i], LE, inst.b[i]))
    for coeffs, rhs in cut_rows:
        rows.append((tuple(coeffs), GE, rhs))
    bounds = inst.d if upper_bounds is None else tuple(upper_bounds)
    return LpProblem.from_data(inst.c, rows, bounds)


class _Tableau:
    """Mutable simplex working state: internal rows are user rows then bound rows."""

    def __init__(self, p: LpProblem):
        n = len(p.objective)
        # Internal rows, each normalized to nonnegative rhs.  flip[i] records
        # rows multiplied by -1 so duals can be mapped back.
        senses: list[str] = []
        coeffs: list[list[Fraction]] = []
        rhs: list[Fraction] = []
        flip: list[bool] = []
        for row in p.rows:
            cf, sn, rh = list(row.coeffs), row.sense, row.rhs
            if rh < 0:
                cf = [-v for v in cf]
                rh = -rh
                sn = GE if sn == LE else LE
                flip.append(True)
            else:
                flip.append(False)
            coeffs.append(cf)
            senses.append(sn)
            rhs.append(rh)
        self.num_user_rows = len(p.rows)
        for j, u in enumerate(p.var_bounds):
            if u is None:
                continue
            cf = [ZERO] * n
            cf[j] = ONE
            coeffs.append(cf)
            senses.append(LE)
            rhs.append(u)
            flip.append(False)
        self.bound_row_var: list[int] = [
            j for j, u in enumerate(p.var_bounds) if u is not None
        ]

        R = len(coeffs)
        self.n = n
        self.slack_of = list(range(n, n + R))
        self.slack_sign = [ONE if s == LE else -ONE for s in senses]
        art_cols = [i for i in range(R) if senses[i] == GE]
        self.art_of = {}
        ncols = n + R
        for i in art_cols:
            self.art_of[i] = ncols
            ncols += 1
        self.ncols = ncols
        self.senses = senses
        self.flip = flip

        self.T: list[list[Fraction]] = []
        self.basis: list[int] = []
        self.row_ids = list(range(R))  # surviving internal-row identities
        for i in range(R):
            trow = [ZERO] * (ncols + 1)
            for j, v in enumerate(coeffs[i]):
                trow[j] = v
            trow[self.slack_of[i]] = self.slack_sign[i]
            if i in self.art_of:
                trow[self.art_of[i]] = ONE
                self.basis.append(self.art_of[i])
            else:
                self.basis.append(self.slack_of[i])
            trow[ncols] = rhs[i]
            self.T.append(trow)
        self.artificial = set(self.art_of.values())
        self.iterations = 0

    def reduced_costs(self, cost: list[Fraction]) -> tuple[list[Fraction], Fraction]:
        rc = list(cost)
        z = ZERO
        for i, bi in enumerate(self.basis):
            cb = cost[bi]
            if cb == 0:
                continue
            trow = self.T[i]
            for j in range(self.ncols):
                if trow[j] != 0:
                    rc[j] -= cb * trow[j]
            z += cb * trow[self.ncols]
        return rc, z

    def pivot(self, r: int, e: int, rc: list[Fraction]) -> Fraction:
        """Pivot basis row r on column e; updates rc and returns dz."""
        trow = self.T[r]
        piv = trow[e]
        inv = ONE / piv
        for j in range(self.ncols + 1):
            if trow[j] != 0:
                trow[j] *= inv
        for i, other in enumerate(self.T):
            if i == r or other[e] == 0:
                continue
            f = other[e]
            for j in range(self.ncols + 1):
                if trow[j] != 0:
                    other[j] -= f * trow[j]
        dz = ZERO
        if rc[e] != 0:
            f = rc[e]
            for j in range(self.ncols):
                if trow[j] != 0:
                    rc[j] -= f * trow[j]
            dz = f * trow[self.ncols]  # objective moves by rc[e] * entering value
        self.basis[r] = e
        return dz

    def run(self, cost, *, forbid, bland_after: int, max_iters: int):
        """Minimize cost over the current tableau; returns (rc, z) at optimality."""
        rc, z = self.reduced_costs(cost)
        degenerate_streak = 0
        while True:
            use_bland = degenerate_streak >= bland_after
            enter = -1
            if use_bland:
                for j in range(self.ncols):
                    if j not in forbid and rc[j] < 0:
                        enter = j
                        break
            else:
                best = ZERO
                for j in range(self.ncols):
                    if j not in forbid and rc[j] < best:
                        best = rc[j]
                        enter = j
            if enter < 0:
                return rc, z
            leave = -1
            best_ratio = None
            for i, trow in enumerate(self.T):
                aie = trow[enter]
                if aie <= 0:
                    continue
                ratio = trow[self.ncols] / aie
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and self.basis[i] < self.basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
            if leave < 0:
                return rc, None  # unbounded direction on column `enter`
            if self.iterations >= max_iters:
                raise IterationLimitError(
                    f"simplex exceeded {max_iters} pivots", best_objective=z
                )
            self.iterations += 1
            degenerate_streak = degenerate_streak + 1 if best_ratio == 0 else 0
            z += self.pivot(leave, enter, rc)


def solve_lp(
    p: LpProblem,
    *,
    bland_after: int = 40,
    max_iters: int = 50_000,
) -> LpSolution:
    """Two-phase primal simplex with exact certificates.

    Pivot rule is largest reduced-cost improvement (deterministic ties by
    lowest column index), falling back to Bland's rule after
    ``bland_after`` consecutive degenerate pivots so termination is
    guaranteed.  Same problem and configuration always yield the same
    solution.
    """
    t = _Tableau(p)
    phase1_cost = [ZERO] * t.ncols
    for col in t.artificial:
        phase1_cost[col] = ONE
    rc1, z1 = t.run(
        phase1_cost, forbid=frozenset(), bland_after=bland_after, max_iters=max_iters
    )
    if z1 is None:  # cannot happen: phase-1 objective is bounded below by 0
        raise LpError("phase 1 reported unbounded")
    if z1 > 0:
        ray = _extract_duals(t, rc1)
        ray_rows, ray_bounds = _split_duals(p, t, ray)
        return LpSolution(
            status="INFEASIBLE",
            primal=None,
            objective_value=None,
            dual_rows=None,
            dual_bounds=None,
            ray_rows=ray_rows,
            ray_bounds=ray_bounds,
            iterations=t.iterations,
        )

    _drive_out_artificials(t)

    phase2_cost = [ZERO] * t.ncols
    for j in range(t.n):
        phase2_cost[j] = p.objective[j]
    rc2, z2 = t.run(
        phase2_cost, forbid=t.artificial, bland_after=bland_after, max_iters=max_iters
    )
    if z2 is None:
        return LpSolution(
            status="UNBOUNDED",
            primal=None,
            objective_value=None,
            dual_rows=None,
            dual_bounds=None,
            ray_rows=None,
            ray_bounds=None,
            iterations=t.iterations,
        )
    x = [ZERO] * t.n
    for i, bi in enumerate(t.basis):
        if bi < t.n:
            x[bi] = t.T[i][t.ncols]
    duals = _extract_duals(t, rc2)
    dual_rows, dual_bounds = _split_duals(p, t, duals)
    return LpSolution(
        status="OPTIMAL",
        primal=FractionalVector(tuple(x)),
        objective_value=z2,
        dual_rows=dual_rows,
        dual_bounds=dual_bounds,
        ray_rows=None,
        ray_bounds=None,
        iterations=t.iterations,
    )


def _drive_out_artificials(t: _Tableau) -> None:
    """Pivot zero-valued artificials out of the basis; drop redundant rows."""
    i = 0
    while i < len(t.T):
        if t.basis[i] not in t.artificial:
            i += 1
            continue
        trow = t.T[i]
        enter = next(
            (
                j
                for j in range(t.ncols)
                if j not in t.artificial and trow[j] != 0
            ),
            -1,
        )
        if enter >= 0:
            t.pivot(i, enter, [ZERO] * t.ncols)
            i += 1
        else:
            del t.T[i], t.basis[i], t.row_ids[i]


def _extract_duals(t: _Tableau, rc: list[Fraction]) -> list[Fraction]:
    """Dual value per original internal row, from its slack reduced cost."""
    duals = [ZERO] * (t.num_user_rows + len(t.bound_row_var))
    for internal in range(len(duals)):
        # rc[slack] = -sign * y, so y = -sign * rc[slack].
        duals[internal] = -t.slack_sign[internal] * rc[t.slack_of[internal]]
    return duals


def _split_duals(p: LpProblem, t: _Tableau, duals: list[Fraction]):
    dual_rows = []
    for i in range(t.num_user_rows):
        y = duals[i]
        dual_rows.append(-y if t.flip[i] else y)
    dual_bounds = [ZERO] * t.n
    for k, j in enumerate(t.bound_row_var):
        dual_bounds[j] = duals[t.num_user_rows + k]
    return tuple(dual_rows), tuple(dual_bounds)


def dual_objective(p: LpProblem, s: LpSolution) -> Fraction:
    total = sum(
        (y * row.rhs for y, row in zip(s.dual_rows, p.rows)), ZERO
    )
    for j, u in enumerate(p.var_bounds):
        if u is not None:
            total += s.dual_bounds[j] * u
    return total


@dataclass(frozen=True)
class CertificateViolation:
    kind: str
    index: int
    amount: Fraction

    def __str__(self) -> str:
        return f"{self.kind}[{self.index}]: off by {float(self.amount):.3g}"


def verify_certificate(
    p: LpProblem, s: LpSolution, tol: float | Fraction = 0
) -> list[CertificateViolation]:
    """List every primal/dual feasibility or gap violation exceeding tol.

    An empty report certifies optimality: the primal point is feasible,
    the dual vector is sign- and constraint-feasible, and the two
    objectives agree within ``tol * (1 + |objective|)``.
    """
    if s.status != "OPTIMAL":
        raise LpError("certificates are only defined for OPTIMAL solutions")
    tol = as_fraction(tol, "tol")
    out: list[CertificateViolation] = []
    x = s.primal.values
    for j, v in enumerate(x):
        if v < -tol:
            out.append(CertificateViolation("primal_nonneg", j, -v))
    for i, row in enumerate(p.rows):
        lhs = dot(row.coeffs, x)
        gap = lhs - row.rhs if row.sense == GE else row.rhs - lhs
        if gap < -tol:
            out.append(CertificateViolation("primal_row", i, -gap))
    for j, u in enumerate(p.var_bounds):
        if u is not None and x[j] - u > tol:
            out.append(CertificateViolation("primal_bound", j, x[j] - u))
    for i, row in enumerate(p.rows):
        y = s.dual_rows[i]
        if row.sense == GE and y < -tol:
            out.append(CertificateViolation("dual_sign_row", i, -y))
        if row.sense == LE and y > tol:
            out.append(CertificateViolation("dual_sign_row", i, y))
    for j, u in enumerate(p.var_bounds):
        if u is not None and s.dual_bounds[j] > tol:
            out.append(CertificateViolation("dual_sign_bound", j, s.dual_bounds[j]))
    for j in range(len(p.objective)):
        lhs = sum(
            (s.dual_rows[i] * p.rows[i].coeffs[j] for i in range(len(p.rows))), ZERO
        )
        lhs += s.dual_bounds[j]
        if lhs - p.objective[j] > tol:
            out.append(CertificateViolation("dual_feasibility", j, lhs - p.objective[j]))
    gap = abs(s.objective_value - dual_objective(p, s))
    if gap > tol * (1 + abs(s.objective_value)):
        out.append(CertificateViolation("duality_gap", 0, gap))
    return out

"""Shared helpers: instance builders and an independent exact LP oracle."""

from __future__ import annotations

import itertools
from fractions import Fraction

from coverpack.model import CpipInstance
from coverpack.simplex import GE, LE

F = Fraction


def make_inst(A, a, c, d, B=(), b=()):
    return CpipInstance.from_data(A=A, a=a, c=c, d=d, B=B, b=b)


def gauss_solve(M, rhs):
    """Exact Gaussian elimination; None if the system is singular."""
    n = len(M)
    aug = [[F(v) for v in row] + [F(rhs[i])] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = F(1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [vr - f * vc for vr, vc in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def vertex_enum_optimum(problem):
    """Minimum objective over all basic feasible points, by brute force.

    Completely independent of the simplex implementation: every choice of
    n constraints (rows, bounds, nonnegativity) is made tight and solved
    exactly; feasible solutions compete on objective value.  Returns None
    when no vertex is feasible.
    """
    n = len(problem.objective)
    cons = []
    for row in problem.rows:
        cons.append((list(row.coeffs), row.rhs, row.sense))
    for j, u in enumerate(problem.var_bounds):
        if u is not None:
            e = [F(0)] * n
            e[j] = F(1)
            cons.append((e, u, LE))
    for j in range(n):
        e = [F(0)] * n
        e[j] = F(1)
        cons.append((e, F(0), GE))
    best = None
    for tight in itertools.combinations(range(len(cons)), n):
        M = [cons[t][0] for t in tight]
        rhs = [cons[t][1] for t in tight]
        x = gauss_solve(M, rhs)
        if x is None:
            continue
        ok = all(v >= 0 for v in x)
        if ok:
            for coeffs, r, sense in cons:
                lhs = sum(cv * xv for cv, xv in zip(coeffs, x))
                if (sense == GE and lhs < r) or (sense == LE and lhs > r):
                    ok = False
                    break
        if ok:
            val = sum(cv * xv for cv, xv in zip(problem.objective, x))
            if best is None or val < best:
                best = val
    return best

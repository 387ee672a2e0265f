"""Independent oracle and instance generator for LP solver tests.

``enumerate_optimum`` finds the true optimum of a tiny LP by brute
force over basic solutions, with no shared code with the solver under
test; ``random_problem`` draws small box-bounded instances that are
feasible most of the time.
"""

import itertools

import numpy as np

from driftplan.lpsolve import LpProblem


def enumerate_optimum(p: LpProblem, tol=1e-9):
    """Independent oracle: enumerate all basic solutions (every choice of
    active rows completed by variables pinned at bounds) and keep the
    best feasible one.  Exponential, for tiny instances only."""
    m, n = p.shape
    best = None
    row_sets = [
        rs
        for k in range(0, min(m, n) + 1)
        for rs in itertools.combinations(range(m), k)
    ]
    for rows in row_sets:
        for cols in itertools.combinations(range(n), n - len(rows)):
            free = [j for j in range(n) if j not in cols]
            if len(free) != len(rows):
                continue
            for bounds_choice in itertools.product((0, 1), repeat=len(cols)):
                x = np.zeros(n)
                for j, side in zip(cols, bounds_choice):
                    x[j] = p.ub[j] if side else p.lb[j]
                if rows:
                    Ar = p.A[np.ix_(rows, free)]
                    rhs = p.b[list(rows)] - p.A[np.ix_(rows, cols)] @ x[list(cols)]
                    try:
                        sol = np.linalg.solve(Ar, rhs)
                    except np.linalg.LinAlgError:
                        continue
                    x[free] = sol
                if (x < p.lb - tol).any() or (x > p.ub + tol).any():
                    continue
                act = p.A @ x
                ok = True
                for r in range(m):
                    if p.senses[r] == "<" and act[r] > p.b[r] + tol:
                        ok = False
                    elif p.senses[r] == ">" and act[r] < p.b[r] - tol:
                        ok = False
                    elif p.senses[r] == "=" and abs(act[r] - p.b[r]) > tol:
                        ok = False
                if not ok:
                    continue
                obj = float(p.c @ x)
                if best is None or obj < best[0]:
                    best = (obj, x.copy())
    return best


def random_problem(rng, n=None, m=None, with_eq=True):
    n = n if n is not None else int(rng.integers(2, 7))
    m = m if m is not None else int(rng.integers(1, 6))
    A = np.round(rng.normal(0.0, 2.0, size=(m, n)), 3)
    lb = np.round(rng.uniform(-5.0, 0.0, size=n), 3)
    ub = lb + np.round(rng.uniform(0.5, 6.0, size=n), 3)
    x0 = rng.uniform(lb, ub)  # keeps most instances feasible
    slackiness = rng.uniform(0.0, 2.0, size=m)
    senses = []
    b = np.empty(m)
    for r in range(m):
        kind = rng.random()
        if with_eq and kind < 0.25:
            senses.append("=")
            b[r] = A[r] @ x0
        elif kind < 0.65:
            senses.append("<")
            b[r] = A[r] @ x0 + slackiness[r]
        else:
            senses.append(">")
            b[r] = A[r] @ x0 - slackiness[r]
    c = np.round(rng.normal(0.0, 1.5, size=n), 3)
    return LpProblem(c=c, A=A, senses=np.array(senses), b=b, lb=lb, ub=ub)

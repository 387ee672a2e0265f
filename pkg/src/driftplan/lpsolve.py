"""Dense bounded-variable revised simplex.

Solves  min c.x  s.t.  A x {<=,=,>=} b,  lb <= x <= ub  with all bounds
finite (the path models guarantee this).  Each row gets a slack with
bounds derived from the row's activity range, so the slack basis is
always available and — with nonbasic columns parked on the bound matching
their cost sign — always dual feasible.  Cold solves therefore run the
dual simplex to optimality (or switch to the primal method when the
slack basis happens to be primal feasible); re-solves after a bound
change reuse the parent basis, which stays dual feasible, and typically
need only a handful of dual pivots.

The basis inverse is kept explicitly and eta-updated, with periodic
refactorization; every optimal result is verified against feasibility
and reduced-cost sign tolerances before being returned.

Pivot selection/ratio kernels live in `_kernels_py` (numpy) with an
optional compiled twin `_kernels_cy`; set DRIFTPLAN_BACKEND=py|cy to
force one.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure


def _load_backend():
    choice = os.environ.get("DRIFTPLAN_BACKEND", "").strip().lower()
    if choice in ("py", "python", "pure"):
        from . import _kernels_py as kern

        return kern, "python"
    try:
        from . import _kernels_cy as kern  # type: ignore[attr-defined]

        return kern, "compiled"
    except ImportError:
        if choice in ("cy", "compiled"):
            raise ImportError(
                "DRIFTPLAN_BACKEND requested compiled kernels but the "
                "extension is not built"
            ) from None
        from . import _kernels_py as kern

        return kern, "python"


_K, BACKEND_NAME = _load_backend()

BASIC = 0
AT_LOWER = 1
AT_UPPER = 2

FEAS_TOL = 1e-7
OPT_TOL = 1e-7
PIVOT_TOL = 1e-9
_DEGEN_STEP = 1e-10
_REFACTOR_EVERY = 64


@dataclass
class LpProblem:
    """min c.x s.t. A x (senses) b, lb <= x <= ub, all bounds finite.

    ``senses`` holds one of '<', '=', '>' per row (weak inequalities).
    """

    c: np.ndarray
    A: np.ndarray
    senses: np.ndarray
    b: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    names: list[str] | None = None

    def __post_init__(self) -> None:
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.ascontiguousarray(self.A, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.lb = np.asarray(self.lb, dtype=float)
        self.ub = np.asarray(self.ub, dtype=float)
        self.senses = np.asarray(self.senses, dtype="U1")
        m, n = self.A.shape
        if self.c.shape != (n,) or self.b.shape != (m,) or self.senses.shape != (m,):
            raise ValueError("inconsistent problem dimensions")
        if self.lb.shape != (n,) or self.ub.shape != (n,):
            raise ValueError("inconsistent bound dimensions")
        if not (np.isfinite(self.lb).all() and np.isfinite(self.ub).all()):
            raise ValueError("all variable bounds must be finite")
        if (self.lb > self.ub + 1e-12).any():
            raise ValueError("lower bound exceeds upper bound")
        bad = set(self.senses) - {"<", "=", ">"}
        if bad:
            raise ValueError(f"unknown row senses: {bad}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def fix_variable(self, j: int, value: float) -> "LpProblem":
        """Copy of the problem with variable ``j`` fixed (shares A)."""
        lb = self.lb.copy()
        ub = self.ub.copy()
        lb[j] = value
        ub[j] = value
        p = object.__new__(LpProblem)
        p.c, p.A, p.senses, p.b = self.c, self.A, self.senses, self.b
        p.lb, p.ub, p.names = lb, ub, self.names
        return p


@dataclass
class LpResult:
    """Outcome of a solve.

    ``status`` is 'optimal', 'infeasible' or 'unbounded'.  ``basis``
    (basic column indices + per-column statuses of the slack-augmented
    system) can seed `solve_dual_warmstart` on a problem of identical
    shape, e.g. the same model after a bound fixing.
    """

    status: str
    objective: float
    x: np.ndarray
    basis: tuple[np.ndarray, np.ndarray] | None
    iterations: int


@dataclass
class Reduction:
    """Outcome of `reduce_problem`: the reduced problem plus the mapping
    needed to lift a reduced solution back to the original space."""

    status: str  # 'reduced' or 'infeasible'
    problem: LpProblem | None
    keep_cols: np.ndarray
    keep_rows: np.ndarray
    fixed_values: np.ndarray

    def restore(self, x_red: np.ndarray) -> np.ndarray:
        x = self.fixed_values.copy()
        x[self.keep_cols] = x_red
        return x


def reduce_problem(p: LpProblem) -> Reduction:
    """Eliminate fixed variables and variables pinned by singleton
    equality rows, repeating to a fixed point.

    Fixings cascade: removing a column can leave an equality row with a
    single live variable, which is then pinned and removed too.  Rows
    left without live variables are checked for consistency; a violated
    one proves infeasibility outright.
    """
    m, n = p.shape
    lb = p.lb.copy()
    ub = p.ub.copy()
    live_col = np.ones(n, dtype=bool)
    live_row = np.ones(m, dtype=bool)
    fixed = np.zeros(n)
    b_eff = p.b.copy()

    def fix(j: int, val: float) -> None:
        val = min(max(val, lb[j]), ub[j])
        fixed[j] = val
        live_col[j] = False
        b_eff[:] -= p.A[:, j] * val

    changed = True
    while changed:
        changed = False
        for j in np.nonzero(live_col)[0]:
            if ub[j] - lb[j] <= 1e-12:
                fix(j, 0.5 * (lb[j] + ub[j]))
                changed = True
        for r in np.nonzero(live_row)[0]:
            row = p.A[r, live_col]
            nz = np.nonzero(row)[0]
            if nz.size > 1:
                continue
            if nz.size == 0:
                resid = b_eff[r]
                s = p.senses[r]
                ok = (
                    abs(resid) <= FEAS_TOL
                    if s == "="
                    else (resid >= -FEAS_TOL if s == "<" else resid <= FEAS_TOL)
                )
                if not ok:
                    return Reduction("infeasible", None, np.nonzero(live_col)[0],
                                     np.nonzero(live_row)[0], fixed)
                live_row[r] = False
                changed = True
                continue
            if p.senses[r] != "=":
                continue
            j = np.nonzero(live_col)[0][nz[0]]
            val = b_eff[r] / p.A[r, j]
            if val < lb[j] - FEAS_TOL or val > ub[j] + FEAS_TOL:
                return Reduction("infeasible", None, np.nonzero(live_col)[0],
                                 np.nonzero(live_row)[0], fixed)
            fix(j, val)
            live_row[r] = False
            changed = True

    keep_cols = np.nonzero(live_col)[0]
    keep_rows = np.nonzero(live_row)[0]
    sub = LpProblem(
        c=p.c[keep_cols],
        A=p.A[np.ix_(keep_rows, keep_cols)],
        senses=p.senses[keep_rows],
        b=b_eff[keep_rows],
        lb=lb[keep_cols],
        ub=ub[keep_cols],
        names=[p.names[j] for j in keep_cols] if p.names else None,
    )
    return Reduction("reduced", sub, keep_cols, keep_rows, fixed)


class _Simplex:
    """Slack-augmented workspace shared by the primal and dual methods."""

    def __init__(self, p: LpProblem, basis: tuple[np.ndarray, np.ndarray] | None = None):
        m, n = p.shape
        self.m, self.n = m, n
        self.N = n + m
        self.A = np.hstack([p.A, np.eye(m)]) if m else p.A.copy()
        self.b = p.b.copy()
        self.c = np.concatenate([p.c, np.zeros(m)])
        lo = np.concatenate([p.lb, np.zeros(m)])
        hi = np.concatenate([p.ub, np.zeros(m)])
        # Slack bounds wide enough for any activity the box allows.
        if m:
            act_min = np.minimum(p.A * p.lb, p.A * p.ub).sum(axis=1)
            act_max = np.maximum(p.A * p.lb, p.A * p.ub).sum(axis=1)
            less = p.senses == "<"
            more = p.senses == ">"
            hi[n:][less] = np.maximum(0.0, (p.b - act_min)[less])
            lo[n:][more] = np.minimum(0.0, (p.b - act_max)[more])
        self.lb, self.ub = lo, hi
        self.gap = hi - lo

        if basis is None:
            self.basic = np.arange(n, n + m, dtype=np.int64)
            self.status = np.empty(self.N, dtype=np.int8)
            self.status[:n] = np.where(p.c >= 0.0, AT_LOWER, AT_UPPER)
            self.status[n:] = BASIC
        else:
            basic, status = basis
            if basic.shape != (m,) or status.shape != (self.N,):
                raise ValueError("warm-start basis has the wrong shape")
            self.basic = basic.astype(np.int64).copy()
            self.status = status.astype(np.int8).copy()
            self.status[self.basic] = BASIC
            in_basis = np.zeros(self.N, dtype=bool)
            in_basis[self.basic] = True
            stray = (~in_basis) & (self.status == BASIC)
            self.status[stray] = AT_LOWER
        self.Binv = np.empty((m, m))
        self.iterations = 0
        self.refactor()

    # -- linear algebra ------------------------------------------------

    def refactor(self) -> None:
        try:
            self.Binv = np.linalg.inv(self.A[:, self.basic]) if self.m else self.Binv
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"singular basis: {exc}") from exc

    def nonbasic_x(self) -> np.ndarray:
        x = np.where(self.status == AT_UPPER, self.ub, self.lb)
        x[self.status == BASIC] = 0.0
        return x

    def compute_xB(self, xN: np.ndarray) -> np.ndarray:
        if not self.m:
            return np.empty(0)
        return self.Binv @ (self.b - self.A @ xN)

    def compute_z(self) -> np.ndarray:
        if not self.m:
            return self.c.copy()
        y = self.c[self.basic] @ self.Binv
        z = self.c - y @ self.A
        z[self.basic] = 0.0
        return z

    def full_x(self) -> np.ndarray:
        x = self.nonbasic_x()
        x[self.basic] = self.compute_xB(x)
        return x

    def restore_dual_feasibility(self) -> None:
        """Park nonbasic columns on the bound their reduced cost allows
        (only columns violating the sign rule are moved)."""
        z = self.compute_z()
        movable = (self.status != BASIC) & (self.gap > 0.0)
        to_lower = movable & (self.status == AT_UPPER) & (z > OPT_TOL)
        to_upper = movable & (self.status == AT_LOWER) & (z < -OPT_TOL)
        self.status[to_lower] = AT_LOWER
        self.status[to_upper] = AT_UPPER

    # -- simplex loops ---------------------------------------------------

    def primal_loop(self, max_pivots: int) -> str:
        streak = 0
        bland = False
        while True:
            if self.iterations >= max_pivots:
                raise NumericalFailure("primal pivot limit exceeded")
            xN = self.nonbasic_x()
            xB = self.compute_xB(xN)
            z = self.compute_z()
            e = _K.pick_entering_primal(z, self.status, self.gap, OPT_TOL, bland)
            if e < 0:
                return "optimal"
            sigma = 1.0 if self.status[e] == AT_LOWER else -1.0
            d = self.Binv @ self.A[:, e] if self.m else np.empty(0)
            r, theta_b, to_upper = _K.ratio_test_primal(
                d, xB, self.lb[self.basic], self.ub[self.basic], sigma, PIVOT_TOL
            )
            gap_e = self.gap[e]
            if r < 0 and not np.isfinite(gap_e):
                return "unbounded"
            self.iterations += 1
            if gap_e < theta_b:
                # bound flip: the entering column crosses its box first
                self.status[e] = AT_UPPER if self.status[e] == AT_LOWER else AT_LOWER
                step = gap_e
            else:
                leaving = self.basic[r]
                self.status[leaving] = AT_UPPER if to_upper else AT_LOWER
                self.status[e] = BASIC
                self.basic[r] = e
                _K.eta_update(self.Binv, d, r)
                step = theta_b
            streak = streak + 1 if step <= _DEGEN_STEP else 0
            bland = streak > 3 * self.m + 10
            if self.iterations % _REFACTOR_EVERY == 0:
                self.refactor()

    def dual_loop(self, max_pivots: int) -> str:
        streak = 0
        bland = False
        while True:
            if self.iterations >= max_pivots:
                raise NumericalFailure("dual pivot limit exceeded")
            xN = self.nonbasic_x()
            xB = self.compute_xB(xN)
            r, rho = _K.pick_leaving_dual(
                xB, self.lb[self.basic], self.ub[self.basic], FEAS_TOL, bland
            )
            if r < 0:
                return "optimal"
            z = self.compute_z()
            alpha = self.Binv[r] @ self.A
            e = _K.ratio_test_dual(
                alpha, z, self.status, self.gap, rho, PIVOT_TOL, bland
            )
            if e < 0:
                return "infeasible"
            self.iterations += 1
            leaving = self.basic[r]
            self.status[leaving] = AT_LOWER if rho > 0 else AT_UPPER
            d = self.Binv @ self.A[:, e]
            self.status[e] = BASIC
            self.basic[r] = e
            _K.eta_update(self.Binv, d, r)
            streak = streak + 1 if abs(z[e]) <= _DEGEN_STEP else 0
            bland = streak > 3 * self.m + 10
            if self.iterations % _REFACTOR_EVERY == 0:
                self.refactor()

    # -- certification ---------------------------------------------------

    def primal_feasible(self, xB: np.ndarray) -> bool:
        if not self.m:
            return True
        scale = 1.0 + np.abs(self.b).max(initial=0.0)
        return bool(
            (xB >= self.lb[self.basic] - FEAS_TOL * scale).all()
            and (xB <= self.ub[self.basic] + FEAS_TOL * scale).all()
        )

    def verify_optimal(self) -> None:
        """Re-check feasibility and reduced-cost signs; refactor and retry
        once before giving up."""
        for attempt in (0, 1):
            x = self.full_x()
            resid = self.A @ x - self.b if self.m else np.empty(0)
            scale = 1.0 + np.abs(self.b).max(initial=0.0)
            ok = (
                (np.abs(resid) <= 10 * FEAS_TOL * scale).all()
                and (x >= self.lb - 10 * FEAS_TOL * scale).all()
                and (x <= self.ub + 10 * FEAS_TOL * scale).all()
            )
            z = self.compute_z()
            zscale = 1.0 + np.abs(self.c).max(initial=0.0)
            free = self.gap > 0.0
            ok = ok and not (
                ((self.status == AT_LOWER) & free & (z < -10 * OPT_TOL * zscale)).any()
                or ((self.status == AT_UPPER) & free & (z > 10 * OPT_TOL * zscale)).any()
            )
            if ok:
                return
            if attempt == 0:
                self.refactor()
        raise NumericalFailure("optimality certificate failed verification")


def _finish(t: _Simplex, status: str, n: int) -> LpResult:
    if status == "optimal":
        t.verify_optimal()
        x = t.full_x()
        return LpResult(
            status="optimal",
            objective=float(t.c @ x),
            x=x[:n].copy(),
            basis=(t.basic.copy(), t.status.copy()),
            iterations=t.iterations,
        )
    obj = np.inf if status == "infeasible" else -np.inf
    return LpResult(status, obj, np.full(n, np.nan), None, t.iterations)


def _default_limit(p: LpProblem) -> int:
    m, n = p.shape
    return 50 * (m + n + m)


def solve_primal(p: LpProblem, presolve: bool = True,
                 max_pivots: int | None = None) -> LpResult:
    """Cold solve.

    Runs the presolve eliminations first (disable with ``presolve=False``
    when the returned basis must live on the given problem's own shape,
    as the branch-and-bound warm starts require), then the primal method
    from the slack basis when that basis is primal feasible and the dual
    method otherwise.
    """
    if presolve:
        red = reduce_problem(p)
        if red.status == "infeasible":
            return LpResult("infeasible", np.inf, np.full(p.shape[1], np.nan), None, 0)
        inner = solve_primal(red.problem, presolve=False, max_pivots=max_pivots)
        if inner.status != "optimal":
            return LpResult(inner.status, inner.objective,
                            np.full(p.shape[1], np.nan), None, inner.iterations)
        x = red.restore(inner.x)
        return LpResult("optimal", float(p.c @ x), x, None, inner.iterations)

    t = _Simplex(p)
    limit = max_pivots if max_pivots is not None else _default_limit(p)
    if t.primal_feasible(t.compute_xB(t.nonbasic_x())):
        status = t.primal_loop(limit)
    else:
        status = t.dual_loop(limit)
    return _finish(t, status, p.shape[1])


def solve_dual_warmstart(
    p: LpProblem,
    parent_basis: tuple[np.ndarray, np.ndarray],
    changed: tuple[int, float] | None = None,
    max_pivots: int | None = None,
) -> LpResult:
    """Re-solve after a bound change, starting from the parent basis.

    A bound change never breaks dual feasibility of the parent basis, so
    the dual method re-optimizes directly; when the parent solution
    already honours the new bound this returns it after zero pivots.
    Falls back to a cold solve if the warm start fails numerically.
    """
    if changed is not None:
        j, val = changed
        if not (abs(p.lb[j] - val) <= 1e-12 and abs(p.ub[j] - val) <= 1e-12):
            raise ValueError("changed bound does not match the problem")
    try:
        t = _Simplex(p, basis=parent_basis)
        t.restore_dual_feasibility()
        limit = max_pivots if max_pivots is not None else _default_limit(p)
        status = t.dual_loop(limit)
        return _finish(t, status, p.shape[1])
    except NumericalFailure:
        return solve_primal(p, presolve=False, max_pivots=max_pivots)

"""Mixed-binary linear model of the path-selection problem.

Selecting and ordering ``n`` debris out of ``N`` is written with binary
edge variables s_ij (transfer i->j flown) plus per-debris binaries
x_k (has a predecessor), y_k (has a successor), z_k = x_k*y_k and
s_k = x_k + y_k - z_k (k is visited).  Edge counting, z counting, degree
equations and date chronology together force the selected edges to form
a single open path.  Transfer costs and durations enter linearized
around per-leg references:

    C_L(alpha)      = C(a_min) + C1*(alpha - alpha_min)
    T_L(alpha, tau) = T(a_min, t_ref) + T1*(alpha - alpha_min) + T2*tau

with alpha the drift-axis offset from the reference and tau the
departure-date offset.  The bilinear selection*offset terms are replaced
by products p_ij = s_ij*alpha_ij and q_ij = s_ij*tau_i, each linearized
exactly over its box (the four standard product inequalities).

Inside the model, lengths are km, dates/durations days, costs m/s; the
transfer layer's SI values are converted at this boundary for the sake
of LP conditioning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GuardViolation, InfeasibleModel
from .lpsolve import LpProblem
from .orbital import DEFAULT_CONSTANTS, Constants, OrbitalElements, precession_rate, raan_precession_rate
from .transfer import (
    TransferSolution,
    admissible_interval,
    drift_duration,
    transfer_cost,
)
from .units import DAY, KM

#: Default minimum separation between consecutive arrival dates (days);
#: keeps the chronology strict so selected edges cannot close a loop.
ORDER_SEP_DAYS_DEFAULT = 0.5

_WIDTH_EPS = 1e-9


@dataclass(frozen=True)
class LinearizedTransfer:
    """Secant linearization of one transfer around its reference.

    All values SI.  ``c0``/``t0`` anchor cost and duration at the lower
    edge of the axis interval (a_ref + alpha_bounds[0]) and at ``t_ref``;
    ``c1``/``t1`` are the interval secants, ``t2`` the (exact) duration
    slope in departure date at ``a_ref``.
    """

    from_id: int
    to_id: int
    side: object
    i_drift: float
    a_ref: float
    t_ref: float
    c0: float
    c1: float
    t0: float
    t1: float
    t2: float
    alpha_bounds: tuple[float, float]
    tau_bounds: tuple[float, float]

    def cost_at(self, alpha: float) -> float:
        return self.c0 + self.c1 * (alpha - self.alpha_bounds[0])

    def duration_at(self, alpha: float, tau: float) -> float:
        return self.t0 + self.t1 * (alpha - self.alpha_bounds[0]) + self.t2 * tau


def linearize_transfer(
    sol: TransferSolution,
    from_el: OrbitalElements,
    to_el: OrbitalElements,
    alpha_bounds: tuple[float, float],
    tau_bounds: tuple[float, float],
    const: Constants = DEFAULT_CONSTANTS,
) -> LinearizedTransfer:
    """Secant linearization of ``sol`` over the given offset boxes.

    The axis interval must stay on the solution's side of the guarded
    co-rotation band: the coast duration is convex there, so the secant
    over-approximates it (never hiding a duration violation from the
    model), and is exact at both interval ends.

    Raises:
        GuardViolation: the alpha interval leaves the admissible side.
    """
    a_lo = sol.a_drift + alpha_bounds[0]
    a_hi = sol.a_drift + alpha_bounds[1]
    if a_hi < a_lo:
        raise GuardViolation("empty axis interval")
    # guard distance enforced against the actual band; altitude limits
    # are the planner's concern
    band = admissible_interval(to_el, sol.side, sol.i_drift,
                               altitude_bounds=(0.0, math.inf), const=const)
    if band is None or a_lo < band[0] - 1e-6 or a_hi > band[1] + 1e-6:
        raise GuardViolation(
            f"axis interval [{a_lo:.0f}, {a_hi:.0f}] m leaves the admissible "
            f"side of the co-rotation band"
        )

    def cost(a: float) -> float:
        return transfer_cost(from_el, to_el, a, sol.i_drift, const)[0]

    def dur(a: float, t: float) -> float:
        return drift_duration(from_el, to_el, a, sol.i_drift, t, const)

    width = a_hi - a_lo
    c0 = cost(a_lo)
    t0 = dur(a_lo, sol.t_depart)
    if width > _WIDTH_EPS:
        c1 = (cost(a_hi) - c0) / width
        t1 = (dur(a_hi, sol.t_depart) - t0) / width
    else:
        c1 = 0.0
        t1 = 0.0
    # The date dependence is linear on the branch anchored at t_ref (the
    # node gap itself moves linearly), so the slope is taken in closed
    # form rather than by a secant that might straddle a node wrap.
    rate_from = precession_rate(from_el, const)
    rate_to = precession_rate(to_el, const)
    rate_d = raan_precession_rate(sol.a_drift, 0.0, sol.i_drift, const)
    t2 = (rate_to - rate_from) / (rate_d - rate_to)

    return LinearizedTransfer(
        from_id=sol.from_id,
        to_id=sol.to_id,
        side=sol.side,
        i_drift=sol.i_drift,
        a_ref=sol.a_drift,
        t_ref=sol.t_depart,
        c0=c0,
        c1=c1,
        t0=t0,
        t1=t1,
        t2=t2,
        alpha_bounds=(float(alpha_bounds[0]), float(alpha_bounds[1])),
        tau_bounds=(float(tau_bounds[0]), float(tau_bounds[1])),
    )


def linearize_product(x_col: int, y_col: int, z_col: int,
                      y_min: float, y_max: float):
    """Rows forcing z = x*y for binary x and boxed y.

    Returns four ``(coeffs, sense, rhs)`` rows; at any vertex with
    x in {0, 1} they pin z to exactly x*y.
    """
    return [
        ({z_col: 1.0, x_col: -y_min}, ">", 0.0),
        ({z_col: 1.0, x_col: -y_max}, "<", 0.0),
        ({z_col: 1.0, y_col: -1.0, x_col: -y_min}, "<", -y_min),
        ({z_col: 1.0, y_col: -1.0, x_col: -y_max}, ">", -y_max),
    ]


def model_dimensions(n_candidates: int) -> tuple[int, int, int]:
    """(binaries, continuous variables, constraints) for N candidates."""
    n = n_candidates
    return (n * n + 3 * n, 3 * n * n - 2 * n, 9 * n * n - 2 * n + 3)


@dataclass
class PathModel:
    """Assembled model plus the bookkeeping to decode its solutions."""

    debris_ids: list[int]
    n_select: int
    start_id: int | None
    t_max_days: float
    col_names: list[str]
    col_index: dict[tuple, int]
    lb: np.ndarray
    ub: np.ndarray
    binary_mask: np.ndarray
    obj: np.ndarray
    A: np.ndarray
    senses: np.ndarray
    rhs: np.ndarray
    row_names: list[str]
    legs: dict[tuple[int, int], LinearizedTransfer]
    date_refs_days: dict[int, float]

    @property
    def n_edges(self) -> int:
        """Edges a feasible path must select."""
        return self.n_select if self.start_id is not None else self.n_select - 1

    def counts(self) -> tuple[int, int, int]:
        n_bin = int(self.binary_mask.sum())
        return (n_bin, len(self.col_names) - n_bin, len(self.rhs))

    def to_lp_problem(self) -> LpProblem:
        return LpProblem(
            c=self.obj,
            A=self.A,
            senses=self.senses,
            b=self.rhs,
            lb=self.lb,
            ub=self.ub,
            names=self.col_names,
        )

    def lp_dump(self) -> str:
        """Plain-text rendering of the whole model, LP-file style."""
        out = [
            f"\\ path model: {len(self.debris_ids)} candidates, "
            f"select {self.n_select}, {len(self.rhs)} rows",
            "minimize",
            " " + _comb(self.obj, self.col_names),
            "subject to",
        ]
        rel = {"<": "<=", "=": "=", ">": ">="}
        for r, name in enumerate(self.row_names):
            out.append(
                f" {name}: {_comb(self.A[r], self.col_names)} "
                f"{rel[str(self.senses[r])]} {self.rhs[r]:.12g}"
            )
        out.append("bounds")
        for j, cname in enumerate(self.col_names):
            out.append(f" {self.lb[j]:.12g} <= {cname} <= {self.ub[j]:.12g}")
        out.append("binary")
        out.append(" " + " ".join(
            n for n, is_b in zip(self.col_names, self.binary_mask) if is_b))
        out.append("end")
        return "\n".join(out) + "\n"


def _comb(coeffs: np.ndarray, names: list[str]) -> str:
    terms = [
        f"{'+' if c >= 0 else '-'} {abs(c):.12g} {n}"
        for c, n in zip(coeffs, names)
        if c != 0.0
    ]
    return " ".join(terms) if terms else "0"


def build_path_model(
    debris_ids: list[int],
    legs: dict[tuple[int, int], LinearizedTransfer],
    n_select: int,
    t_max_days: float,
    t_deorb_days: float = 0.0,
    order_sep_days: float = ORDER_SEP_DAYS_DEFAULT,
    per_debris_cost: float | dict[int, float] = 0.0,
    start_id: int | None = None,
    tau_half_width_days: float | None = None,
) -> PathModel:
    """Assemble the mixed-binary model over the candidate set.

    ``legs`` holds the usable (linearized) transfers; every other ordered
    pair is kept in the model with its selection and offset variables
    fixed to zero, so the model dimensions depend only on N.  When
    ``start_id`` is given, that candidate is forced to head the path
    (successor but no predecessor) and contributes no visit cost.
    ``tau_half_width_days`` boxes each date offset around its reference
    instead of the whole mission span; date linearizations are only
    trustworthy near their anchor, so callers iterating on a schedule
    should keep this window modest.

    Raises:
        InfeasibleModel: fewer usable transfers than path edges, or a
            candidate count below the selection size.
    """
    ids = list(debris_ids)
    n_cand = len(ids)
    n_real = n_cand - (1 if start_id is not None else 0)
    if n_select > n_real:
        raise InfeasibleModel(f"cannot select {n_select} of {n_real} debris")
    n_edges = n_select if start_id is not None else n_select - 1
    if len(legs) < n_edges:
        raise InfeasibleModel(
            f"only {len(legs)} usable transfers for {n_edges} path edges")
    for (i, j) in legs:
        if i == j or i not in ids or j not in ids:
            raise InfeasibleModel(f"leg ({i}, {j}) not in the candidate set")
    if start_id is not None and any(j == start_id for (_, j) in legs):
        raise InfeasibleModel("transfers into the start orbit are not allowed")

    pairs = [(i, j) for i in ids for j in ids if i != j]
    cost_of = (
        (lambda k: per_debris_cost.get(k, 0.0))
        if isinstance(per_debris_cost, dict)
        else (lambda k: float(per_debris_cost))
    )

    # per-debris date references (days), from the outgoing legs
    date_refs: dict[int, float] = {}
    for (i, _), leg in legs.items():
        ref = leg.t_ref / DAY
        if i in date_refs and abs(date_refs[i] - ref) > 1e-6:
            raise InfeasibleModel(f"inconsistent date references for debris {i}")
        date_refs[i] = ref
    for k in ids:
        date_refs.setdefault(k, 0.0)

    # ---- columns, canonical order -------------------------------------
    col_names: list[str] = []
    col_index: dict[tuple, int] = {}

    def add_col(key: tuple, name: str) -> int:
        col_index[key] = len(col_names)
        col_names.append(name)
        return col_index[key]

    for (i, j) in pairs:
        add_col(("s", i, j), f"s_{i}_{j}")
    for k in ids:
        add_col(("x", k), f"x_{k}")
    for k in ids:
        add_col(("y", k), f"y_{k}")
    for k in ids:
        add_col(("z", k), f"z_{k}")
    for k in ids:
        add_col(("sel", k), f"sel_{k}")
    for (i, j) in pairs:
        add_col(("alpha", i, j), f"alpha_{i}_{j}")
    for k in ids:
        add_col(("tau", k), f"tau_{k}")
    for (i, j) in pairs:
        add_col(("p", i, j), f"p_{i}_{j}")
    for (i, j) in pairs:
        add_col(("q", i, j), f"q_{i}_{j}")

    n_cols = len(col_names)
    lb = np.zeros(n_cols)
    ub = np.zeros(n_cols)
    obj = np.zeros(n_cols)
    binary_mask = np.zeros(n_cols, dtype=bool)

    w = tau_half_width_days
    tau_bounds = {
        k: (-date_refs[k] if w is None else max(-date_refs[k], -w),
            (t_max_days - date_refs[k]) if w is None
            else min(t_max_days - date_refs[k], w))
        for k in ids
    }

    for (i, j) in pairs:
        s_col = col_index[("s", i, j)]
        binary_mask[s_col] = True
        a_col = col_index[("alpha", i, j)]
        p_col = col_index[("p", i, j)]
        q_col = col_index[("q", i, j)]
        leg = legs.get((i, j))
        if leg is None:
            # excluded transfer: selection and offsets pinned to zero
            ub[s_col] = 0.0
            continue
        ub[s_col] = 1.0
        al, ah = leg.alpha_bounds[0] / KM, leg.alpha_bounds[1] / KM
        lb[a_col], ub[a_col] = al, ah
        lb[p_col], ub[p_col] = min(0.0, al), max(0.0, ah)
        tl, th = tau_bounds[i]
        lb[q_col], ub[q_col] = min(0.0, tl), max(0.0, th)
        # objective: per-edge anchored cost plus the axis-offset slope
        c1_km = leg.c1 * KM
        obj[s_col] = leg.c0 - c1_km * al
        obj[p_col] = c1_km

    for k in ids:
        for grp in ("x", "y", "z", "sel"):
            c = col_index[(grp, k)]
            binary_mask[c] = True
            ub[c] = 1.0
        obj[col_index[("sel", k)]] = cost_of(k) if k != start_id else 0.0
        t_col = col_index[("tau", k)]
        lb[t_col], ub[t_col] = tau_bounds[k]
    if start_id is not None:
        # head of the path: a successor, no predecessor, always visited
        lb[col_index[("y", start_id)]] = 1.0
        ub[col_index[("x", start_id)]] = 0.0
        ub[col_index[("z", start_id)]] = 0.0
        lb[col_index[("sel", start_id)]] = 1.0

    # ---- rows, canonical order ----------------------------------------
    rows: list[tuple[dict[int, float], str, float]] = []
    row_names: list[str] = []

    def add_row(name: str, coeffs: dict[int, float], sense: str, rhs_val: float):
        rows.append((coeffs, sense, rhs_val))
        row_names.append(name)

    add_row("selection",
            {col_index[("s", i, j)]: 1.0 for (i, j) in pairs}, "=", float(n_edges))
    add_row("connexity",
            {col_index[("z", k)]: 1.0 for k in ids}, "=", float(n_edges - 1))
    for k in ids:
        coeffs = {col_index[("s", i, k)]: -1.0 for i in ids if i != k}
        coeffs[col_index[("x", k)]] = 1.0
        add_row(f"degree_in_{k}", coeffs, "=", 0.0)
    for k in ids:
        coeffs = {col_index[("s", k, j)]: -1.0 for j in ids if j != k}
        coeffs[col_index[("y", k)]] = 1.0
        add_row(f"degree_out_{k}", coeffs, "=", 0.0)
    for k in ids:
        add_row(
            f"visit_{k}",
            {
                col_index[("sel", k)]: 1.0,
                col_index[("x", k)]: -1.0,
                col_index[("y", k)]: -1.0,
                col_index[("z", k)]: 1.0,
            },
            "=",
            0.0,
        )
    sep = max(t_deorb_days, order_sep_days)
    for (i, j) in pairs:
        add_row(
            f"chrono_{i}_{j}",
            {
                col_index[("tau", i)]: 1.0,
                col_index[("tau", j)]: -1.0,
                col_index[("s", i, j)]: t_max_days,
            },
            "<",
            t_max_days - sep - date_refs[i] + date_refs[j],
        )

    dur = {}
    for (i, j) in pairs:
        leg = legs.get((i, j))
        if leg is None:
            continue
        t1_km_days = leg.t1 * KM / DAY
        al = leg.alpha_bounds[0] / KM
        _acc(dur, col_index[("s", i, j)], leg.t0 / DAY - t1_km_days * al)
        _acc(dur, col_index[("p", i, j)], t1_km_days)
        _acc(dur, col_index[("q", i, j)], leg.t2)
    for k in ids:
        if k != start_id and t_deorb_days:
            _acc(dur, col_index[("sel", k)], t_deorb_days)
    add_row("duration", dur, "<", t_max_days)

    for k in ids:
        for idx, row in enumerate(
            linearize_product(
                col_index[("x", k)], col_index[("y", k)], col_index[("z", k)],
                0.0, 1.0)
        ):
            add_row(f"prod_z_{k}_{idx}", *row)
    for (i, j) in pairs:
        a_col = col_index[("alpha", i, j)]
        for idx, row in enumerate(
            linearize_product(
                col_index[("s", i, j)], a_col, col_index[("p", i, j)],
                float(lb[a_col]), float(ub[a_col]))
        ):
            add_row(f"prod_p_{i}_{j}_{idx}", *row)
    for (i, j) in pairs:
        t_col = col_index[("tau", i)]
        for idx, row in enumerate(
            linearize_product(
                col_index[("s", i, j)], t_col, col_index[("q", i, j)],
                float(lb[t_col]), float(ub[t_col]))
        ):
            add_row(f"prod_q_{i}_{j}_{idx}", *row)

    A = np.zeros((len(rows), n_cols))
    senses = np.empty(len(rows), dtype="U1")
    rhs = np.empty(len(rows))
    for r, (coeffs, sense, rv) in enumerate(rows):
        for c, v in coeffs.items():
            A[r, c] = v
        senses[r] = sense
        rhs[r] = rv

    return PathModel(
        debris_ids=ids,
        n_select=n_select,
        start_id=start_id,
        t_max_days=t_max_days,
        col_names=col_names,
        col_index=col_index,
        lb=lb,
        ub=ub,
        binary_mask=binary_mask,
        obj=obj,
        A=A,
        senses=senses,
        rhs=rhs,
        row_names=row_names,
        legs=dict(legs),
        date_refs_days=dict(date_refs),
    )


def _acc(d: dict[int, float], key: int, val: float) -> None:
    d[key] = d.get(key, 0.0) + val


def encode_path(
    model: PathModel,
    path: list[int],
    taus_days: dict[int, float],
    alphas_km: dict[tuple[int, int], float] | None = None,
) -> np.ndarray:
    """Full variable vector for a concrete path and schedule.

    Offsets default to zero; product columns are set consistently.  Dates
    of unvisited debris are parked on the first arrival date so that the
    all-pairs chronology rows hold whenever the path schedule itself does.
    """
    alphas_km = alphas_km or {}
    x = np.zeros(len(model.col_names))
    ci = model.col_index
    edges = list(zip(path, path[1:]))
    for (i, j) in edges:
        if (i, j) not in model.legs:
            raise InfeasibleModel(f"path uses excluded transfer {i}->{j}")
        x[ci[("s", i, j)]] = 1.0
    for k in path:
        x[ci[("x", k)]] = 0.0 if k == path[0] else 1.0
        x[ci[("y", k)]] = 0.0 if k == path[-1] else 1.0
        x[ci[("z", k)]] = x[ci[("x", k)]] * x[ci[("y", k)]]
        x[ci[("sel", k)]] = (
            x[ci[("x", k)]] + x[ci[("y", k)]] - x[ci[("z", k)]])
    anchor = taus_days.get(path[0], 0.0) + model.date_refs_days[path[0]]
    for k in model.debris_ids:
        t_col = ci[("tau", k)]
        if k in taus_days:
            x[t_col] = taus_days[k]
        else:
            x[t_col] = min(max(anchor - model.date_refs_days[k],
                               model.lb[t_col]), model.ub[t_col])
    for (i, j) in model.legs:
        # unselected offsets sit at the in-box point closest to zero
        a_col = ci[("alpha", i, j)]
        x[a_col] = min(max(0.0, model.lb[a_col]), model.ub[a_col])
    for (i, j) in edges:
        a_col = ci[("alpha", i, j)]
        x[a_col] = min(max(alphas_km.get((i, j), 0.0),
                           model.lb[a_col]), model.ub[a_col])
        x[ci[("p", i, j)]] = x[a_col]
        x[ci[("q", i, j)]] = x[ci[("tau", i)]]
    return x

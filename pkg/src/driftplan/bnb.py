"""Branch-and-bound search over the mixed-binary path models.

The continuous relaxation is a plain LP, so the search branches on
fractional binaries only.  Each node's LP is warm-started from its
parent's basis with the dual method: a bound fixing keeps the parent
basis dual feasible, making child re-solves a handful of pivots.  The
whole model is pre-reduced once at the root; every node then lives on
the same reduced shape, which is what lets bases travel between them.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure
from .linmodel import PathModel, encode_path
from .lpsolve import LpProblem, reduce_problem, solve_dual_warmstart, solve_primal
from .units import DAY

STRATEGIES = ("depth_first", "best_bound")
BRANCH_RULES = ("numerical_order", "most_constrained", "max_cost_penalty")

#: a child's bound may not sit below its parent's by more than this
_BOUND_SLACK = 1e-6
_PRUNE_EPS = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    """Search options.

    strategy: node selection, 'depth_first' (one-fixing explored first)
        or 'best_bound' (lowest relaxation value first).
    branch_rule: fractional-binary choice, 'numerical_order' (lowest
        column), 'most_constrained' (value closest to one half) or
        'max_cost_penalty' (largest |cost| * distance-to-integer).
    """

    strategy: str = "depth_first"
    branch_rule: str = "most_constrained"
    integrality_tol: float = 1e-6
    max_nodes: int = 100_000

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.branch_rule not in BRANCH_RULES:
            raise ValueError(f"unknown branch rule {self.branch_rule!r}")


@dataclass
class BnbResult:
    status: str  # 'optimal' | 'infeasible'
    objective: float
    x: np.ndarray | None
    nodes: int
    pruned_bound: int
    pruned_infeasible: int
    pivots: int
    root_bound: float


def _pick_branch(rule: str, cols: np.ndarray, fracs: np.ndarray,
                 c: np.ndarray) -> int:
    if rule == "numerical_order":
        return int(cols[0])
    if rule == "most_constrained":
        key = np.abs(fracs - 0.5)
    else:  # max_cost_penalty
        key = -np.abs(c[cols]) * np.minimum(fracs, 1.0 - fracs)
    order = np.lexsort((cols, key))
    return int(cols[order[0]])


def solve(
    problem: LpProblem,
    binary_mask: np.ndarray,
    config: SearchConfig = SearchConfig(),
    incumbent: np.ndarray | None = None,
) -> BnbResult:
    """Minimize over the binary-feasible points of ``problem``.

    ``binary_mask`` flags the 0/1 columns.  ``incumbent``, when given,
    must be a feasible integral point of the full problem; it seeds the
    pruning bound and is returned unchanged if nothing beats it.

    Raises:
        NumericalFailure: node limit hit, or a child relaxation came
            back below its parent's (a warm-start consistency breach).
    """
    red = reduce_problem(problem)
    if red.status == "infeasible":
        return BnbResult("infeasible", np.inf, None, 0, 0, 0, 0, np.inf)
    offset = float(problem.c @ red.fixed_values)
    core = red.problem
    bmask = binary_mask[red.keep_cols]
    bin_cols = np.flatnonzero(bmask)

    # a cascade fixing that lands a binary strictly between its values
    # proves there is no integral point at all
    elim = np.ones(len(binary_mask), dtype=bool)
    elim[red.keep_cols] = False
    pinned = red.fixed_values[elim & binary_mask]
    if pinned.size and np.max(np.abs(pinned - np.round(pinned))) > 1e-9:
        return BnbResult("infeasible", np.inf, None, 0, 0, 0, 0, np.inf)

    root = solve_primal(core, presolve=False)
    nodes, pivots = 1, root.iterations
    if root.status != "optimal":
        return BnbResult("infeasible", np.inf, None, nodes, 0, 1, pivots,
                         np.inf)

    inc_obj = np.inf
    inc_x = None
    if incumbent is not None:
        inc_obj = float(problem.c @ incumbent) - offset
        inc_x = incumbent[red.keep_cols]

    pruned_bound = pruned_infeasible = 0
    seq = 0  # heap tiebreak, also fixes the depth-first pop order
    open_nodes: list = [(root.objective, seq, core, root)]
    best_bound_floor = -np.inf

    while open_nodes:
        if config.strategy == "best_bound":
            bound, _, prob, res = heapq.heappop(open_nodes)
            if bound < best_bound_floor - _BOUND_SLACK:
                raise NumericalFailure(
                    "best-bound pop order regressed; warm starts are "
                    "inconsistent")
            best_bound_floor = max(best_bound_floor, bound)
        else:
            bound, _, prob, res = open_nodes.pop()
        if bound >= inc_obj - _PRUNE_EPS:
            pruned_bound += 1
            continue

        vals = res.x[bin_cols]
        dist = np.abs(vals - np.round(vals))
        frac = dist > config.integrality_tol
        if not frac.any():
            # integral relaxation optimum: new incumbent
            inc_obj = bound
            inc_x = res.x.copy()
            continue
        j = _pick_branch(config.branch_rule, bin_cols[frac], vals[frac],
                         core.c)

        for val in (0.0, 1.0):
            child_prob = prob.fix_variable(j, val)
            child = solve_dual_warmstart(child_prob, res.basis,
                                         changed=(j, val))
            nodes += 1
            pivots += child.iterations
            if nodes > config.max_nodes:
                raise NumericalFailure(
                    f"node limit {config.max_nodes} exceeded")
            if child.status != "optimal":
                pruned_infeasible += 1
                continue
            if child.objective < bound - _BOUND_SLACK:
                raise NumericalFailure(
                    "child relaxation below parent bound "
                    f"({child.objective:.9g} < {bound:.9g})")
            if child.objective >= inc_obj - _PRUNE_EPS:
                pruned_bound += 1
                continue
            seq += 1
            entry = (child.objective, seq, child_prob, child)
            if config.strategy == "best_bound":
                heapq.heappush(open_nodes, entry)
            else:
                open_nodes.append(entry)

    if inc_x is None:
        return BnbResult("infeasible", np.inf, None, nodes, pruned_bound,
                         pruned_infeasible, pivots, root.objective + offset)
    x_full = red.restore(inc_x)
    return BnbResult("optimal", inc_obj + offset, x_full, nodes,
                     pruned_bound, pruned_infeasible, pivots,
                     root.objective + offset)


def greedy_incumbent(model: PathModel) -> tuple[np.ndarray, float] | None:
    """Cheapest-next-leg construction of a feasible starting plan.

    Tries every admissible head debris, extends with the cheapest usable
    transfer whose schedule still fits, and keeps the best complete path.
    Returns (variable vector, objective) or None when no chain closes.
    """
    by_from: dict[int, list[tuple[float, int]]] = {}
    for (i, j), leg in model.legs.items():
        by_from.setdefault(i, []).append((leg.cost_at(0.0), j))
    for options in by_from.values():
        options.sort()
    sep = _chrono_sep(model)

    heads = ([model.start_id] if model.start_id is not None
             else list(model.debris_ids))
    best: tuple[np.ndarray, float] | None = None
    for head in heads:
        path = [head]
        dates = {head: model.date_refs_days[head]}
        ok = True
        for _ in range(model.n_edges):
            tail = path[-1]
            nxt = None
            for _, j in by_from.get(tail, ()):
                if j in path:
                    continue
                leg = model.legs[(tail, j)]
                tau = (dates[tail] - model.date_refs_days[tail]) * DAY
                step = max(sep, leg.duration_at(0.0, tau) / DAY)
                if dates[tail] + step <= model.t_max_days:
                    nxt = (j, dates[tail] + step)
                    break
            if nxt is None:
                ok = False
                break
            path.append(nxt[0])
            dates[nxt[0]] = nxt[1]
        if not ok:
            continue
        taus = {k: dates[k] - model.date_refs_days[k] for k in path}
        x = encode_path(model, path, taus)
        if not _point_feasible(model, x):
            continue
        obj = float(model.obj @ x)
        if best is None or obj < best[1]:
            best = (x, obj)
    return best


def _chrono_sep(model: PathModel) -> float:
    r = model.row_names.index(f"chrono_{model.debris_ids[0]}_"
                              f"{model.debris_ids[1]}")
    i, j = model.debris_ids[0], model.debris_ids[1]
    return (model.t_max_days - model.rhs[r]
            - model.date_refs_days[i] + model.date_refs_days[j])


def _point_feasible(model: PathModel, x: np.ndarray, tol: float = 1e-7) -> bool:
    if np.any(x < model.lb - tol) or np.any(x > model.ub + tol):
        return False
    act = model.A @ x
    ok = np.where(model.senses == "<", act <= model.rhs + tol,
                  np.where(model.senses == ">", act >= model.rhs - tol,
                           np.abs(act - model.rhs) <= tol))
    return bool(ok.all())

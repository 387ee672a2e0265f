"""The compiled pivot kernels must be indistinguishable from the numpy
ones: same picks on random inputs, same pivot walks on whole solves."""

import numpy as np
import pytest

kern_cy = pytest.importorskip("driftplan._kernels_cy")

from driftplan import _kernels_py as kern_py  # noqa: E402
from driftplan import lpsolve  # noqa: E402
from driftplan.lpsolve import LpProblem, solve_primal  # noqa: E402

SEED = 271828


def test_backend_reports_compiled():
    assert lpsolve.BACKEND_NAME == "compiled"


def test_kernels_bit_identical():
    rng = np.random.default_rng(SEED)
    for _ in range(1500):
        n = int(rng.integers(1, 40))
        m = int(rng.integers(1, 30))
        z = np.round(rng.normal(0, 1, n), 3)
        status = rng.integers(0, 3, n).astype(np.int8)
        gap = np.where(rng.random(n) < 0.2, 0.0, rng.random(n) * 10)
        bland = bool(rng.random() < 0.3)

        assert kern_py.pick_entering_primal(z, status, gap, 1e-7, bland) \
            == kern_cy.pick_entering_primal(z, status, gap, 1e-7, bland)

        d = np.round(rng.normal(0, 1, m), 3)
        xB = rng.normal(0, 5, m)
        lbB = xB - np.abs(rng.normal(0, 2, m))
        ubB = xB + np.abs(rng.normal(0, 2, m))
        sigma = float(rng.choice([-1.0, 1.0]))
        got_py = kern_py.ratio_test_primal(d, xB, lbB, ubB, sigma, 1e-10)
        got_cy = kern_cy.ratio_test_primal(d, xB, lbB, ubB, sigma, 1e-10)
        assert got_py == got_cy

        assert kern_py.pick_leaving_dual(xB, lbB, ubB, 1e-7, bland) \
            == kern_cy.pick_leaving_dual(xB, lbB, ubB, 1e-7, bland)

        alpha = np.round(rng.normal(0, 1, n), 3)
        rho = float(rng.choice([-1.0, 1.0]))
        assert kern_py.ratio_test_dual(alpha, np.abs(z), status, gap, rho,
                                       1e-10, bland) \
            == kern_cy.ratio_test_dual(alpha, np.abs(z), status, gap, rho,
                                       1e-10, bland)

        B_py = rng.normal(0, 1, (m, m))
        B_cy = B_py.copy()
        dd = rng.normal(0, 1, m)
        r = int(rng.integers(0, m))
        if abs(dd[r]) > 1e-9:
            kern_py.eta_update(B_py, dd, r)
            kern_cy.eta_update(B_cy, dd, r)
            assert np.array_equal(B_py, B_cy)


def _random_lp(rng):
    n = int(rng.integers(2, 9))
    m = int(rng.integers(1, 7))
    return LpProblem(
        c=np.round(rng.normal(0, 2, n), 2),
        A=np.round(rng.normal(0, 1, (m, n)), 2),
        senses=rng.choice(np.array(["<", ">", "="]), m),
        b=np.round(rng.normal(0, 3, m), 2),
        lb=np.round(-rng.random(n) * 5, 2),
        ub=np.round(rng.random(n) * 5, 2),
    )


def _solve_with(kern, problem):
    original = lpsolve._K
    lpsolve._K = kern
    try:
        return solve_primal(problem)
    finally:
        lpsolve._K = original


def test_full_solves_walk_identical_pivots():
    rng = np.random.default_rng(SEED + 1)
    solved = 0
    for _ in range(120):
        p = _random_lp(rng)
        res_py = _solve_with(kern_py, p)
        res_cy = _solve_with(kern_cy, p)
        assert res_py.status == res_cy.status
        assert res_py.iterations == res_cy.iterations
        if res_py.status == "optimal":
            solved += 1
            assert res_py.objective == res_cy.objective
            assert np.array_equal(res_py.x, res_cy.x)
    assert solved > 40


def test_path_model_relaxation_matches(catalog11, legs61_shared):
    from driftplan.linmodel import build_path_model

    model = build_path_model(sorted(catalog11), legs61_shared, 5, 366.0)
    p = model.to_lp_problem()
    res_py = _solve_with(kern_py, p)
    res_cy = _solve_with(kern_cy, p)
    assert res_py.status == res_cy.status == "optimal"
    assert res_py.iterations == res_cy.iterations
    assert res_py.objective == res_cy.objective
    assert np.array_equal(res_py.x, res_cy.x)

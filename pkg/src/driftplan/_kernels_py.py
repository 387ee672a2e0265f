"""Pure-numpy pivot-selection kernels for the bounded-variable simplex.

A compiled twin (`_kernels_cy`) implements the same five functions with
typed loops; the solver picks whichever is importable.  Both use the
same elementwise arithmetic and first-index tie-breaking so that pivot
sequences agree between backends.

Status codes: 0 = basic, 1 = nonbasic at lower bound, 2 = nonbasic at
upper bound.
"""

import numpy as np

BASIC = 0
AT_LOWER = 1
AT_UPPER = 2


def pick_entering_primal(z, status, gap, tol, bland):
    """Index of the entering column (largest reduced-cost violation), or
    -1 at optimality.  Bland mode picks the lowest violating index."""
    viol = np.where(status == AT_LOWER, -z, np.where(status == AT_UPPER, z, -np.inf))
    viol[gap <= 0.0] = -np.inf
    if bland:
        idx = np.nonzero(viol > tol)[0]
        return int(idx[0]) if idx.size else -1
    j = int(np.argmax(viol))
    return j if viol[j] > tol else -1


def ratio_test_primal(d, xB, lbB, ubB, sigma, tol_piv):
    """Step limit imposed by the basic variables.

    Returns ``(r, theta, to_upper)``: the blocking basic position, the
    step of the entering variable, and whether the leaver stops at its
    upper bound; ``r = -1`` when no basic variable blocks.
    """
    sd = sigma * d
    theta = np.full(d.shape[0], np.inf)
    up = sd > tol_piv
    dn = sd < -tol_piv
    theta[up] = (xB[up] - lbB[up]) / sd[up]
    theta[dn] = (xB[dn] - ubB[dn]) / sd[dn]
    np.maximum(theta, 0.0, out=theta)
    t = theta.min() if theta.size else np.inf
    if not np.isfinite(t):
        return -1, np.inf, 0
    cands = np.nonzero(theta == t)[0]
    r = int(cands[np.argmax(np.abs(d[cands]))])
    return r, float(t), int(dn[r])


def pick_leaving_dual(xB, lbB, ubB, tol, bland):
    """Most bound-violating basic position and violation side, or
    ``(-1, 0)`` when the basis is primal feasible.  ``rho`` is +1 for a
    lower-bound violation, -1 for an upper-bound one."""
    low = lbB - xB
    upp = xB - ubB
    viol = np.maximum(low, upp)
    if bland:
        idx = np.nonzero(viol > tol)[0]
        if not idx.size:
            return -1, 0
        r = int(idx[0])
    else:
        r = int(np.argmax(viol)) if viol.size else -1
        if r < 0 or viol[r] <= tol:
            return -1, 0
    return r, (1 if low[r] >= upp[r] else -1)


def ratio_test_dual(alpha, z, status, gap, rho, tol_piv, bland):
    """Entering column of the dual step, or -1 when none is eligible
    (certifying primal infeasibility)."""
    ra = rho * alpha
    elig_lo = (status == AT_LOWER) & (ra < -tol_piv) & (gap > 0.0)
    elig_up = (status == AT_UPPER) & (ra > tol_piv) & (gap > 0.0)
    ratio = np.full(alpha.shape[0], np.inf)
    ratio[elig_lo] = z[elig_lo] / (-ra[elig_lo])
    ratio[elig_up] = -z[elig_up] / ra[elig_up]
    if bland:
        idx = np.nonzero(np.isfinite(ratio))[0]
        return int(idx[0]) if idx.size else -1
    t = ratio.min() if ratio.size else np.inf
    if not np.isfinite(t):
        return -1
    cands = np.nonzero(ratio == t)[0]
    return int(cands[np.argmax(np.abs(alpha[cands]))])


def eta_update(Binv, d, r):
    """Rank-one basis-inverse update after column ``r`` is replaced by a
    column whose basis representation is ``d`` (in place)."""
    row = Binv[r] / d[r]
    Binv -= np.outer(d, row)
    Binv[r] = row

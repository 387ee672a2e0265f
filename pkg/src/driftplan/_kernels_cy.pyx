# cython: language_level=3
"""Typed-loop twin of `_kernels_py`.

Every function mirrors the numpy implementation operation for
operation — same expressions, same first-index tie-breaking — so both
backends walk identical pivot sequences.  See `_kernels_py` for the
semantics; only the loop mechanics differ.
"""

import numpy as np

cimport cython
from libc.math cimport INFINITY, fabs

BASIC = 0
AT_LOWER = 1
AT_UPPER = 2

DEF C_AT_LOWER = 1
DEF C_AT_UPPER = 2


@cython.boundscheck(False)
@cython.wraparound(False)
def pick_entering_primal(double[::1] z, signed char[::1] status,
                         double[::1] gap, double tol, bint bland):
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t j, best = -1
    cdef double v, best_v = -INFINITY
    for j in range(n):
        if gap[j] <= 0.0:
            continue
        if status[j] == C_AT_LOWER:
            v = -z[j]
        elif status[j] == C_AT_UPPER:
            v = z[j]
        else:
            continue
        if bland:
            if v > tol:
                return j
            continue
        if v > best_v:
            best_v = v
            best = j
    if bland:
        return -1
    return best if best_v > tol else -1


@cython.boundscheck(False)
@cython.wraparound(False)
def ratio_test_primal(double[::1] d, double[::1] xB, double[::1] lbB,
                      double[::1] ubB, double sigma, double tol_piv):
    cdef Py_ssize_t m = d.shape[0]
    cdef Py_ssize_t i, r = -1
    cdef double sd, th, t = INFINITY
    cdef double best_abs, cand_abs
    for i in range(m):
        sd = sigma * d[i]
        if sd > tol_piv:
            th = (xB[i] - lbB[i]) / sd
        elif sd < -tol_piv:
            th = (xB[i] - ubB[i]) / sd
        else:
            continue
        if th < 0.0:
            th = 0.0
        if th < t:
            t = th
    if not t < INFINITY:
        return -1, INFINITY, 0
    best_abs = -1.0
    for i in range(m):
        sd = sigma * d[i]
        if sd > tol_piv:
            th = (xB[i] - lbB[i]) / sd
        elif sd < -tol_piv:
            th = (xB[i] - ubB[i]) / sd
        else:
            continue
        if th < 0.0:
            th = 0.0
        if th == t:
            cand_abs = fabs(d[i])
            if cand_abs > best_abs:
                best_abs = cand_abs
                r = i
    return r, t, 1 if (sigma * d[r]) < -tol_piv else 0


@cython.boundscheck(False)
@cython.wraparound(False)
def pick_leaving_dual(double[::1] xB, double[::1] lbB, double[::1] ubB,
                      double tol, bint bland):
    cdef Py_ssize_t m = xB.shape[0]
    cdef Py_ssize_t i, r = -1
    cdef double lo, up, v, best_v = -INFINITY
    for i in range(m):
        lo = lbB[i] - xB[i]
        up = xB[i] - ubB[i]
        v = lo if lo >= up else up
        if bland:
            if v > tol:
                r = i
                break
            continue
        if v > best_v:
            best_v = v
            r = i
    if r < 0 or (not bland and best_v <= tol):
        return -1, 0
    lo = lbB[r] - xB[r]
    up = xB[r] - ubB[r]
    return r, 1 if lo >= up else -1


@cython.boundscheck(False)
@cython.wraparound(False)
def ratio_test_dual(double[::1] alpha, double[::1] z,
                    signed char[::1] status, double[::1] gap, double rho,
                    double tol_piv, bint bland):
    cdef Py_ssize_t n = alpha.shape[0]
    cdef Py_ssize_t j, best = -1
    cdef double ra, ratio, t = INFINITY
    cdef double best_abs, cand_abs
    for j in range(n):
        ra = rho * alpha[j]
        if status[j] == C_AT_LOWER and ra < -tol_piv and gap[j] > 0.0:
            ratio = z[j] / (-ra)
        elif status[j] == C_AT_UPPER and ra > tol_piv and gap[j] > 0.0:
            ratio = -z[j] / ra
        else:
            continue
        if bland:
            if ratio == ratio and ratio != INFINITY and ratio != -INFINITY:
                return j
            continue
        if ratio < t:
            t = ratio
    if bland:
        return -1
    if not t < INFINITY:
        return -1
    best_abs = -1.0
    for j in range(n):
        ra = rho * alpha[j]
        if status[j] == C_AT_LOWER and ra < -tol_piv and gap[j] > 0.0:
            ratio = z[j] / (-ra)
        elif status[j] == C_AT_UPPER and ra > tol_piv and gap[j] > 0.0:
            ratio = -z[j] / ra
        else:
            continue
        if ratio == t:
            cand_abs = fabs(alpha[j])
            if cand_abs > best_abs:
                best_abs = cand_abs
                best = j
    return best


@cython.boundscheck(False)
@cython.wraparound(False)
def eta_update(double[:, ::1] Binv, double[::1] d, Py_ssize_t r):
    cdef Py_ssize_t m = Binv.shape[0]
    cdef Py_ssize_t i, k
    cdef double piv = d[r]
    row = np.empty(m, dtype=np.float64)
    cdef double[::1] rowv = row
    for k in range(m):
        rowv[k] = Binv[r, k] / piv
    for i in range(m):
        if i == r:
            continue
        for k in range(m):
            Binv[i, k] = Binv[i, k] - d[i] * rowv[k]
    for k in range(m):
        Binv[r, k] = rowv[k]

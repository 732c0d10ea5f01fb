# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counterparts of the kernels in ``_pure``.

Same contracts and tie-breaking rules; loops run in C instead of numpy.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, sqrt

cnp.import_array()


def lasso_cd(X, y, double alpha, int max_sweeps, double tol, w=None):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Xa = np.ascontiguousarray(X, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ya = np.asarray(y, dtype=np.float64)
    cdef Py_ssize_t n = Xa.shape[0], d = Xa.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wa
    if w is None:
        wa = np.zeros(d)
    else:
        wa = np.array(w, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] col_sq = np.empty(d)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] r = np.empty(n)

    cdef Py_ssize_t i, j, sweep
    cdef double acc, cj, wj, rho, wn, delta, max_delta, scale
    cdef bint converged = False

    for j in range(d):
        acc = 0.0
        for i in range(n):
            acc += Xa[i, j] * Xa[i, j]
        col_sq[j] = acc / n
    for i in range(n):
        acc = 0.0
        for j in range(d):
            acc += Xa[i, j] * wa[j]
        r[i] = ya[i] - acc

    cdef Py_ssize_t sweeps_used = 0
    for sweep in range(1, max_sweeps + 1):
        sweeps_used = sweep
        max_delta = 0.0
        for j in range(d):
            cj = col_sq[j]
            if cj <= 0.0:
                continue
            wj = wa[j]
            acc = 0.0
            for i in range(n):
                acc += Xa[i, j] * r[i]
            rho = acc / n + cj * wj
            if rho > alpha:
                wn = (rho - alpha) / cj
            elif rho < -alpha:
                wn = (rho + alpha) / cj
            else:
                wn = 0.0
            if wn != wj:
                for i in range(n):
                    r[i] += Xa[i, j] * (wj - wn)
                wa[j] = wn
                delta = fabs(wn - wj)
                if delta > max_delta:
                    max_delta = delta
        scale = 1.0
        for j in range(d):
            if fabs(wa[j]) > scale:
                scale = fabs(wa[j])
        if max_delta < tol * scale:
            converged = True
            break
    return np.asarray(wa), sweeps_used, converged


def best_split(X, y, int min_leaf=1):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Xa = np.ascontiguousarray(X, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ya = np.asarray(y, dtype=np.float64)
    cdef Py_ssize_t n = Xa.shape[0], d = Xa.shape[1]
    cdef Py_ssize_t best_feat = -1
    cdef double best_thr = 0.0, best_gain = -INFINITY
    if n < 2:
        return -1, 0.0, -INFINITY

    cdef double total = 0.0
    cdef Py_ssize_t i, j, k
    for i in range(n):
        total += ya[i]
    cdef double base = total * total / n

    cdef cnp.ndarray[cnp.int64_t, ndim=2] order = np.argsort(Xa, axis=0, kind="stable")
    cdef double left, gain, xk, xk1
    cdef Py_ssize_t nl
    for j in range(d):
        left = 0.0
        for k in range(n - 1):
            left += ya[order[k, j]]
            xk = Xa[order[k, j], j]
            xk1 = Xa[order[k + 1, j], j]
            if xk1 <= xk:
                continue
            nl = k + 1
            if nl < min_leaf or (n - nl) < min_leaf:
                continue
            gain = left * left / nl + (total - left) * (total - left) / (n - nl) - base
            if gain > best_gain:
                best_gain = gain
                best_feat = j
                best_thr = 0.5 * (xk + xk1)
    return best_feat, best_thr, best_gain


def svr_smo(K, y, double C, double epsilon, double tol, int max_iter):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Ka = np.ascontiguousarray(K, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ya = np.asarray(y, dtype=np.float64)
    cdef Py_ssize_t n = Ka.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z = np.zeros(2 * n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] G = np.empty(2 * n)
    cdef Py_ssize_t t, it, i, j, ki, kj
    cdef double g, m, M, eta, step, cap, ai, aj, dk
    cdef bint converged = False

    for t in range(n):
        G[t] = epsilon - ya[t]
        G[n + t] = epsilon + ya[t]

    cdef Py_ssize_t iters_used = 0
    for it in range(1, max_iter + 1):
        iters_used = it
        m = -INFINITY
        M = INFINITY
        i = -1
        j = -1
        for t in range(2 * n):
            g = -G[t] if t < n else G[t]  # -a_t * G_t
            if (z[t] < C) if t < n else (z[t] > 0.0):
                if g > m:
                    m = g
                    i = t
            if (z[t] > 0.0) if t < n else (z[t] < C):
                if g < M:
                    M = g
                    j = t
        if m - M < tol:
            converged = True
            break
        ki = i % n
        kj = j % n
        eta = Ka[ki, ki] + Ka[kj, kj] - 2.0 * Ka[ki, kj]
        if eta <= 1e-12:
            eta = 1e-12
        step = (m - M) / eta
        ai = 1.0 if i < n else -1.0
        aj = 1.0 if j < n else -1.0
        cap = (C - z[i]) if ai > 0.0 else z[i]
        if cap < step:
            step = cap
        cap = z[j] if aj > 0.0 else (C - z[j])
        if cap < step:
            step = cap
        z[i] += ai * step
        z[j] -= aj * step
        for t in range(n):
            dk = step * (Ka[t, ki] - Ka[t, kj])
            G[t] += dk
            G[n + t] -= dk

    cdef cnp.ndarray[cnp.float64_t, ndim=1] beta = np.empty(n)
    for t in range(n):
        beta[t] = z[t] - z[n + t]

    # bias from free variables, else midpoint of the final KKT bounds
    cdef double margin = 1e-8 * (C if C > 1.0 else 1.0)
    cdef double acc = 0.0
    cdef Py_ssize_t n_free = 0
    for t in range(2 * n):
        if z[t] > margin and z[t] < C - margin:
            acc += -G[t] if t < n else G[t]
            n_free += 1
    cdef double bias
    if n_free > 0:
        bias = acc / n_free
    else:
        m = -INFINITY
        M = INFINITY
        for t in range(2 * n):
            g = -G[t] if t < n else G[t]
            if (z[t] < C) if t < n else (z[t] > 0.0):
                if g > m:
                    m = g
            if (z[t] > 0.0) if t < n else (z[t] < C):
                if g < M:
                    M = g
        if m == -INFINITY or M == INFINITY:
            bias = 0.0
        else:
            bias = 0.5 * (m + M)
    return np.asarray(beta), bias, iters_used, converged

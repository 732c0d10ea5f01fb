"""Numpy implementations of the hot kernels.

These are the reference backend: the compiled extension in ``_fast.pyx``
mirrors the same contracts (and tie-breaking rules) loop-for-loop. See
``yieldcast.kernels`` for how a backend is selected.
"""

from __future__ import annotations

import numpy as np


def lasso_cd(X, y, alpha, max_sweeps, tol, w=None):
    """Cyclic coordinate descent for the L1-penalized least-squares
    objective 1/(2n) ||y - Xw||^2 + alpha ||w||_1.

    Returns (w, sweeps_used, converged). ``X`` must already carry any
    centering/scaling; no intercept is handled here.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    col_sq = np.einsum("ij,ij->j", X, X) / n
    w = np.zeros(d) if w is None else np.array(w, dtype=np.float64)
    r = y - X @ w
    sweeps = 0
    converged = False
    for sweeps in range(1, max_sweeps + 1):
        max_delta = 0.0
        for j in range(d):
            cj = col_sq[j]
            if cj <= 0.0:
                continue
            wj = w[j]
            rho = (X[:, j] @ r) / n + cj * wj
            wn = _soft(rho, alpha) / cj
            if wn != wj:
                r += X[:, j] * (wj - wn)
                w[j] = wn
                delta = abs(wn - wj)
                if delta > max_delta:
                    max_delta = delta
        scale = max(1.0, float(np.max(np.abs(w)))) if d else 1.0
        if max_delta < tol * scale:
            converged = True
            break
    return w, sweeps, converged


def _soft(rho, alpha):
    if rho > alpha:
        return rho - alpha
    if rho < -alpha:
        return rho + alpha
    return 0.0


def best_split(X, y, min_leaf=1):
    """Best variance-reduction split over all columns of X.

    Returns (feature, threshold, gain); feature is -1 when no valid
    split exists. Thresholds are midpoints between consecutive distinct
    values. Ties break toward the lowest feature index, then the lowest
    threshold.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    best_feat, best_thr, best_gain = -1, 0.0, -np.inf
    if n < 2:
        return best_feat, best_thr, best_gain
    total = float(y.sum())
    base = total * total / n
    sizes_left = np.arange(1, n, dtype=np.float64)
    sizes_right = n - sizes_left
    for j in range(d):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        left = np.cumsum(y[order])[:-1]
        valid = xs[1:] > xs[:-1]
        if min_leaf > 1:
            valid &= (sizes_left >= min_leaf) & (sizes_right >= min_leaf)
        if not valid.any():
            continue
        gain = left * left / sizes_left + (total - left) ** 2 / sizes_right - base
        gain[~valid] = -np.inf
        k = int(np.argmax(gain))
        if gain[k] > best_gain:
            best_feat = j
            best_thr = 0.5 * (xs[k] + xs[k + 1])
            best_gain = float(gain[k])
    return best_feat, best_thr, best_gain


def svr_smo(K, y, C, epsilon, tol, max_iter):
    """SMO solver for the epsilon-insensitive SVR dual.

    Minimizes 1/2 b'Kb - y'b + epsilon ||b||_1 over b in [-C, C]^n with
    sum(b) = 0, where b_i = alpha_i - alpha*_i, via maximal-violating-pair
    updates on the doubled variable vector z = (alpha, alpha*).

    Returns (beta, bias, iterations, converged).
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = K.shape[0]
    z = np.zeros(2 * n)
    # first half has constraint sign +1, second half -1
    G = np.concatenate([epsilon - y, epsilon + y])
    neg_aG = np.empty(2 * n)
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        neg_aG[:n] = -G[:n]
        neg_aG[n:] = G[n:]
        up = np.concatenate([z[:n] < C, z[n:] > 0])
        low = np.concatenate([z[:n] > 0, z[n:] < C])
        m_vals = np.where(up, neg_aG, -np.inf)
        M_vals = np.where(low, neg_aG, np.inf)
        i = int(np.argmax(m_vals))
        j = int(np.argmin(M_vals))
        m = m_vals[i]
        M = M_vals[j]
        if m - M < tol:
            converged = True
            break
        ki, kj = i % n, j % n
        eta = K[ki, ki] + K[kj, kj] - 2.0 * K[ki, kj]
        if eta <= 1e-12:
            eta = 1e-12
        step = (m - M) / eta
        ai = 1.0 if i < n else -1.0
        aj = 1.0 if j < n else -1.0
        cap_i = (C - z[i]) if ai > 0 else z[i]
        cap_j = z[j] if aj > 0 else (C - z[j])
        step = min(step, cap_i, cap_j)
        z[i] += ai * step
        z[j] -= aj * step
        dcol = K[:, ki] - K[:, kj]
        G[:n] += step * dcol
        G[n:] -= step * dcol
    beta = z[:n] - z[n:]
    bias = _svr_bias(z, G, C, n, tol)
    return beta, bias, it, converged


def _svr_bias(z, G, C, n, tol):
    neg_aG = np.concatenate([-G[:n], G[n:]])
    margin = 1e-8 * max(1.0, C)
    free = (z > margin) & (z < C - margin)
    if free.any():
        return float(neg_aG[free].mean())
    up = np.concatenate([z[:n] < C, z[n:] > 0])
    low = np.concatenate([z[:n] > 0, z[n:] < C])
    m = np.max(np.where(up, neg_aG, -np.inf))
    M = np.min(np.where(low, neg_aG, np.inf))
    if not np.isfinite(m) or not np.isfinite(M):
        return 0.0
    return float(0.5 * (m + M))

"""Independent reference computations for the tests.

Nothing here imports the solver or the DAG code: the dual is rebuilt from
an explicit matrix inverse and minimised by accelerated projected gradient,
and the DAG walk is a plain list-elimination loop.
"""
from __future__ import annotations

import numpy as np


def dense_dual(H_own, H_other, c_reg):
    """``Q = H_other (H_own'H_own + c I)^-1 H_other'`` and ``P`` via ``np.linalg.inv``."""
    k = H_own.shape[1]
    P = np.linalg.inv(H_own.T @ H_own + c_reg * np.eye(k))
    Q = H_other @ P @ H_other.T
    return 0.5 * (Q + Q.T), P


def box_qp(Q, upper, tol=1e-9, max_iter=5_000):
    """Minimise ``0.5 a'Qa - e'a`` over ``0 <= a <= upper``.

    FISTA with adaptive restart until the largest projected gradient is below
    ``tol``, then one active-set polish: solve the stationarity equations on
    the free coordinates and keep the result if it is feasible and no worse.
    Returns ``(a, objective)``.
    """
    l = len(upper)
    f_of = lambda v: 0.5 * v @ Q @ v - v.sum()
    if l == 0:
        return np.zeros(0), 0.0
    L = max(np.linalg.eigvalsh(Q).max(), 1e-12)
    a = np.zeros(l)
    y = a.copy()
    t = 1.0
    f_prev = np.inf
    for _ in range(max_iter):
        a_new = np.clip(y - (Q @ y - 1.0) / L, 0.0, upper)
        f = f_of(a_new)
        if f > f_prev:  # adaptive restart keeps the iteration monotone
            t, y = 1.0, a.copy()
            continue
        t_new = 0.5 * (1 + np.sqrt(1 + 4 * t * t))
        y = a_new + (t - 1) / t_new * (a_new - a)
        a, t, f_prev = a_new, t_new, f
        if box_kkt(Q, a, upper) < tol:
            break
    free = (a > 1e-10) & (a < upper - 1e-10)
    if free.any():
        b = a.copy()
        rhs = 1.0 - Q[np.ix_(free, ~free)] @ a[~free]
        b[free] = np.linalg.lstsq(Q[np.ix_(free, free)], rhs, rcond=None)[0]
        if np.all(b >= 0) and np.all(b <= upper) and f_of(b) <= f_of(a):
            a = b
    return a, f_of(a)


def box_kkt(Q, a, upper):
    """Largest projected-gradient magnitude of the box QP at ``a``."""
    g = Q @ a - 1.0
    pg = np.where(a <= 0, np.minimum(g, 0), np.where(a >= upper, np.maximum(g, 0), g))
    return float(np.max(np.abs(pg))) if len(pg) else 0.0


def ddag_walk(classes, prefer_first):
    """Reference DDAG: keep a list, compare its two ends, drop the loser.

    ``prefer_first(a, b)`` says whether the node for the pair picks ``a``.
    Returns ``(label, evaluations)``.
    """
    cand = list(classes)
    evals = 0
    while len(cand) > 1:
        a, b = cand[0], cand[-1]
        evals += 1
        if prefer_first(a, b):
            cand.pop()
        else:
            cand.pop(0)
    return cand[0], evals


def gaussian_kernel(X, Y, gamma):
    d2 = ((X[:, None, :] - Y[None, :, :]) ** 2).sum(-1)
    return np.exp(-gamma * d2)

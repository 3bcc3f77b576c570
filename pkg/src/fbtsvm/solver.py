"""Dual coordinate descent with shrinking for one bounded twin-SVM dual.

Solves ``min_a 0.5 a'Qa - e'a  s.t. 0 <= a <= upper`` with
``Q = H_other P H_other'`` and ``P = (H_own'H_own + C I)^-1``. ``Q`` is never
formed: the solver keeps the primal stack ``u = -P H_other' a`` and reads
each gradient coordinate as ``-H_other[i] . u - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy import linalg


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-3
    max_sweeps: int = 1000
    shrink_rate: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if not 0 < self.shrink_rate < 1:
            raise ValueError("shrink_rate must lie in (0, 1)")


@dataclass(frozen=True)
class SolverContext:
    H_own: np.ndarray    # (l_own, N+1)
    H_other: np.ndarray  # (l_other, N+1)
    C_reg: float
    qcols: np.ndarray    # (N+1, l_other) = P H_other'
    diag: np.ndarray     # (l_other,)  H_other[i] . qcols[:, i]

    @property
    def q_rows(self) -> np.ndarray:
        # row-major copy of qcols' for the kernel, built once
        if "_q_rows" not in self.__dict__:
            self.__dict__["_q_rows"] = np.ascontiguousarray(self.qcols.T)
        return self.__dict__["_q_rows"]

    @property
    def dim(self) -> int:
        return self.H_other.shape[1]


@dataclass
class SolverState:
    alpha: np.ndarray
    u: np.ndarray
    upper: np.ndarray
    band: tuple = (0.0, 0.0)   # (m_min, m_max) of the exit projected gradients, 0 included
    final_pg: np.ndarray = field(default_factory=lambda: np.zeros(0))
    converged: bool = True
    sweeps: int = 0
    objective_trace: list = field(default_factory=list)

    @classmethod
    def cold(cls, upper, dim: int) -> "SolverState":
        upper = np.asarray(upper, dtype=np.float64)
        return cls(np.zeros_like(upper), np.zeros(dim), upper)


def augment(Z) -> np.ndarray:
    """``[Z, e]``: append the bias column of ones."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    return np.hstack([Z, np.ones((Z.shape[0], 1))])


def precompute(H_own, H_other, C_reg: float, method: str = "auto") -> SolverContext:
    """Factor the regularised own-class Gram and form ``qcols`` and its diagonal.

    ``method="auto"`` factors the (N+1)-square system when N+1 <= l_own and
    otherwise goes through the l_own-square Woodbury identity.
    """
    H_own = np.ascontiguousarray(H_own, dtype=np.float64)
    H_other = np.ascontiguousarray(H_other, dtype=np.float64).reshape(-1, H_own.shape[1])
    if not C_reg > 0:
        raise ValueError("C_reg must be > 0")
    if not (np.all(np.isfinite(H_own)) and np.all(np.isfinite(H_other))):
        raise SolverError("non-finite entries in H")
    l_own, k = H_own.shape
    if method == "auto":
        method = "direct" if k <= l_own else "woodbury"
    if method == "direct":
        A = H_own.T @ H_own
        A[np.diag_indices_from(A)] += C_reg
        qcols = linalg.cho_solve(linalg.cho_factor(A), H_other.T)
    elif method == "woodbury":
        # (C I + H'H)^-1 = (I - H' (C I + H H')^-1 H) / C
        B = H_own @ H_own.T
        B[np.diag_indices_from(B)] += C_reg
        inner = linalg.cho_solve(linalg.cho_factor(B), H_own @ H_other.T)
        qcols = (H_other.T - H_own.T @ inner) / C_reg
    else:
        raise ValueError(f"unknown method {method!r}")
    qcols = np.ascontiguousarray(qcols)
    diag = np.einsum("ij,ji->i", H_other, qcols)
    return SolverContext(H_own, H_other, float(C_reg), qcols, diag)


def projected_gradient(g: float, alpha_i: float, upper_i: float) -> float:
    if alpha_i <= 0.0:
        return min(0.0, g)
    if alpha_i >= upper_i:
        return max(0.0, g)
    return g


def projected_gradients(g, alpha, upper) -> np.ndarray:
    return np.where(alpha <= 0.0, np.minimum(g, 0.0),
                    np.where(alpha >= upper, np.maximum(g, 0.0), g))


def update_coordinate(alpha_i: float, g: float, D_i: float, upper_i: float) -> float:
    return min(max(alpha_i - g / D_i, 0.0), upper_i)


def gradients(ctx: SolverContext, u) -> np.ndarray:
    return -(ctx.H_other @ u) - 1.0


def dual_objective(ctx: SolverContext, alpha, u=None) -> float:
    """``0.5 a'Qa - e'a`` using ``Qa = -H_other u``."""
    if u is None:
        u = -(ctx.qcols @ alpha)
    return float(-0.5 * alpha @ (ctx.H_other @ u) - alpha.sum())


@njit(cache=True, nogil=True)
def _sweep(H, QT, diag, upper, alpha, u, order, pgmax_old, pgmin_old):
    keep = np.empty_like(order)
    n_keep = 0
    pgmax = -np.inf
    pgmin = np.inf
    k = u.shape[0]
    for t in range(order.shape[0]):
        i = order[t]
        g = -1.0
        for j in range(k):
            g -= H[i, j] * u[j]
        pg = 0.0
        if alpha[i] <= 0.0:
            if g > pgmax_old:
                continue
            if g < 0.0:
                pg = g
        elif alpha[i] >= upper[i]:
            if g < pgmin_old:
                continue
            if g > 0.0:
                pg = g
        else:
            pg = g
        keep[n_keep] = i
        n_keep += 1
        if pg > pgmax:
            pgmax = pg
        if pg < pgmin:
            pgmin = pg
        if pg != 0.0:
            old = alpha[i]
            new = min(max(old - g / diag[i], 0.0), upper[i])
            alpha[i] = new
            step = new - old
            if step != 0.0:
                for j in range(k):
                    u[j] -= QT[i, j] * step
    return keep[:n_keep], pgmax, pgmin


def solve(ctx: SolverContext, state: SolverState, cfg: SolverConfig,
          check_descent: bool = False) -> SolverState:
    """Run shrinking coordinate descent from ``state`` (warm starts allowed).

    Returns a fresh state; the input is not modified. Convergence means the
    projected-gradient spread fell below ``epsilon`` on the full index set
    and every projected gradient, recomputed from scratch, is within
    ``epsilon`` of zero.
    """
    l = ctx.H_other.shape[0]
    upper = np.array(state.upper, dtype=np.float64)
    if state.alpha is None:
        alpha = np.zeros_like(upper)
    else:
        alpha = np.clip(np.array(state.alpha, dtype=np.float64), 0.0, upper)
    if l == 0:
        return SolverState(alpha, np.zeros(ctx.dim), upper)
    u = -(ctx.qcols @ alpha)
    H, QT, diag = ctx.H_other, ctx.q_rows, ctx.diag
    rng = np.random.default_rng(cfg.seed)

    everything = np.arange(l, dtype=np.int64)
    active = everything
    pgmax_old, pgmin_old = math.inf, -math.inf
    trace = [dual_objective(ctx, alpha, u)] if check_descent else []
    converged = False
    pg_all = np.zeros(l)
    sweeps = 0
    while sweeps < cfg.max_sweeps:
        sweeps += 1
        full = active.size == l
        order = rng.permutation(active)
        active, pgmax, pgmin = _sweep(H, QT, diag, upper, alpha, u, order, pgmax_old, pgmin_old)
        if not np.all(np.isfinite(u)):
            raise SolverError("non-finite gradient: broken solver context")
        if check_descent:
            trace.append(dual_objective(ctx, alpha, u))
        if pgmax - pgmin < cfg.epsilon:
            if full and active.size == l:
                u = -(ctx.qcols @ alpha)
                pg_all = projected_gradients(gradients(ctx, u), alpha, upper)
                if np.max(np.abs(pg_all)) <= cfg.epsilon:
                    converged = True
                    break
            active = everything
            pgmax_old, pgmin_old = math.inf, -math.inf
            continue
        pgmax_old = cfg.shrink_rate * pgmax if pgmax > 0 else math.inf
        pgmin_old = cfg.shrink_rate * pgmin if pgmin < 0 else -math.inf
    if not converged:
        u = -(ctx.qcols @ alpha)
        pg_all = projected_gradients(gradients(ctx, u), alpha, upper)
    band = (min(float(pg_all.min()), 0.0), max(float(pg_all.max()), 0.0))
    return SolverState(alpha, u, upper, band, pg_all, converged, sweeps, trace)

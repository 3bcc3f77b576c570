"""Two-class fuzzy bounded twin SVM: training and the nearest-plane decision."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fuzzy import ClassGeometry, FuzzyParams, memberships
from .solver import SolverConfig, SolverContext, SolverState, augment, precompute, solve

POLICIES = ("extrema", "mean", "median", "quartiles", "all")


class DegeneratePlaneError(ValueError):
    """A hyperplane with zero normal vector."""


@dataclass(frozen=True)
class Hyperparams:
    """Trade-offs, fuzzy and solver settings, plus the forgetting/screening knobs.

    ``c3``/``c4`` default to ``c1``/``c2``. ``d`` is the forgetting score
    (``math.inf`` disables forgetting) and ``phi`` the multiplier threshold.
    """

    c1: float = 1.0
    c2: float = 1.0
    c3: float | None = None
    c4: float | None = None
    fuzzy: FuzzyParams = field(default_factory=FuzzyParams)
    solver: SolverConfig = field(default_factory=SolverConfig)
    d: float = math.inf
    phi: float = 1e-3
    policy: str = "extrema"

    def __post_init__(self):
        if self.c3 is None:
            object.__setattr__(self, "c3", self.c1)
        if self.c4 is None:
            object.__setattr__(self, "c4", self.c2)
        for name in ("c1", "c2", "c3", "c4", "phi"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not (self.d == math.inf or (self.d >= 1 and float(self.d).is_integer())):
            raise ValueError("d must be a positive integer or inf")
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")


@dataclass(frozen=True)
class ForgettingState:
    counts_pos: np.ndarray
    counts_neg: np.ndarray
    d: float
    phi: float


@dataclass(frozen=True)
class BinaryModel:
    """State of one node. Problem 1 (plane near positives) owns ``alpha`` and
    ``u_plus``; problem 2 owns ``nu`` and ``u_minus``.

    Rows are stored after feature mapping. ``bounds1``/``bounds2`` hold the
    extreme projected gradients ``(m_min, m_max)`` at the end of each solve and ``pg1``/``pg2`` the
    projected gradients seen at exit; both feed the incremental screen.
    """

    u_plus: np.ndarray
    u_minus: np.ndarray
    alpha: np.ndarray
    nu: np.ndarray
    retained_pos: np.ndarray
    retained_neg: np.ndarray
    s_pos: np.ndarray
    s_neg: np.ndarray
    geom_pos: ClassGeometry
    geom_neg: ClassGeometry
    bounds1: tuple
    bounds2: tuple
    pg1: np.ndarray
    pg2: np.ndarray
    counts_pos: np.ndarray
    counts_neg: np.ndarray
    converged: bool = True
    stale: bool = False
    trainings: int = 1

    @property
    def n_sv(self) -> int:
        return len(self.retained_pos) + len(self.retained_neg)

    @property
    def degenerate(self) -> bool:
        return not (np.any(self.u_plus[:-1]) and np.any(self.u_minus[:-1]))

    def forgetting(self, hp: Hyperparams) -> ForgettingState:
        return ForgettingState(self.counts_pos, self.counts_neg, hp.d, hp.phi)


def contexts(pos, neg, hp: Hyperparams) -> tuple[SolverContext, SolverContext]:
    """Solver contexts for problem 1 (own = positives) and problem 2 (own = negatives)."""
    H_pos, H_neg = augment(pos), augment(neg)
    return precompute(H_pos, H_neg, hp.c1), precompute(H_neg, H_pos, hp.c2)


def solve_pair(pos, neg, s_pos, s_neg, alpha, nu, hp: Hyperparams):
    ctx1, ctx2 = contexts(pos, neg, hp)
    st1 = solve(ctx1, SolverState(alpha, None, hp.c3 * s_neg), hp.solver)
    st2 = solve(ctx2, SolverState(nu, None, hp.c4 * s_pos), hp.solver)
    # problem 2's stack carries the opposite sign: u_minus = +P2 H_pos' nu
    return st1, st2, st1.u, -st2.u


def fit_state(pos, neg, s_pos, s_neg, alpha, nu, counts_pos, counts_neg,
              geom_pos, geom_neg, hp: Hyperparams, trainings: int) -> BinaryModel:
    st1, st2, u_plus, u_minus = solve_pair(pos, neg, s_pos, s_neg, alpha, nu, hp)
    return BinaryModel(
        u_plus=u_plus, u_minus=u_minus, alpha=st1.alpha, nu=st2.alpha,
        retained_pos=pos, retained_neg=neg, s_pos=s_pos, s_neg=s_neg,
        geom_pos=geom_pos, geom_neg=geom_neg, bounds1=st1.band, bounds2=st2.band,
        pg1=st1.final_pg, pg2=st2.final_pg, counts_pos=counts_pos, counts_neg=counts_neg,
        converged=st1.converged and st2.converged, stale=False, trainings=trainings,
    )


def train_binary(pos, neg, hp: Hyperparams) -> BinaryModel:
    """Train both planes from feature-mapped rows of the positive and negative class."""
    pos = np.atleast_2d(np.asarray(pos, dtype=np.float64))
    neg = np.atleast_2d(np.asarray(neg, dtype=np.float64))
    if pos.shape[0] == 0 or neg.shape[0] == 0:
        raise ValueError("train_binary needs at least one point of each class")
    if pos.shape[1] != neg.shape[1]:
        raise ValueError("positive and negative rows differ in dimension")
    geom_pos, geom_neg = ClassGeometry.of(pos), ClassGeometry.of(neg)
    s_pos = memberships(pos, geom_pos, geom_neg, hp.fuzzy)
    s_neg = memberships(neg, geom_neg, geom_pos, hp.fuzzy)
    return fit_state(pos, neg, s_pos, s_neg, np.zeros(len(neg)), np.zeros(len(pos)),
                     np.zeros(len(pos), dtype=np.int64), np.zeros(len(neg), dtype=np.int64),
                     geom_pos, geom_neg, hp, trainings=1)


def plane_distance(u, x) -> float | np.ndarray:
    """Perpendicular distance ``|x.w + b| / ||w||`` of ``x`` (or rows of ``x``) to plane ``u = [w; b]``."""
    w, b = u[:-1], u[-1]
    norm = np.linalg.norm(w)
    if norm == 0:
        raise DegeneratePlaneError("plane has a zero normal vector")
    return np.abs(np.asarray(x) @ w + b) / norm


def _side_scores(u, X):
    w, b = u[:-1], u[-1]
    norm = np.linalg.norm(w)
    raw = np.abs(X @ w + b)
    return raw / norm if norm > 0 else raw


def decision(model: BinaryModel, X) -> np.ndarray:
    """Boolean array, True where a row is nearer the positive plane (ties count as positive)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if not (np.any(model.u_plus[:-1]) or np.any(model.u_minus[:-1])):
        raise DegeneratePlaneError("both planes are degenerate")
    return _side_scores(model.u_plus, X) <= _side_scores(model.u_minus, X)


def classify_binary(model: BinaryModel, x) -> int:
    return 1 if decision(model, np.asarray(x)[None, :] if np.ndim(x) == 1 else x)[0] else -1


def u_residuals(model: BinaryModel, hp: Hyperparams) -> tuple[float, float]:
    """Relative gaps between the stored stacks and ``-+P H' multipliers`` recomputed from scratch."""
    H_pos, H_neg = augment(model.retained_pos), augment(model.retained_neg)
    k = H_pos.shape[1]
    P1 = np.linalg.inv(H_pos.T @ H_pos + hp.c1 * np.eye(k))
    P2 = np.linalg.inv(H_neg.T @ H_neg + hp.c2 * np.eye(k))
    r1 = np.linalg.norm(model.u_plus + P1 @ H_neg.T @ model.alpha) / (1 + np.linalg.norm(model.u_plus))
    r2 = np.linalg.norm(model.u_minus - P2 @ H_pos.T @ model.nu) / (1 + np.linalg.norm(model.u_minus))
    return float(r1), float(r2)

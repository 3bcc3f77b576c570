"""Growing a trained node from a stream batch and pruning long-idle points."""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .binary import POLICIES, BinaryModel, Hyperparams, augment, contexts, fit_state
from .fuzzy import memberships


class ClassCollapseError(RuntimeError):
    """Forgetting would remove every retained point of one class."""


def _policy_band(pg, extrema, policy):
    if policy == "extrema":
        return extrema
    if policy == "all":
        return (math.inf, -math.inf)  # empty band: every point falls outside
    if pg.size == 0:
        return extrema
    if policy == "quartiles":
        lo, hi = np.percentile(pg, [25, 75])
    else:
        stat = np.mean if policy == "mean" else np.median
        neg, pos = pg[pg < 0], pg[pg > 0]
        lo = stat(neg) if neg.size else 0.0
        hi = stat(pos) if pos.size else 0.0
    return (max(float(lo), extrema[0]), min(float(hi), extrema[1]))


def screen_bands(model: BinaryModel, policy: str) -> tuple[tuple, tuple]:
    """Bands applied to new negatives (problem 1) and new positives (problem 2)."""
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    return (_policy_band(model.pg1, model.bounds1, policy),
            _policy_band(model.pg2, model.bounds2, policy))


def new_point_gradients(model: BinaryModel, Z, positive) -> np.ndarray:
    """Gradient each new row would have as a fresh (zero) multiplier in the
    problem where it acts as a constraint."""
    H = augment(Z)
    g = np.empty(len(H))
    g[~positive] = -(H[~positive] @ model.u_plus) - 1.0
    g[positive] = H[positive] @ model.u_minus - 1.0
    return g


def screen(model: BinaryModel, Z, positive, policy: str = "extrema") -> np.ndarray:
    """Mask of rows whose gradient falls outside their band (these are admitted)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    positive = np.asarray(positive, dtype=bool)
    if len(Z) == 0:
        return np.zeros(0, dtype=bool)
    g = new_point_gradients(model, Z, positive)
    band1, band2 = screen_bands(model, policy)
    lo = np.where(positive, band2[0], band1[0])
    hi = np.where(positive, band2[1], band1[1])
    return (g > hi) | (g < lo)


def increment(model: BinaryModel, Z, positive, hp: Hyperparams, policy: str | None = None) -> BinaryModel:
    """Admit screened rows with zero multipliers and re-solve warm.

    Class centers stay frozen. A radius widens only as far as needed to
    cover admitted rows of its class, so earlier memberships (and the
    bounds built on them) are untouched.
    """
    policy = policy or hp.policy
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    positive = np.asarray(positive, dtype=bool)
    if len(Z) and Z.shape[1] != model.retained_pos.shape[1]:
        raise ValueError(f"batch has {Z.shape[1]} features, model expects {model.retained_pos.shape[1]}")
    admitted = screen(model, Z, positive, policy) if len(Z) else np.zeros(0, dtype=bool)
    if not admitted.any() and not model.stale:
        return model
    new_pos = Z[admitted & positive]
    new_neg = Z[admitted & ~positive]
    pos = np.vstack([model.retained_pos, new_pos])
    neg = np.vstack([model.retained_neg, new_neg])
    geom_pos = model.geom_pos.widened(new_pos)
    geom_neg = model.geom_neg.widened(new_neg)
    s_pos = np.concatenate([model.s_pos, memberships(new_pos, geom_pos, geom_neg, hp.fuzzy)])
    s_neg = np.concatenate([model.s_neg, memberships(new_neg, geom_neg, geom_pos, hp.fuzzy)])
    alpha = np.concatenate([model.alpha, np.zeros(len(new_neg))])
    nu = np.concatenate([model.nu, np.zeros(len(new_pos))])
    counts_pos = np.concatenate([model.counts_pos, np.zeros(len(new_pos), dtype=np.int64)])
    counts_neg = np.concatenate([model.counts_neg, np.zeros(len(new_neg), dtype=np.int64)])
    return fit_state(pos, neg, s_pos, s_neg, alpha, nu, counts_pos, counts_neg,
                     geom_pos, geom_neg, hp, trainings=model.trainings + 1)


def decrement(model: BinaryModel, hp: Hyperparams) -> BinaryModel:
    """Count passes with multiplier below ``phi``; drop rows whose count reaches ``d``.

    Counters accumulate and never reset. Stacks are recomputed from the
    surviving multipliers; the model is marked stale so the next increment
    re-solves even if it admits nothing.
    """
    if hp.d == math.inf:
        return model
    counts_pos = model.counts_pos + (model.nu < hp.phi)
    counts_neg = model.counts_neg + (model.alpha < hp.phi)
    keep_pos = counts_pos < hp.d
    keep_neg = counts_neg < hp.d
    if not keep_pos.any() or not keep_neg.any():
        raise ClassCollapseError("forgetting would empty a class")
    if keep_pos.all() and keep_neg.all():
        return replace(model, counts_pos=counts_pos, counts_neg=counts_neg)
    pos, neg = model.retained_pos[keep_pos], model.retained_neg[keep_neg]
    alpha, nu = model.alpha[keep_neg], model.nu[keep_pos]
    ctx1, ctx2 = contexts(pos, neg, hp)
    return replace(
        model,
        retained_pos=pos, retained_neg=neg,
        s_pos=model.s_pos[keep_pos], s_neg=model.s_neg[keep_neg],
        alpha=alpha, nu=nu,
        u_plus=-(ctx1.qcols @ alpha), u_minus=ctx2.qcols @ nu,
        pg1=np.zeros(0), pg2=np.zeros(0),
        counts_pos=counts_pos[keep_pos], counts_neg=counts_neg[keep_neg],
        stale=True,
    )


def update(model: BinaryModel, Z, positive, hp: Hyperparams, policy: str | None = None) -> BinaryModel:
    """Forget, then learn. The initial ``train_binary`` call is the only training
    not preceded by a decrement."""
    return increment(decrement(model, hp), Z, positive, hp, policy)

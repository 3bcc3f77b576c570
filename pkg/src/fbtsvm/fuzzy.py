"""Fuzzy memberships from class centers and radii."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FuzzyParams:
    mu: float = 0.1
    delta: float = 1e-4

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu}")
        if not self.delta > 0.0:
            raise ValueError(f"delta must be > 0, got {self.delta}")


@dataclass(frozen=True)
class ClassGeometry:
    center: np.ndarray
    radius: float

    @classmethod
    def of(cls, points) -> "ClassGeometry":
        c = class_center(points)
        return cls(c, class_radius(points, c))

    def widened(self, points) -> "ClassGeometry":
        """Same center, radius grown to reach ``points`` if any lie farther out."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if points.shape[0] == 0:
            return self
        return ClassGeometry(self.center, max(self.radius, class_radius(points, self.center)))


def class_center(points) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[0] == 0:
        raise ValueError("class_center of an empty class")
    return points.mean(axis=0)


def class_radius(points, center) -> float:
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[0] == 0:
        raise ValueError("class_radius of an empty class")
    return float(np.max(np.linalg.norm(points - center, axis=1)))


def memberships(X, own: ClassGeometry, other: ClassGeometry, p: FuzzyParams) -> np.ndarray:
    """Vectorised membership of every row of ``X`` with respect to its own class.

    Rows at least as close to the opposite center get the ``mu`` branch,
    the rest the ``1 - mu`` branch. Rows at or beyond the stored radius,
    where the formula is not positive, get ``delta * mu`` instead so their
    dual bound stays strictly positive.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    d_own = np.linalg.norm(X - own.center, axis=1)
    d_other = np.linalg.norm(X - other.center, axis=1)
    decay = 1.0 - d_own / (own.radius + p.delta)
    s = np.where(d_own >= d_other, p.mu, 1.0 - p.mu) * decay
    return np.where(s > 0, s, p.delta * p.mu)


def membership(x, own: ClassGeometry, other: ClassGeometry, p: FuzzyParams) -> float:
    return float(memberships(np.asarray(x, dtype=np.float64)[None, :], own, other, p)[0])

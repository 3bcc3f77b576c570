"""Random Fourier features for the Gaussian kernel exp(-gamma ||x - y||^2)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FourierMap:
    tau: np.ndarray      # (N, n) frequencies
    offsets: np.ndarray  # (N,) phases in [0, 2*pi)
    gamma: float
    seed: int = 0

    @property
    def n(self) -> int:
        return self.tau.shape[1]

    @property
    def N(self) -> int:
        return self.tau.shape[0]

    @property
    def out_dim(self) -> int:
        return self.N

    def transform(self, X) -> np.ndarray:
        return transform(self, X)

    def features(self, X) -> np.ndarray:
        """Training features ``sqrt(2) cos(tau x + b)``: ``transform`` scaled by sqrt(N).

        Inner products approximate ``N k(x, y)``, which keeps each coordinate
        on the scale of a raw attribute so C values carry over between the
        linear and the Fourier setting.
        """
        return np.sqrt(self.N) * transform(self, X)


@dataclass(frozen=True)
class IdentityMap:
    """Stand-in for the linear kernel: features pass through untouched."""

    n: int

    @property
    def out_dim(self) -> int:
        return self.n

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.n:
            raise ValueError(f"expected {self.n} features, got {X.shape[-1]}")
        return X

    features = transform


def sample_map(n: int, N: int, gamma: float, seed: int = 0) -> FourierMap:
    if n < 1 or N < 1:
        raise ValueError("n and N must be >= 1")
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    rng = np.random.default_rng(seed)
    # spectral density of exp(-gamma |d|^2) is N(0, 2 gamma I)
    tau = rng.normal(0.0, np.sqrt(2.0 * gamma), size=(N, n))
    offsets = rng.uniform(0.0, 2.0 * np.pi, size=N)
    return FourierMap(tau, offsets, float(gamma), seed)


def transform(m: FourierMap, X) -> np.ndarray:
    """``sqrt(2/N) cos(tau x + b)`` for a single vector or each row of a matrix."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != m.n:
        raise ValueError(f"expected {m.n} features, got {X.shape[-1]}")
    return np.sqrt(2.0 / m.N) * np.cos(X @ m.tau.T + m.offsets)


def feature_map(kernel_size, n: int, gamma: float | None = None, seed: int = 0):
    """Build the map named on the command line: an int N, or ``"linear"``."""
    if kernel_size in (None, "linear"):
        return IdentityMap(n)
    return sample_map(n, int(kernel_size), gamma, seed)

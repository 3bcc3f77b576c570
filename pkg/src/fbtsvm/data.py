"""Datasets, file loaders, batching and synthetic stream generators."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np


class DataError(ValueError):
    """Malformed or unusable input data."""


class LabeledPoint(NamedTuple):
    features: np.ndarray
    label: int


@dataclass(frozen=True)
class Dataset:
    """Dense rows ``X`` (l x n) with integer labels ``y`` (>= 1)."""

    X: np.ndarray
    y: np.ndarray
    classes: tuple = field(init=False)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim == 1:
            X = X.reshape(-1, 1) if len(y) != 1 else X.reshape(1, -1)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise DataError(f"feature matrix {X.shape} does not match {y.shape[0]} labels")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain NaN or Inf")
        if y.size and y.min() < 1:
            raise DataError("labels must be >= 1")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "classes", tuple(int(c) for c in np.unique(y)))

    @property
    def n(self) -> int:
        return self.X.shape[1]

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def points(self) -> list[LabeledPoint]:
        return [LabeledPoint(x, int(c)) for x, c in zip(self.X, self.y)]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.X[idx], self.y[idx])

    def of_class(self, label: int) -> np.ndarray:
        return self.X[self.y == label]

    @classmethod
    def empty(cls, n: int) -> "Dataset":
        return cls(np.zeros((0, n)), np.zeros(0, dtype=np.int64))


@dataclass(frozen=True)
class BatchPlan:
    batch_size: int
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise DataError("batch_size must be >= 1")


# -- loaders ---------------------------------------------------------------

def load_libsvm(path) -> Dataset:
    """Parse ``label idx:val ...`` lines (1-based indices) into a dense Dataset."""
    path = Path(path)
    labels, rows = [], []
    n = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            try:
                label = int(float(tokens[0]))
                entries = {}
                last = 0
                for tok in tokens[1:]:
                    idx, val = tok.split(":")
                    idx = int(idx)
                    if idx <= last:
                        raise ValueError("indices must be 1-based and ascending")
                    entries[idx] = float(val)
                    last = idx
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: malformed line ({exc})") from None
            n = max(n, last)
            labels.append(label)
            rows.append(entries)
    if not rows:
        raise DataError(f"{path}: empty file")
    X = np.zeros((len(rows), n))
    for i, entries in enumerate(rows):
        for idx, val in entries.items():
            X[i, idx - 1] = val
    return Dataset(X, np.array(labels))


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def load_csv(path, label_column: int = -1) -> Dataset:
    """Read a rectangular numeric CSV; a first row with any non-numeric cell is a header."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and not all(_is_number(t) for t in rows[0]):
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: empty file")
    width = len(rows[0])
    for lineno, r in enumerate(rows, 1):
        if len(r) != width:
            raise DataError(f"{path}: ragged row {lineno} ({len(r)} cells, expected {width})")
    try:
        table = np.array(rows, dtype=np.float64)
    except ValueError:
        raise DataError(f"{path}: non-numeric cell") from None
    col = label_column % width
    y = table[:, col]
    if np.any(y != np.round(y)):
        raise DataError(f"{path}: non-integer label")
    return Dataset(np.delete(table, col, axis=1), y.astype(np.int64))


def load(path, label_column: int = -1) -> Dataset:
    """Dispatch on extension: ``.csv`` goes to :func:`load_csv`, anything else is LIBSVM."""
    if str(path).lower().endswith(".csv"):
        return load_csv(path, label_column)
    return load_libsvm(path)


def write_libsvm(d: Dataset, path) -> None:
    with open(path, "w") as fh:
        for x, c in zip(d.X, d.y):
            nz = np.flatnonzero(x)
            feats = " ".join(f"{j + 1}:{x[j]:.17g}" for j in nz)
            fh.write(f"{c} {feats}".rstrip() + "\n")


def write_csv(d: Dataset, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"f{j + 1}" for j in range(d.n)] + ["label"])
        for x, c in zip(d.X, d.y):
            w.writerow([f"{v:.17g}" for v in x] + [int(c)])


# -- splitting and batching --------------------------------------------------

def stratified_split(d: Dataset, test_fraction: float, seed: int = 0) -> tuple[Dataset, Dataset]:
    if not 0 < test_fraction < 1:
        raise DataError("test_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for c in d.classes:
        idx = np.flatnonzero(d.y == c)
        if idx.size < 2:
            raise DataError(f"class {c} has a single point; cannot stratify")
        idx = rng.permutation(idx)
        k = int(round(test_fraction * idx.size))
        k = min(max(k, 1), idx.size - 1)
        test_idx.append(idx[:k])
        train_idx.append(idx[k:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    return d.subset(train_idx), d.subset(test_idx)


def batches(d: Dataset, plan: BatchPlan) -> list[Dataset]:
    """Seeded shuffle cut into consecutive batches; the first batch holds every class."""
    if plan.batch_size > len(d):
        raise DataError(f"batch_size {plan.batch_size} exceeds dataset size {len(d)}")
    order = np.random.default_rng(plan.seed).permutation(len(d))
    head = min(plan.batch_size, len(d))
    # swap the earliest point of each missing class into the tail of the first batch
    slot = head - 1
    for c in d.classes:
        labels = d.y[order]
        if np.any(labels[:head] == c):
            continue
        src = head + int(np.flatnonzero(labels[head:] == c)[0])
        present = labels[:head]
        # pick a slot whose class stays represented after the swap
        while slot >= 0 and np.count_nonzero(present == present[slot]) < 2:
            slot -= 1
        if slot < 0:
            raise DataError("batch_size is smaller than the number of classes")
        order[slot], order[src] = order[src], order[slot]
        slot -= 1
    return [d.subset(order[i:i + plan.batch_size]) for i in range(0, len(d), plan.batch_size)]


def iter_batches(d: Dataset, batch_size: int) -> Iterator[Dataset]:
    """Unshuffled consecutive chunks, for replaying a stream in file order."""
    for i in range(0, len(d), batch_size):
        yield d.subset(np.arange(i, min(i + batch_size, len(d))))


# -- synthetic streams ---------------------------------------------------------

def gen_hyper(count: int, dim: int = 10, noise_fraction: float = 0.0, seed: int = 0,
              return_plane: bool = False):
    """Uniform points in [0,1]^dim labelled 1/2 by a fixed random hyperplane.

    The plane is ``w . x = sum(w)/2`` with ``w ~ U[0,1]^dim``; an exact
    ``noise_fraction`` of labels (rounded) is flipped.
    """
    if dim < 2:
        raise DataError("dim must be >= 2")
    if not 0 <= noise_fraction < 1:
        raise DataError("noise_fraction must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.0, 1.0, dim)
    w0 = 0.5 * w.sum()
    X = rng.uniform(0.0, 1.0, (count, dim))
    y = np.where(X @ w >= w0, 1, 2)
    y = _flip(y, noise_fraction, rng)
    d = Dataset(X, y)
    return (d, (w, w0)) if return_plane else d


def sea_label(X: np.ndarray, threshold: float) -> np.ndarray:
    return np.where(X[:, 0] + X[:, 1] <= threshold, 1, 2)


def gen_sea(count: int, noise_fraction: float = 0.0, threshold: float = 8.0, seed: int = 0) -> Dataset:
    """Three attributes uniform in [0,10]; label 1 iff f1 + f2 <= threshold, f3 irrelevant."""
    if not 0 < threshold < 20:
        raise DataError("threshold must lie in (0, 20)")
    if not 0 <= noise_fraction < 1:
        raise DataError("noise_fraction must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 10.0, (count, 3))
    y = _flip(sea_label(X, threshold), noise_fraction, rng)
    return Dataset(X, y)


def _flip(y, noise_fraction, rng):
    k = int(round(noise_fraction * y.size))
    if k:
        idx = rng.choice(y.size, size=k, replace=False)
        y = y.copy()
        y[idx] = 3 - y[idx]
    return y


def gen_blobs(per_class: int, centers, std: float = 1.0, seed: int = 0) -> Dataset:
    """Isotropic Gaussian blobs, class ``k+1`` around ``centers[k]``."""
    rng = np.random.default_rng(seed)
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    X = np.concatenate([c + std * rng.standard_normal((per_class, centers.shape[1])) for c in centers])
    y = np.repeat(np.arange(1, len(centers) + 1), per_class)
    perm = rng.permutation(len(y))
    return Dataset(X[perm], y[perm])

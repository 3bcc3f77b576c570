"""Decision-DAG composition of pairwise nodes for u-class problems."""
from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from itertools import combinations

import numpy as np

from .binary import BinaryModel, Hyperparams, decision, train_binary
from .data import Dataset
from .incremental import ClassCollapseError, increment, update

log = logging.getLogger(__name__)


class UnknownClassError(ValueError):
    pass


def default_threads() -> int:
    env = os.environ.get("FBTSVM_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class DagModel:
    classes: tuple
    nodes: dict        # (i, j) with i < j -> BinaryModel; class i is the positive side
    fourier: object    # FourierMap or IdentityMap
    hp: Hyperparams
    train_seconds: float = 0.0

    @property
    def n(self) -> int:
        return self.fourier.n

    @property
    def n_sv(self) -> int:
        return sum(node.n_sv for node in self.nodes.values())

    @property
    def converged(self) -> bool:
        return all(node.converged for node in self.nodes.values())


@dataclass
class MetricsReport:
    accuracy: float
    per_class: dict
    n_sv: int
    train_seconds: float
    predict_seconds: float
    converged: bool
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        d["per_class"] = {str(k): v for k, v in self.per_class.items()}
        d.update(self.extra)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _map_points(fourier, X):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != fourier.n:
        raise ValueError(f"data has {X.shape[1]} features, model expects {fourier.n}")
    return fourier.features(X)


def _run(fn, items, threads):
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def train_dag(d: Dataset, hp: Hyperparams, fourier, threads: int = 1) -> DagModel:
    """One node per unordered class pair, each trained on the mapped rows of its two classes."""
    if len(d.classes) < 2:
        raise ValueError("need at least two classes")
    t0 = time.perf_counter()
    Z = _map_points(fourier, d.X)
    pairs = list(combinations(d.classes, 2))

    def fit(pair):
        i, j = pair
        return train_binary(Z[d.y == i], Z[d.y == j], hp)

    nodes = dict(zip(pairs, _run(fit, pairs, threads)))
    return DagModel(tuple(d.classes), nodes, fourier, hp, time.perf_counter() - t0)


def update_dag(m: DagModel, batch: Dataset, policy: str | None = None, threads: int = 1) -> DagModel:
    """Route each point to every node whose pair contains its label and update those nodes."""
    if len(batch) == 0:
        return m
    unknown = set(batch.classes) - set(m.classes)
    if unknown:
        raise UnknownClassError(f"labels {sorted(unknown)} not in model classes {list(m.classes)}")
    t0 = time.perf_counter()
    Z = _map_points(m.fourier, batch.X)
    present = set(batch.classes)
    touched = [p for p in m.nodes if p[0] in present or p[1] in present]

    def step(pair):
        i, j = pair
        rows = (batch.y == i) | (batch.y == j)
        node = m.nodes[pair]
        try:
            return update(node, Z[rows], batch.y[rows] == i, m.hp, policy)
        except ClassCollapseError:
            log.warning("node %s: forgetting would empty a class; skipping decrement", pair)
            return increment(node, Z[rows], batch.y[rows] == i, m.hp, policy)

    nodes = dict(m.nodes)
    nodes.update(zip(touched, _run(step, touched, threads)))
    return replace(m, nodes=nodes, train_seconds=m.train_seconds + time.perf_counter() - t0)


def predict(m: DagModel, X, return_evaluations: bool = False):
    """Walk the DAG: test (first, last) remaining candidates and drop the loser, u-1 times."""
    Z = _map_points(m.fourier, X)
    classes = np.asarray(m.classes)
    lo = np.zeros(len(Z), dtype=np.int64)
    hi = np.full(len(Z), len(classes) - 1, dtype=np.int64)
    evaluations = np.zeros(len(Z), dtype=np.int64)
    for _ in range(len(classes) - 1):
        keys = lo * len(classes) + hi
        for key in np.unique(keys):
            rows = np.flatnonzero(keys == key)
            a, b = divmod(int(key), len(classes))
            first_wins = decision(m.nodes[(m.classes[a], m.classes[b])], Z[rows])
            hi[rows[first_wins]] -= 1
            lo[rows[~first_wins]] += 1
            evaluations[rows] += 1
    labels = classes[lo]
    return (labels, evaluations) if return_evaluations else labels


def evaluate(m: DagModel, test: Dataset) -> MetricsReport:
    if test.n != m.n:
        raise ValueError(f"test data has {test.n} features, model expects {m.n}")
    t0 = time.perf_counter()
    pred = predict(m, test.X)
    elapsed = time.perf_counter() - t0
    correct = pred == test.y
    per_class = {int(c): float(correct[test.y == c].mean()) for c in test.classes}
    return MetricsReport(
        accuracy=float(correct.mean()) if len(test) else 0.0,
        per_class=per_class,
        n_sv=m.n_sv,
        train_seconds=m.train_seconds,
        predict_seconds=elapsed,
        converged=m.converged,
    )

"""Shared streaming loop for the experiment scripts."""
import time

import numpy as np

from fbtsvm.dag import evaluate, train_dag, update_dag
from fbtsvm.data import BatchPlan, Dataset, batches


def replay(train: Dataset, test: Dataset, hp, fourier, initial: int, batch_size: int,
           seed: int = 0, policy=None, log=print):
    """Train on a class-covering first batch, then stream the rest; returns the final model."""
    parts = batches(train, BatchPlan(initial, seed))
    rest = Dataset(np.concatenate([p.X for p in parts[1:]]), np.concatenate([p.y for p in parts[1:]]))
    t0 = time.perf_counter()
    m = train_dag(parts[0], hp, fourier)
    for k, i in enumerate(range(0, len(rest), batch_size)):
        m = update_dag(m, rest.subset(np.arange(i, min(i + batch_size, len(rest)))), policy=policy)
        if log:
            log(f"batch {k:3d}  nSV {m.n_sv:5d}  test acc {evaluate(m, test).accuracy:.4f}")
    return m, time.perf_counter() - t0

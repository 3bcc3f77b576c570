"""Rebuild a Statlog-style DNA dataset from the UCI splice-junction sequences.

Each of the 60 nucleotides becomes three binary indicators (A=100, C=010,
G=001, T=000), giving 180 features; sequences with ambiguity codes are
dropped. Classes: 1=EI, 2=IE, 3=N. A stratified split yields 1186 test rows
and 1400 training rows (the remaining 600 are written as a validation file).

The raw sequences come from the ``keel-ds`` wheel (``splice.dat``):

    pip download keel-ds --no-deps -d /tmp/keel
    python scripts/make_dna.py /tmp/keel/keel_ds-*.whl data/
"""
import argparse
import sys
import zipfile
from pathlib import Path

import numpy as np

from fbtsvm.data import Dataset, write_libsvm

CODE = {"A": (1, 0, 0), "C": (0, 1, 0), "G": (0, 0, 1), "T": (0, 0, 0)}
LABEL = {"EI": 1, "IE": 2, "N": 3}


def read_splice(source: Path) -> str:
    if source.suffix == ".whl":
        with zipfile.ZipFile(source) as z:
            return z.read("keel_ds/data/balanced/raw/splice.dat").decode()
    return source.read_text()


def encode(text: str) -> Dataset:
    rows, labels = [], []
    for line in text.splitlines():
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 61 or any(c not in CODE for c in cells[:60]):
            continue
        rows.append([b for c in cells[:60] for b in CODE[c]])
        labels.append(LABEL[cells[60]])
    return Dataset(np.array(rows, dtype=np.float64), np.array(labels))


def split(d: Dataset, n_test=1186, n_train=1400, seed=0):
    rng = np.random.default_rng(seed)
    sizes = np.array([np.count_nonzero(d.y == c) for c in d.classes])
    k_tests = np.round(n_test * sizes / len(d)).astype(int)
    k_trains = np.round(n_train * sizes / len(d)).astype(int)
    # absorb rounding in the largest class so totals are exact
    k_tests[sizes.argmax()] += n_test - k_tests.sum()
    k_trains[sizes.argmax()] += n_train - k_trains.sum()
    test, train, val = [], [], []
    for c, k_test, k_train in zip(d.classes, k_tests, k_trains):
        idx = rng.permutation(np.flatnonzero(d.y == c))
        test.append(idx[:k_test])
        train.append(idx[k_test:k_test + k_train])
        val.append(idx[k_test + k_train:])
    parts = [rng.permutation(np.concatenate(p)) for p in (train, val, test)]
    return [d.subset(p) for p in parts]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("source", type=Path, help="keel-ds wheel or a splice.dat file")
    ap.add_argument("outdir", type=Path)
    args = ap.parse_args(argv)
    d = encode(read_splice(args.source))
    train, val, test = split(d)
    args.outdir.mkdir(parents=True, exist_ok=True)
    for name, part in (("dna.tr", train), ("dna.val", val), ("dna.t", test)):
        write_libsvm(part, args.outdir / f"{name}.libsvm")
        print(f"{name}: {len(part)} rows, classes {np.bincount(part.y)[1:].tolist()}", file=sys.stderr)


if __name__ == "__main__":
    main()

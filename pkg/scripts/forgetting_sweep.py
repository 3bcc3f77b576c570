"""Support-vector count and accuracy against the forgetting score d."""
import argparse
import math

from _stream import replay
from fbtsvm.binary import Hyperparams
from fbtsvm.dag import evaluate
from fbtsvm.data import gen_blobs
from fbtsvm.rff import sample_map

CENTERS = [[0, 0], [3, 0], [1.5, 2.5]]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ds", default="1,2,5,10,inf", help="comma-separated d values")
    ap.add_argument("--per-class", type=int, default=500)
    ap.add_argument("--seed", type=int, default=21)
    args = ap.parse_args(argv)

    tr = gen_blobs(args.per_class, CENTERS, seed=args.seed)
    te = gen_blobs(300, CENTERS, seed=args.seed + 1)
    fmap = sample_map(2, 50, 0.5, seed=3)
    print(f"{'d':>5} {'nSV':>6} {'acc':>7} {'secs':>6}")
    for tok in args.ds.split(","):
        d = math.inf if tok.strip() == "inf" else int(tok)
        m, secs = replay(tr, te, Hyperparams(d=d), fmap, 150, 75, log=None)
        print(f"{tok:>5} {m.n_sv:6d} {evaluate(m, te).accuracy:7.4f} {secs:6.2f}")


if __name__ == "__main__":
    main()

"""Linear model on a noisy static HYPER stream (10k train / 3k test)."""
import argparse

import numpy as np

from _stream import replay
from fbtsvm.binary import Hyperparams
from fbtsvm.dag import evaluate
from fbtsvm.data import gen_hyper
from fbtsvm.rff import IdentityMap


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=10)
    ap.add_argument("--noise", type=float, default=0.1)
    ap.add_argument("--initial", type=int, default=5000)
    ap.add_argument("--batch-size", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    d = gen_hyper(13_000, args.dim, args.noise, seed=args.seed)
    tr, te = d.subset(np.arange(10_000)), d.subset(np.arange(10_000, 13_000))
    m, secs = replay(tr, te, Hyperparams(c1=5.0, c2=4.0), IdentityMap(args.dim),
                     args.initial, args.batch_size, seed=args.seed)
    print(evaluate(m, te).to_json())
    print(f"wall {secs:.2f}s")


if __name__ == "__main__":
    main()

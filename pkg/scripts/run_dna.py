"""Stream the DNA splice data through an RFF model and report test accuracy.

    python scripts/run_dna.py --kernel-size 500 --gamma 0.003
"""
import argparse
from pathlib import Path

from _stream import replay
from fbtsvm.binary import Hyperparams
from fbtsvm.dag import evaluate
from fbtsvm.data import load_libsvm
from fbtsvm.rff import sample_map

DATA = Path(__file__).resolve().parents[1] / "data"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c", type=float, default=4.0)
    ap.add_argument("--kernel-size", type=int, default=500)
    ap.add_argument("--gamma", type=float, default=0.003)
    ap.add_argument("--initial", type=int, default=50)
    ap.add_argument("--batch-size", type=int, default=70)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-q", "--quiet", action="store_true")
    args = ap.parse_args(argv)

    tr, te = load_libsvm(DATA / "dna.tr.libsvm"), load_libsvm(DATA / "dna.t.libsvm")
    fmap = sample_map(tr.n, args.kernel_size, args.gamma, seed=args.seed)
    m, secs = replay(tr, te, Hyperparams(c1=args.c, c2=args.c), fmap, args.initial,
                     args.batch_size, seed=args.seed, log=None if args.quiet else print)
    print(evaluate(m, te).to_json())
    print(f"wall {secs:.2f}s")


if __name__ == "__main__":
    main()

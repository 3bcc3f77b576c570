"""Command-line front end: train, update, predict, evaluate, generate.

stdout carries JSON only (one object, or one line per batch for ``update``);
diagnostics go to stderr. Exit codes: 0 ok, 1 runtime failure, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import persistence
from .binary import POLICIES, DegeneratePlaneError, Hyperparams
from .dag import default_threads, evaluate, predict, train_dag, update_dag
from .data import Dataset, gen_hyper, gen_sea, iter_batches, load, write_libsvm
from .fuzzy import FuzzyParams
from .rff import feature_map
from .solver import SolverConfig

log = logging.getLogger("fbtsvm")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    data: str | None = None
    model: str | None = None
    test: str | None = None
    c1: float = 1.0
    c2: float = 1.0
    c3: float | None = None
    c4: float | None = None
    mu: float = 0.1
    delta: float = 1e-4
    gamma: float = 0.1
    kernel_size: int | str = "linear"
    batch_size: int = 100
    initial_points: int | None = None
    d: float = math.inf
    phi: float = 1e-3
    epsilon: float = 1e-3
    policy: str = "extrema"
    seed: int = 0
    threads: int | None = None
    label_column: int = -1

    def hyperparams(self) -> Hyperparams:
        try:
            return Hyperparams(
                c1=self.c1, c2=self.c2, c3=self.c3, c4=self.c4,
                fuzzy=FuzzyParams(self.mu, self.delta),
                solver=SolverConfig(epsilon=self.epsilon, seed=self.seed),
                d=self.d, phi=self.phi, policy=self.policy,
            )
        except ValueError as e:
            raise UsageError(str(e)) from e


def _kernel_size(s: str):
    if s == "linear":
        return s
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"kernel size must be a positive integer or 'linear', got {s!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("kernel size must be >= 1")
    return n


def _forget(s: str) -> float:
    return math.inf if s.lower() in ("inf", "infinity") else float(s)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")
    sys.stdout.flush()


def _load_data(path, label_column) -> Dataset:
    if path is None:
        raise UsageError("--data is required")
    return load(path, label_column)


def _is_blank(path) -> bool:
    with open(path) as fh:
        return not any(line.strip() and not line.lstrip().startswith("#") for line in fh)


def _threads(cfg) -> int:
    return cfg.threads if cfg.threads else default_threads()


def _require(cfg, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _check_counts(cfg):
    if cfg.batch_size < 1:
        raise UsageError("--batch-size must be >= 1")
    if cfg.initial_points is not None and cfg.initial_points < 2:
        raise UsageError("--initial-points must be >= 2")
    if cfg.kernel_size != "linear" and not cfg.gamma > 0:
        raise UsageError("--gamma must be > 0")
    if cfg.threads is not None and cfg.threads < 1:
        raise UsageError("--threads must be >= 1")


# ---------------------------------------------------------------- commands

def cmd_train(cfg: RunConfig) -> int:
    _require(cfg, "data", "model")
    hp = cfg.hyperparams()
    _check_counts(cfg)
    d = _load_data(cfg.data, cfg.label_column)
    if cfg.initial_points is not None:
        d = d.subset(np.arange(min(cfg.initial_points, len(d))))
    if len(d.classes) < 2:
        raise UsageError("training rows contain fewer than two classes; raise --initial-points")
    fmap = feature_map(cfg.kernel_size, d.n, cfg.gamma, cfg.seed)
    m = train_dag(d, hp, fmap, threads=_threads(cfg))
    persistence.save(m, cfg.model)
    report = evaluate(m, _load_data(cfg.test, cfg.label_column) if cfg.test else d)
    report.extra.update(model=cfg.model, trained_points=len(d), evaluated_on="test" if cfg.test else "train")
    _emit(report.to_dict())
    return EXIT_OK


def _override(hp: Hyperparams, cfg: RunConfig, explicit: set) -> Hyperparams:
    changes = {k: getattr(cfg, k) for k in ("d", "phi", "policy") if k in explicit}
    try:
        return replace(hp, **changes) if changes else hp
    except ValueError as e:
        raise UsageError(str(e)) from e


def cmd_update(cfg: RunConfig, explicit: set = frozenset()) -> int:
    _require(cfg, "data", "model")
    _check_counts(cfg)
    m = persistence.load(cfg.model)
    m = replace(m, hp=_override(m.hp, cfg, explicit))
    if _is_blank(cfg.data):
        log.info("empty update file; model unchanged")
        return EXIT_OK
    stream = _load_data(cfg.data, cfg.label_column)
    if stream.n != m.n:
        raise UsageError(f"data has {stream.n} features, model expects {m.n}")
    test = _load_data(cfg.test, cfg.label_column) if cfg.test else None
    threads = _threads(cfg)
    for k, batch in enumerate(iter_batches(stream, cfg.batch_size)):
        # prequential accuracy: score the batch before learning from it
        seen = set(m.classes)
        known = np.isin(batch.y, list(seen))
        pre = float(np.mean(predict(m, batch.X[known]) == batch.y[known])) if known.any() else None
        m = update_dag(m, batch, threads=threads)
        line = {"batch": k, "points": len(batch), "prequential_accuracy": pre,
                "n_sv": m.n_sv, "train_seconds": m.train_seconds, "converged": m.converged}
        if test is not None:
            line["test_accuracy"] = evaluate(m, test).accuracy
        _emit(line)
    persistence.save(m, cfg.model)
    return EXIT_OK


def cmd_predict(cfg: RunConfig) -> int:
    _require(cfg, "data", "model")
    m = persistence.load(cfg.model)
    d = _load_data(cfg.data, cfg.label_column)
    if d.n != m.n:
        raise UsageError(f"data has {d.n} features, model expects {m.n}")
    _emit({"predictions": [int(v) for v in predict(m, d.X)]})
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig) -> int:
    _require(cfg, "model")
    path = cfg.test or cfg.data
    if path is None:
        raise UsageError("--test (or --data) is required")
    m = persistence.load(cfg.model)
    d = _load_data(path, cfg.label_column)
    if d.n != m.n:
        raise UsageError(f"data has {d.n} features, model expects {m.n}")
    _emit(evaluate(m, d).to_dict())
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.train < 1 or args.test < 1:
        raise UsageError("--train and --test must be >= 1")
    if not 0.0 <= args.noise < 1.0:
        raise UsageError("--noise must lie in [0, 1)")
    total = args.train + args.test
    if args.generator == "hyper":
        d = gen_hyper(total, args.dim, args.noise, seed=args.seed)
    else:
        d = gen_sea(total, args.noise, seed=args.seed)
    train_out = args.train_out or f"{args.generator}.tr.libsvm"
    test_out = args.test_out or f"{args.generator}.t.libsvm"
    write_libsvm(d.subset(np.arange(args.train)), train_out)
    write_libsvm(d.subset(np.arange(args.train, total)), test_out)
    _emit({"generator": args.generator, "train": train_out, "test": test_out,
           "train_rows": args.train, "test_rows": args.test})
    return EXIT_OK


# ---------------------------------------------------------------- parsing

def _model_flags(p):
    p.add_argument("--data")
    p.add_argument("--model")
    p.add_argument("--test")
    p.add_argument("--label-column", type=int, default=-1)
    p.add_argument("--threads", type=int, default=None, help="default: $FBTSVM_THREADS or all cores")


def _hyper_flags(p):
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--c3", type=float, default=None, help="default: --c1")
    p.add_argument("--c4", type=float, default=None, help="default: --c2")
    p.add_argument("--mu", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=1e-4)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--kernel-size", type=_kernel_size, default="linear")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--initial-points", type=int, default=None)


def _stream_flags(p):
    p.add_argument("--batch-size", type=int, default=100)
    p.add_argument("--d", type=_forget, default=math.inf, help="forgetting score; 'inf' disables")
    p.add_argument("--phi", type=float, default=1e-3)
    p.add_argument("--policy", choices=POLICIES, default="extrema")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fbtsvm", description="Incremental fuzzy bounded twin SVM.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("train", "update", "predict", "evaluate"):
        p = sub.add_parser(name)
        _model_flags(p)
        _hyper_flags(p)
        _stream_flags(p)
    g = sub.add_parser("generate")
    g.add_argument("generator", help="hyper or sea")
    g.add_argument("--train", type=int, required=True)
    g.add_argument("--test", type=int, required=True)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--dim", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--train-out")
    g.add_argument("--test-out")
    return ap


def _explicit(argv) -> set:
    """Names of stream flags the user passed, so update only overrides those."""
    flags = {"--d": "d", "--phi": "phi", "--policy": "policy"}
    return {flags[a.split("=")[0]] for a in argv if a.split("=")[0] in flags}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "generate":
            if args.generator not in ("hyper", "sea"):
                raise UsageError(f"unknown generator {args.generator!r}; choose hyper or sea")
            return cmd_generate(args)
        fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
        cfg = RunConfig(**fields)
        if args.command == "update":
            return cmd_update(cfg, _explicit(argv))
        return {"train": cmd_train, "predict": cmd_predict, "evaluate": cmd_evaluate}[args.command](cfg)
    except DegeneratePlaneError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except (UsageError, ValueError, OSError, persistence.ModelFileError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # noqa: BLE001 - any other failure is a runtime error
        log.debug("traceback", exc_info=True)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

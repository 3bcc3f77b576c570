"""Single-file binary container for trained DAG models.

Layout (all integers and reals little-endian)::

    b"FBTW"  uint32 format_version
    record*  where record = uint16 name_len, name (utf-8), uint8 kind,
                            uint64 payload_len, payload
    END record (kind 0, empty payload)

Kinds: 1 float64 array, 2 int64 array, 3 utf-8 string. Array payloads are
``uint8 ndim, uint64 shape[ndim]`` then the raw elements in C order.
See docs/model_format.md for an annotated dump.
"""
from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .binary import BinaryModel, Hyperparams
from .dag import DagModel
from .fuzzy import ClassGeometry, FuzzyParams
from .rff import FourierMap, IdentityMap
from .solver import SolverConfig

MAGIC = b"FBTW"
FORMAT_VERSION = 1

END, F64, I64, STR = 0, 1, 2, 3

NODE_ARRAYS = ("u_plus", "u_minus", "alpha", "nu", "retained_pos", "retained_neg",
               "s_pos", "s_neg", "pg1", "pg2")


class ModelFileError(Exception):
    def __init__(self, path, msg):
        super().__init__(f"{path}: {msg}")
        self.path = str(path)


class NotAModelError(ModelFileError):
    pass


class CorruptModelError(ModelFileError):
    pass


class VersionError(ModelFileError):
    pass


# ---------------------------------------------------------------- encoding

def _record(name: str, kind: int, payload: bytes) -> bytes:
    key = name.encode()
    return struct.pack("<H", len(key)) + key + struct.pack("<BQ", kind, len(payload)) + payload


def _array(name, a, kind=F64) -> bytes:
    dtype = "<f8" if kind == F64 else "<i8"
    a = np.ascontiguousarray(np.asarray(a), dtype=dtype)
    head = struct.pack("<B", a.ndim) + struct.pack(f"<{a.ndim}Q", *a.shape)
    return _record(name, kind, head + a.tobytes())


def _string(name, s: str) -> bytes:
    return _record(name, STR, s.encode())


def _hp_records(hp: Hyperparams):
    yield _array("hp.c", [hp.c1, hp.c2, hp.c3, hp.c4])
    yield _array("hp.fuzzy", [hp.fuzzy.mu, hp.fuzzy.delta])
    yield _array("hp.d_phi", [hp.d, hp.phi])
    yield _string("hp.policy", hp.policy)
    s = hp.solver
    yield _array("hp.solver.real", [s.epsilon, s.shrink_rate])
    yield _array("hp.solver.int", [s.max_sweeps, s.seed], I64)


def _fourier_records(f):
    if isinstance(f, IdentityMap):
        yield _string("fourier.kind", "linear")
        yield _array("fourier.n", [f.n], I64)
    else:
        yield _string("fourier.kind", "rff")
        yield _array("fourier.tau", f.tau)
        yield _array("fourier.offsets", f.offsets)
        yield _array("fourier.gamma", [f.gamma])
        yield _array("fourier.seed", [f.seed], I64)


def _node_records(k: int, pair, node: BinaryModel):
    p = f"node.{k}."
    yield _array(p + "pair", pair, I64)
    for name in NODE_ARRAYS:
        yield _array(p + name, getattr(node, name))
    yield _array(p + "center_pos", node.geom_pos.center)
    yield _array(p + "center_neg", node.geom_neg.center)
    yield _array(p + "radii", [node.geom_pos.radius, node.geom_neg.radius])
    yield _array(p + "bounds", [*node.bounds1, *node.bounds2])
    yield _array(p + "counts_pos", node.counts_pos, I64)
    yield _array(p + "counts_neg", node.counts_neg, I64)
    yield _array(p + "flags", [node.converged, node.stale, node.trainings], I64)


def dumps(m: DagModel) -> bytes:
    parts = [MAGIC, struct.pack("<I", FORMAT_VERSION)]
    parts += _fourier_records(m.fourier)
    parts += _hp_records(m.hp)
    parts.append(_array("classes", m.classes, I64))
    parts.append(_array("train_seconds", [m.train_seconds]))
    parts.append(_array("n_nodes", [len(m.nodes)], I64))
    for k, (pair, node) in enumerate(m.nodes.items()):
        parts += _node_records(k, pair, node)
    parts.append(_record("END", END, b""))
    return b"".join(parts)


def save(m: DagModel, path) -> None:
    """Write ``m`` to ``path``; the model must not be updated concurrently."""
    path = Path(path)
    try:
        path.write_bytes(dumps(m))
    except OSError as e:
        raise OSError(f"{path}: cannot write model ({e.strerror or e})") from e


# ---------------------------------------------------------------- decoding

class _Reader:
    def __init__(self, buf: bytes, path):
        self.buf, self.pos, self.path = buf, 0, path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise CorruptModelError(self.path, f"truncated at byte {len(self.buf)} (needed {n} more at {self.pos})")
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def _decode_payload(kind, payload, name, path):
    if kind == STR:
        return payload.decode()
    if kind not in (F64, I64):
        raise CorruptModelError(path, f"record {name!r} has unknown kind {kind}")
    r = _Reader(payload, path)
    (ndim,) = r.unpack("<B")
    shape = r.unpack(f"<{ndim}Q")
    dtype = np.dtype("<f8" if kind == F64 else "<i8")
    count = math.prod(shape)
    data = r.take(count * dtype.itemsize)
    if r.pos != len(payload):
        raise CorruptModelError(path, f"record {name!r} has trailing bytes")
    return np.frombuffer(data, dtype=dtype).reshape(shape).astype(dtype.newbyteorder("="))


def _records(buf: bytes, path) -> dict:
    if len(buf) == 0:
        raise CorruptModelError(path, "empty file")
    if len(buf) < 4 or buf[:4] != MAGIC:
        raise NotAModelError(path, "missing FBTW magic; not a model file")
    r = _Reader(buf, path)
    r.take(4)
    (version,) = r.unpack("<I")
    if version != FORMAT_VERSION:
        raise VersionError(path, f"unsupported format_version {version} (this build reads {FORMAT_VERSION})")
    out = {}
    while True:
        (klen,) = r.unpack("<H")
        try:
            name = r.take(klen).decode()
        except UnicodeDecodeError as e:
            raise CorruptModelError(path, "record name is not utf-8") from e
        kind, plen = r.unpack("<BQ")
        payload = r.take(plen)
        if kind == END:
            break
        try:
            out[name] = _decode_payload(kind, payload, name, path)
        except (UnicodeDecodeError, ValueError) as e:
            raise CorruptModelError(path, f"record {name!r} unreadable: {e}") from e
    if r.pos != len(buf):
        raise CorruptModelError(path, "trailing bytes after END record")
    return out


def _build(rec: dict, path) -> DagModel:
    def get(name):
        try:
            return rec[name]
        except KeyError:
            raise CorruptModelError(path, f"missing record {name!r}") from None

    if get("fourier.kind") == "linear":
        fourier = IdentityMap(int(get("fourier.n")[0]))
    else:
        fourier = FourierMap(get("fourier.tau"), get("fourier.offsets"),
                             float(get("fourier.gamma")[0]), int(get("fourier.seed")[0]))
    c1, c2, c3, c4 = map(float, get("hp.c"))
    mu, delta = map(float, get("hp.fuzzy"))
    d, phi = map(float, get("hp.d_phi"))
    eps, shrink = map(float, get("hp.solver.real"))
    sweeps, seed = map(int, get("hp.solver.int"))
    hp = Hyperparams(c1, c2, c3, c4, FuzzyParams(mu, delta),
                     SolverConfig(epsilon=eps, max_sweeps=sweeps, shrink_rate=shrink, seed=seed),
                     d=d, phi=phi, policy=get("hp.policy"))
    nodes = {}
    for k in range(int(get("n_nodes")[0])):
        p = f"node.{k}."
        i, j = map(int, get(p + "pair"))
        rp, rn = get(p + "radii")
        b = get(p + "bounds")
        converged, stale, trainings = map(int, get(p + "flags"))
        nodes[(i, j)] = BinaryModel(
            **{name: get(p + name) for name in NODE_ARRAYS},
            geom_pos=ClassGeometry(get(p + "center_pos"), float(rp)),
            geom_neg=ClassGeometry(get(p + "center_neg"), float(rn)),
            bounds1=(float(b[0]), float(b[1])), bounds2=(float(b[2]), float(b[3])),
            counts_pos=get(p + "counts_pos"), counts_neg=get(p + "counts_neg"),
            converged=bool(converged), stale=bool(stale), trainings=trainings,
        )
    classes = tuple(int(c) for c in get("classes"))
    return DagModel(classes, nodes, fourier, hp, float(get("train_seconds")[0]))


def loads(buf: bytes, path="<bytes>") -> DagModel:
    return _build(_records(buf, path), path)


def load(path) -> DagModel:
    path = Path(path)
    try:
        buf = path.read_bytes()
    except OSError as e:
        raise OSError(f"{path}: cannot read model ({e.strerror or e})") from e
    return loads(buf, path)

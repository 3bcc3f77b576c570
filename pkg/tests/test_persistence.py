import math
import struct
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbtsvm import persistence
from fbtsvm.binary import Hyperparams
from fbtsvm.dag import predict, train_dag, update_dag
from fbtsvm.data import Dataset, gen_blobs
from fbtsvm.persistence import CorruptModelError, NotAModelError, VersionError, dumps, load, loads, save
from fbtsvm.rff import IdentityMap, sample_map
from fbtsvm.solver import SolverConfig

CENTERS = [[0, 0, 0], [4, 0, 0], [0, 4, 0]]


def model(fourier=None, d=math.inf, seed=0):
    data = gen_blobs(30, CENTERS, std=1.0, seed=seed)
    hp = Hyperparams(c1=2.0, c2=0.5, c4=3.0, d=d, phi=1e-2, policy="median",
                     solver=SolverConfig(epsilon=1e-4, seed=3))
    return train_dag(data, hp, fourier or sample_map(3, 40, 0.3, seed=seed))


def assert_models_equal(a, b):
    assert a.classes == b.classes and a.hp == b.hp
    assert a.train_seconds == b.train_seconds
    assert type(a.fourier) is type(b.fourier)
    if hasattr(a.fourier, "tau"):
        assert a.fourier.tau.tobytes() == b.fourier.tau.tobytes()
        assert a.fourier.offsets.tobytes() == b.fourier.offsets.tobytes()
        assert (a.fourier.gamma, a.fourier.seed) == (b.fourier.gamma, b.fourier.seed)
    assert a.nodes.keys() == b.nodes.keys()
    for k in a.nodes:
        x, y = a.nodes[k], b.nodes[k]
        for f in x.__dataclass_fields__:
            u, v = getattr(x, f), getattr(y, f)
            if isinstance(u, np.ndarray):
                assert u.dtype == v.dtype and u.shape == v.shape and u.tobytes() == v.tobytes(), f
            elif hasattr(u, "center"):
                assert u.center.tobytes() == v.center.tobytes() and u.radius == v.radius
            else:
                assert u == v, f


def test_round_trip_fields_and_predictions(tmp_path):
    m = model()
    save(m, tmp_path / "m.fbtw")
    back = load(tmp_path / "m.fbtw")
    assert_models_equal(m, back)
    probes = np.random.default_rng(0).normal(size=(1000, 3)) * 4
    np.testing.assert_array_equal(predict(m, probes), predict(back, probes))


def test_linear_round_trip():
    m = model(IdentityMap(3), d=2)
    assert_models_equal(m, loads(dumps(m)))


def test_header_layout():
    buf = dumps(model())
    assert buf[:4] == b"FBTW"
    assert struct.unpack("<I", buf[4:8])[0] == persistence.FORMAT_VERSION


def test_truncation_is_detected():
    buf = dumps(model())
    for cut in (5, 8, 20, len(buf) // 2, len(buf) - 1):
        with pytest.raises(CorruptModelError):
            loads(buf[:cut])


def test_bad_magic_version_and_empty(tmp_path):
    buf = dumps(model())
    with pytest.raises(NotAModelError):
        loads(b"NOPE" + buf[4:])
    with pytest.raises(VersionError):
        loads(buf[:4] + struct.pack("<I", 99) + buf[8:])
    (tmp_path / "empty").write_bytes(b"")
    with pytest.raises(CorruptModelError, match="empty"):
        load(tmp_path / "empty")


def test_io_errors_carry_path(tmp_path):
    with pytest.raises(OSError, match="missing.fbtw"):
        load(tmp_path / "missing.fbtw")
    with pytest.raises(OSError, match="nodir"):
        save(model(), tmp_path / "nodir" / "m.fbtw")


def test_two_class_model_evaluates_one_node():
    data = gen_blobs(20, [[0, 0], [3, 3]], seed=1)
    m = loads(dumps(train_dag(data, Hyperparams(), IdentityMap(2))))
    _, ev = predict(m, data.X, return_evaluations=True)
    assert np.all(ev == 1)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1, 3, math.inf]), st.integers(1, 4))
def test_resume_equals_unbroken_session(seed, d, n_batches):
    m = model(d=d, seed=seed % 7)
    rng = np.random.default_rng(seed)
    stream = gen_blobs(15 * n_batches, CENTERS, std=1.3, seed=seed)
    live = resumed = m
    for k in range(n_batches):
        idx = rng.permutation(len(stream))[:15]
        batch = Dataset(stream.X[idx], stream.y[idx])
        live = update_dag(live, batch)
        resumed = update_dag(loads(dumps(resumed)), batch)
        for key in live.nodes:
            a, b = live.nodes[key], resumed.nodes[key]
            assert a.u_plus.tobytes() == b.u_plus.tobytes()
            assert a.u_minus.tobytes() == b.u_minus.tobytes()
    # train_seconds differs between the sessions; everything else matches
    assert_models_equal(replace(live, train_seconds=0.0), replace(resumed, train_seconds=0.0))

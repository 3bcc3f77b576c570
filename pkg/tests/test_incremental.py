import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbtsvm.binary import Hyperparams, decision, u_residuals, train_binary
from fbtsvm.incremental import (
    ClassCollapseError, _policy_band, decrement, increment, new_point_gradients, screen, update,
)
from fbtsvm.solver import SolverConfig

HP = Hyperparams(solver=SolverConfig(epsilon=1e-6))


def stream(seed, n):
    rng = np.random.default_rng(seed)
    y = rng.random(n) < 0.5
    X = rng.normal(size=(n, 2)) + np.where(y[:, None], [1.5, 0.0], [-1.5, 0.0])
    return X, y


def base(seed=0, n=60, hp=HP):
    X, y = stream(seed, n)
    return train_binary(X[y], X[~y], hp)


def test_band_admission_rule():
    # extrema policy uses the stored band verbatim
    m = base()
    m = replace(m, bounds1=(-0.5, 0.5), bounds2=(-0.5, 0.5))
    for g, expect in ((0.8, True), (0.0, False), (-0.9, True)):
        # choose a point whose problem-1 gradient equals g: -H u_plus - 1 = g
        u = np.zeros_like(m.u_plus)
        u[-1] = -(g + 1.0)
        mm = replace(m, u_plus=u)
        assert screen(mm, np.zeros((1, 2)), np.array([False]), "extrema")[0] == expect
        assert np.isclose(new_point_gradients(mm, np.zeros((1, 2)), np.array([False]))[0], g)


def test_policy_bands_nest_inside_extrema():
    pg = np.array([-3.0, -1.0, -0.2, 0.0, 0.4, 2.0])
    ext = (-3.0, 2.0)
    for policy in ("mean", "median", "quartiles"):
        lo, hi = _policy_band(pg, ext, policy)
        assert ext[0] <= lo <= hi <= ext[1]
    assert _policy_band(pg, ext, "all") == (math.inf, -math.inf)


def test_nothing_admitted_leaves_model_bitwise_equal():
    m = base()
    m = replace(m, bounds1=(-1e9, 1e9), bounds2=(-1e9, 1e9))
    X, y = stream(1, 30)
    out = increment(m, X, y, HP)
    assert out is m
    assert out.u_plus.tobytes() == m.u_plus.tobytes()


def test_far_outlier_moves_a_plane():
    m = base()
    # a positive point deep on the negative side violates problem 2's margin badly
    out = increment(m, np.array([[-15.0, 0.0]]), np.array([True]), HP)
    assert out.n_sv == m.n_sv + 1
    assert np.linalg.norm(out.u_minus - m.u_minus) > 0


def test_increment_never_shrinks_and_keeps_invariants():
    m = base()
    for k in range(5):
        X, y = stream(10 + k, 40)
        out = increment(m, X, y, HP, policy="all")
        assert out.n_sv == m.n_sv + 40
        assert np.all(out.alpha <= HP.c3 * out.s_neg + 1e-12)
        assert np.all(out.nu <= HP.c4 * out.s_pos + 1e-12)
        assert max(u_residuals(out, HP)) <= 1e-8
        m = out


def test_screened_out_points_lie_inside_band():
    m = base()
    X, y = stream(7, 200)
    keep = screen(m, X, y, "extrema")
    g = new_point_gradients(m, X, y)
    lo = np.where(y, m.bounds2[0], m.bounds1[0])
    hi = np.where(y, m.bounds2[1], m.bounds1[1])
    assert np.all((g[~keep] >= lo[~keep]) & (g[~keep] <= hi[~keep]))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        increment(base(), np.zeros((2, 3)), np.array([True, False]), HP)


def test_decrement_disabled_is_identity():
    m = base()
    assert decrement(m, HP) is m


def test_decrement_counter_semantics():
    hp = replace(HP, d=3, phi=1e-3)
    m = base(hp=hp)
    k_pos, k_neg = len(m.nu), len(m.alpha)
    nu = np.full(k_pos, 2e-3)
    nu[0] = 5e-4           # below phi: removed on pass 3
    alpha = np.full(k_neg, 2e-3)
    m = replace(m, nu=nu, alpha=alpha)
    for p in (1, 2):
        m = decrement(m, hp)
        assert m.n_sv == k_pos + k_neg
        assert m.counts_pos[0] == p and np.all(m.counts_pos[1:] == 0)
    m = decrement(m, hp)
    assert len(m.nu) == k_pos - 1 and len(m.alpha) == k_neg
    assert m.stale
    assert np.all(m.nu >= hp.phi)
    # u recomputed from the survivors
    assert max(u_residuals(m, hp)) <= 1e-8


def test_decrement_class_collapse():
    hp = replace(HP, d=1)
    m = base(hp=hp)
    m = replace(m, nu=np.zeros_like(m.nu))
    with pytest.raises(ClassCollapseError):
        decrement(m, hp)


def test_update_is_decrement_then_increment():
    hp = replace(HP, d=2)
    m = base(hp=hp)
    X, y = stream(3, 40)
    a = update(m, X, y, hp)
    b = increment(decrement(m, hp), X, y, hp)
    assert a.u_plus.tobytes() == b.u_plus.tobytes()
    assert a.u_minus.tobytes() == b.u_minus.tobytes()


def test_stale_model_resolves_even_without_admissions():
    hp = replace(HP, d=1)
    m = base(hp=hp)
    m = decrement(m, hp)
    if not m.stale:
        pytest.skip("no point fell below phi")
    out = increment(m, np.zeros((0, 2)), np.zeros(0, dtype=bool), hp)
    assert not out.stale and out.trainings == m.trainings + 1


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 1000))
def test_smaller_d_never_retains_more(seed):
    sizes = []
    for d in (1, 2, 4, math.inf):
        hp = replace(HP, d=d)
        X, y = stream(seed, 40)
        m = train_binary(X[y], X[~y], hp)
        for k in range(6):
            Xb, yb = stream(seed * 10 + k + 1, 30)
            try:
                m = update(m, Xb, yb, hp)
            except ClassCollapseError:
                m = increment(m, Xb, yb, hp)
        sizes.append(m.n_sv)
    assert sizes == sorted(sizes)


def test_decisions_after_updates_stay_accurate():
    m = base(n=40)
    for k in range(5):
        X, y = stream(20 + k, 60)
        m = update(m, X, y, HP)
    X, y = stream(99, 500)
    assert np.mean(decision(m, X) == y) > 0.9

import numpy as np
from hypothesis import given, settings, strategies as st

from orbigpd import _kernels
from orbigpd._kernels import numba_impl, numpy_impl

seeds = st.integers(0, 2**32 - 1)


def same(name, *args):
    a = numpy_impl[name](*args)
    b = numba_impl[name](*args)
    np.testing.assert_array_equal(a, b)
    return a


def cyclic(n):
    i = np.arange(n)
    return ((i[:, None] + i[None, :]) % n).astype(np.int64)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 7))
def test_assoc_parity(seed, n):
    rng = np.random.default_rng(seed)
    same("assoc_violation", rng.integers(0, n, (n, n)).astype(np.int64))
    assert same("assoc_violation", cyclic(n))[0] == -1


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 12))
def test_closure_parity(seed, n):
    rng = np.random.default_rng(seed)
    mask = rng.random(n) < 0.3
    out = same("closure", cyclic(n), mask)
    # closure of a subset of Z/n is the subgroup generated by gcd
    g = np.gcd.reduce(np.r_[np.flatnonzero(mask), n])
    expected = np.zeros(n, bool)
    expected[::g] = True
    if mask.any():
        np.testing.assert_array_equal(out, expected)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6), st.integers(1, 9))
def test_orbit_and_action_parity(seed, n, m):
    rng = np.random.default_rng(seed)
    action = rng.integers(0, m, (n, m)).astype(np.int64)
    same("orbit_labels", action)
    same("action_violation", action, cyclic(n))
    rot = ((np.arange(n)[:, None] + np.arange(n)[None, :]) % n).astype(np.int64)
    assert same("action_violation", rot, cyclic(n))[0] == -1


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 5), st.integers(1, 5), st.integers(1, 5))
def test_faithful_parity(seed, ng, nh, nx):
    rng = np.random.default_rng(seed)
    src = rng.integers(0, nx, (ng, nx)).astype(np.int64)
    ny = int(rng.integers(1, 5))
    tgt = rng.integers(0, ny, (nh, ny)).astype(np.int64)
    hom = rng.integers(0, nh, ng).astype(np.int64)
    fmap = rng.integers(0, ny, nx).astype(np.int64)
    same("faithful_violation", src, tgt, hom, fmap)


def test_identity_is_faithful():
    act = cyclic(4)
    assert _kernels.faithful_violation(act, act, np.arange(4), np.arange(4)) is None

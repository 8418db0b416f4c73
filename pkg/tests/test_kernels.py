import numpy as np
import pytest
from hypothesis import given, strategies as st

from misobc import kernels

from tests.conftest import crandn

BACKENDS = kernels.backends()
needs_compiled = pytest.mark.skipif("cython" not in BACKENDS, reason="extension not built")


def test_backend_selected():
    assert kernels.BACKEND in BACKENDS


@needs_compiled
@given(st.integers(2, 6).flatmap(lambda d: st.tuples(st.just(d), st.integers(1, d))),
       st.integers(0, 2 ** 32))
def test_null_directions_agree(shape, seed):
    d, r = shape
    basis = crandn(np.random.default_rng(seed), 6, r, d)
    out_c, ok_c = BACKENDS["cython"].null_directions(basis, 1e-6)
    out_p, ok_p = BACKENDS["python"].null_directions(basis, 1e-6)
    np.testing.assert_array_equal(ok_c, ok_p)
    np.testing.assert_allclose(out_c, out_p, atol=1e-12)


@needs_compiled
def test_null_directions_degenerate_agree():
    basis = np.zeros((3, 1, 2), dtype=complex)
    basis[1, 0] = [1, 0]
    basis[2, 0] = [1e-20, 0]
    out_c, ok_c = BACKENDS["cython"].null_directions(basis, 1e-6)
    out_p, ok_p = BACKENDS["python"].null_directions(basis, 1e-6)
    np.testing.assert_array_equal(ok_c, ok_p)
    np.testing.assert_allclose(out_c, out_p, atol=1e-15)


def _rate_inputs(seed, n=32, k=4, m=2):
    rng = np.random.default_rng(seed)
    h = crandn(rng, n, k, m)
    v = crandn(rng, n, 1 + k, m)
    v /= np.linalg.norm(v, axis=2, keepdims=True)
    return h, v


@needs_compiled
@pytest.mark.parametrize("flag", [True, False])
@pytest.mark.parametrize("p_common", [0.0, 50.0])
def test_layered_rates_agree(flag, p_common):
    h, v = _rate_inputs(1)
    results = []
    for mod in (BACKENDS["cython"], BACKENDS["python"]):
        g = mod.stream_gains(h, v)
        results.append((g,) + tuple(mod.layered_rates(g, p_common, np.array([5.0, 5.0]),
                                                      np.array([900.0, 90.0]), 2, flag)))
    for a, b in zip(*results):
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-14)


def test_stream_gains_oracle():
    h, v = _rate_inputs(2, n=3)
    g = kernels.stream_gains(h, v)
    for n in range(3):
        for k in range(h.shape[1]):
            for s in range(v.shape[1]):
                assert g[n, k, s] == pytest.approx(abs(np.vdot(h[n, k], v[n, s])) ** 2, rel=1e-12)


def test_layered_rates_empty_ladder():
    h, v = _rate_inputs(3, k=3)
    g = kernels.stream_gains(h, v[:, :3])
    priv, common, deg, marg = kernels.layered_rates(g, 10.0, np.array([1.0, 1.0]),
                                                    np.zeros(0), 2, True)
    assert deg.shape == (32, 0) and marg.shape == (32, 2)


def test_env_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, MISOBC_KERNELS="python")
    res = subprocess.run([sys.executable, "-c", "from misobc import kernels; print(kernels.BACKEND)"],
                         capture_output=True, text=True, env=env)
    assert res.stdout.strip() == "python"

import numpy as np
import pytest

from gfkmc import kernels
from gfkmc.kernels import compiled_harmonic_paths, python_harmonic_paths

needs_ext = pytest.mark.skipif(compiled_harmonic_paths is None, reason="compiled kernel not built")


def _inputs(B=64, steps=300, n=3, h=1 / 30, seed=0):
    rng = np.random.default_rng(seed)
    x0 = rng.normal(size=(B, n))
    noise = rng.normal(scale=np.sqrt(h), size=(B, steps, n))
    neg_a = -np.array([1.0, 1.3, 0.7])[:n]
    c2 = 0.5 * (1.0 - neg_a**2)
    return x0, noise, h, neg_a, c2


@needs_ext
@pytest.mark.parametrize("n_burn,cap", [(0, np.inf), (40, np.inf), (0, 0.05)])
def test_compiled_matches_python_bitwise(n_burn, cap):
    x0, noise, h, neg_a, c2 = _inputs()
    rec = np.arange(10, 300 - n_burn + 1, 10)
    args = (x0, noise, h, neg_a, c2, -0.3, n_burn, rec, cap, 3)
    for a, b in zip(python_harmonic_paths(*args), compiled_harmonic_paths(*args)):
        assert a.dtype == b.dtype and np.array_equal(a, b)


@needs_ext
def test_compiled_pairs_by_dimension():
    x0, noise, h, neg_a, c2 = _inputs(n=2)
    rec = np.array([300])
    args = (x0, noise, h, neg_a, c2, 0.0, 0, rec, 0.1, 1)
    for a, b in zip(python_harmonic_paths(*args), compiled_harmonic_paths(*args)):
        assert np.array_equal(a, b)


def test_python_kernel_trapezoid_by_hand():
    x0, noise, h, neg_a, c2 = _inputs(B=2, steps=3, n=1)
    lw, xr, flags = python_harmonic_paths(x0, noise, h, neg_a, c2, 0.1, 0, np.array([1, 3]),
                                          np.inf, 1)
    x = x0[:, 0].copy()
    acc = np.zeros(2)
    out = []
    for k in range(3):
        y = x + neg_a[0] * x * h + noise[:, k, 0]
        acc -= 0.5 * h * ((0.1 + c2[0] * x * x) + (0.1 + c2[0] * y * y))
        out.append((acc.copy(), y.copy()))
        x = y
    assert np.allclose(lw[:, 0], out[0][0]) and np.allclose(lw[:, 1], out[2][0])
    assert np.allclose(xr[:, 1, 0], out[2][1])
    assert not flags.any()


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    if kernels.BACKEND == "cython":
        assert kernels.harmonic_paths is compiled_harmonic_paths
    else:
        assert kernels.harmonic_paths is python_harmonic_paths

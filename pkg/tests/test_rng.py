import numpy as np
import pytest

from gfkmc.rng import FIXED_LENGTH, GAUSSIAN, RngStream, increments, normalize_kernel, path_stream


def test_same_key_same_numbers():
    a = path_stream(42, 7).normal(100)
    b = path_stream(42, 7).normal(100)
    assert np.array_equal(a, b)


def test_streams_are_distinct():
    base = path_stream(42, 7).normal(8)
    for other in (path_stream(43, 7), path_stream(42, 8), path_stream(42, 7, attempt=1),
                  path_stream(42, 7, group=1), path_stream(42, 7).substream(0, 1)):
        assert not np.array_equal(base, other.normal(8))


def test_restart_matches_explicit_attempt():
    s = RngStream(5, 3)
    assert np.array_equal(s.restart().normal(4), RngStream(5, 3, attempt=1).normal(4))


def test_substreams_independent_of_main_consumption():
    s1, s2 = RngStream(1, 2), RngStream(1, 2)
    s1.normal(1000)  # consuming the main stream must not shift a substream
    assert np.array_equal(s1.substream(10, 2).normal(5), s2.substream(10, 2).normal(5))


@pytest.mark.parametrize("kernel", [GAUSSIAN, FIXED_LENGTH])
def test_increment_moments(kernel):
    h = 1.0 / 30.0
    dw = increments(path_stream(9, 0), 100_000, 1, 3, h, kernel)
    n = dw.shape[0]
    sigma = np.sqrt(h)
    assert np.all(np.abs(dw.mean(axis=0)) < 4 * sigma / np.sqrt(n))
    assert np.allclose(dw.var(axis=0), h, rtol=0.05)


def test_fixed_length_has_exact_length():
    h = 0.1
    dw = increments(path_stream(1, 0), 50, 2, 3, h, FIXED_LENGTH).reshape(50, 2, 3)
    assert np.allclose(np.linalg.norm(dw, axis=-1), np.sqrt(3 * h), rtol=1e-14)


def test_kernel_aliases():
    assert normalize_kernel("GaussianIncrement") == GAUSSIAN
    assert normalize_kernel("FixedLengthRandomDirection") == FIXED_LENGTH
    with pytest.raises(ValueError):
        normalize_kernel("levy")

"""Counter-based random streams.

Every path owns a Philox stream keyed by ``(seed, stream_id)``.  The 256-bit
counter is split into ``(block, attempt, step_tag, draw_tag)``: the main noise
of an attempt walks the low word, while resamples for a given step live in
their own counter region.  No two (attempt, step, draw) triples can overlap,
so results never depend on how paths are scheduled across workers.
"""
from __future__ import annotations

import numpy as np

from .errors import ConfigInvalid

MASK64 = (1 << 64) - 1

GAUSSIAN = "gaussian"
FIXED_LENGTH = "fixed_length"
KERNELS = (GAUSSIAN, FIXED_LENGTH)

_KERNEL_ALIASES = {
    "gaussian": GAUSSIAN,
    "gaussianincrement": GAUSSIAN,
    "fixed_length": FIXED_LENGTH,
    "fixedlength": FIXED_LENGTH,
    "fixedlengthrandomdirection": FIXED_LENGTH,
}


def normalize_kernel(name: str) -> str:
    key = str(name).replace("-", "_").lower()
    if key not in _KERNEL_ALIASES:
        key = key.replace("_", "")
    try:
        return _KERNEL_ALIASES[key]
    except KeyError:
        raise ConfigInvalid(f"unknown increment kernel {name!r}; choose one of {KERNELS}") from None


class RngStream:
    """A reproducible stream for one path (or one oscillator of one path)."""

    __slots__ = ("seed", "stream_id", "attempt", "_tag", "_gen")

    def __init__(self, seed: int, stream_id: int = 0, attempt: int = 0, tag=(0, 0)):
        self.seed = int(seed) & MASK64
        self.stream_id = int(stream_id) & MASK64
        self.attempt = int(attempt)
        self._tag = (int(tag[0]) & MASK64, int(tag[1]) & MASK64)
        counter = np.array([0, self.attempt & MASK64, *self._tag], dtype=np.uint64)
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key, counter=counter))

    def __repr__(self):
        return (f"RngStream(seed={self.seed}, stream_id={self.stream_id}, "
                f"attempt={self.attempt}, tag={self._tag})")

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def restart(self) -> "RngStream":
        """Fresh stream for the next attempt of the same path."""
        return RngStream(self.seed, self.stream_id, self.attempt + 1)

    def substream(self, step: int, draw: int) -> "RngStream":
        """Independent stream reserved for resample ``draw`` (>= 1) at ``step``."""
        return RngStream(self.seed, self.stream_id, self.attempt, (step + 1, draw))

    def normal(self, size=None):
        return self._gen.standard_normal(size)

    def uniform(self, size=None):
        return self._gen.random(size)


def path_stream(seed: int, path_index: int, attempt: int = 0, group: int = 0) -> RngStream:
    """Stream for ``path_index``; ``group`` separates independent ensembles
    drawn from one seed (e.g. the oscillators of a thermal run)."""
    return RngStream(seed, (int(group) << 40) | int(path_index), attempt)


def increments(stream: RngStream, n_steps: int, n_particles: int, dim: int, h: float,
               kernel: str = GAUSSIAN) -> np.ndarray:
    """Brownian increments for ``n_steps`` steps, shape ``(n_steps, n_particles*dim)``.

    ``gaussian``: Normal(0, h) per coordinate.
    ``fixed_length``: per particle, a uniformly random direction of length
    sqrt(dim*h), which has the same covariance as the Gaussian increment.
    """
    n_coords = n_particles * dim
    g = stream.normal((n_steps, n_coords))
    if kernel == GAUSSIAN:
        return np.sqrt(h) * g
    if kernel != FIXED_LENGTH:
        raise ConfigInvalid(f"unknown increment kernel {kernel!r}")
    g = g.reshape(n_steps, n_particles, dim)
    norm = np.sqrt(np.sum(g * g, axis=-1, keepdims=True))
    # a zero-norm draw has probability zero; guard anyway
    norm[norm == 0.0] = 1.0
    return (np.sqrt(dim * h) * (g / norm)).reshape(n_steps, n_coords)

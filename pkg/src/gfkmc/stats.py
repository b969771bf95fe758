"""Streaming moments, jackknife errors, 1/t extrapolation and table formatting."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateDesign, ZeroDenominatorBlock


@dataclass
class Accumulator:
    """Welford/Chan running mean and variance with optional block sums.

    ``merge`` combines two accumulators; merging worker-local accumulators in
    a fixed order gives bit-identical totals.
    """

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    block_size: int = 0
    block_sums: list = field(default_factory=list)
    _open_sum: float = 0.0
    _open_count: int = 0

    def push(self, x: float) -> None:
        x = float(x)
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)
        if self.block_size:
            self._open_sum += x
            self._open_count += 1
            if self._open_count == self.block_size:
                self.block_sums.append(self._open_sum)
                self._open_sum, self._open_count = 0.0, 0

    def extend(self, xs) -> "Accumulator":
        for x in np.asarray(xs, dtype=float).ravel():
            self.push(x)
        return self

    def merge(self, other: "Accumulator") -> "Accumulator":
        if self.block_size != other.block_size:
            raise ValueError("cannot merge accumulators with different block sizes")
        out = Accumulator(block_size=self.block_size)
        n = self.count + other.count
        out.count = n
        if n:
            delta = other.mean - self.mean
            out.mean = self.mean + delta * other.count / n
            out.m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        out.block_sums = self.block_sums + other.block_sums
        # partially filled blocks do not straddle workers
        out._open_sum = self._open_sum + other._open_sum
        out._open_count = self._open_count + other._open_count
        return out

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count > 1 else 0.0


# --------------------------------------------------------------------------
# jackknife


def block_sums(values: np.ndarray, n_blocks: int) -> np.ndarray:
    """Sum contiguous blocks along axis 0 (block sizes differ by at most one)."""
    values = np.asarray(values, dtype=float)
    n_blocks = max(1, min(int(n_blocks), values.shape[0]))
    return np.stack([b.sum(axis=0) for b in np.array_split(values, n_blocks, axis=0)])


def jackknife_ratio(numerator, denominator):
    """Delete-one-block jackknife of sum(num)/sum(den).

    ``numerator`` and ``denominator`` are per-block sums (axis 0 = block);
    trailing axes are carried through, so a whole table of slices can be
    handled in one call.
    """
    num = np.asarray(numerator, dtype=float)
    den = np.asarray(denominator, dtype=float)
    n = num.shape[0]
    if n < 2:
        raise ValueError("jackknife needs at least two blocks")
    if np.any(den == 0):
        raise ZeroDenominatorBlock("a denominator block is zero")
    tot_n, tot_d = num.sum(axis=0), den.sum(axis=0)
    value = tot_n / tot_d
    loo = (tot_n - num) / (tot_d - den)
    return value, _jk_error(loo)


def jackknife_function(block_values, counts, fn: Callable):
    """Jackknife of ``fn(mean)`` where ``mean`` is the overall sample mean.

    ``block_values`` are per-block sums, ``counts`` the samples per block.
    """
    s = np.asarray(block_values, dtype=float)
    c = np.asarray(counts, dtype=float).reshape((-1,) + (1,) * (s.ndim - 1))
    n = s.shape[0]
    if n < 2:
        raise ValueError("jackknife needs at least two blocks")
    total, total_c = s.sum(axis=0), c.sum(axis=0)
    value = fn(total / total_c)
    loo = fn((total - s) / (total_c - c))
    return value, _jk_error(loo)


def _jk_error(loo):
    n = loo.shape[0]
    centred = loo - loo.mean(axis=0)
    return np.sqrt((n - 1) / n * np.sum(centred * centred, axis=0))


# --------------------------------------------------------------------------
# extrapolation


@dataclass(frozen=True)
class FitResult:
    e_infinity: float
    a_coeff: float
    covariance: np.ndarray
    chi2: float

    @property
    def e_infinity_err(self) -> float:
        return math.sqrt(self.covariance[0, 0])

    @property
    def a_err(self) -> float:
        return math.sqrt(self.covariance[1, 1])


def extrapolate_inverse_time(points, weighted: bool = True) -> FitResult:
    """Least-squares fit of E(t) = E_inf + a/t to ``(t, E, sigma)`` rows.

    Weighted mode uses 1/sigma^2 weights and reports the unscaled parameter
    covariance; unweighted mode scales the covariance by the residual
    variance.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must be rows of (t, E, sigma)")
    t, e, sig = pts.T
    if len(t) < 3:
        raise ValueError("need at least three points")
    if np.any(t <= 0) or np.any(sig <= 0):
        raise ValueError("times and sigmas must be positive")
    if np.all(t == t[0]):
        raise DegenerateDesign("all times are equal; E_inf and a are not separable")
    u = 1.0 / t
    w = 1.0 / sig**2 if weighted else np.ones_like(t)
    sw, su, se = w.sum(), (w * u).sum(), (w * e).sum()
    suu, sue = (w * u * u).sum(), (w * u * e).sum()
    det = sw * suu - su * su
    if det <= 0 or not np.isfinite(det):
        raise DegenerateDesign("singular normal equations")
    e_inf = (suu * se - su * sue) / det
    a = (sw * sue - su * se) / det
    cov = np.array([[suu, -su], [-su, sw]]) / det
    resid = e - e_inf - a * u
    chi2 = float(np.sum(w * resid * resid))
    if not weighted:
        cov = cov * (chi2 / (len(t) - 2) if len(t) > 2 else 0.0)
    return FitResult(float(e_inf), float(a), cov, chi2)


# --------------------------------------------------------------------------
# formatting


def format_parenthetical(value: float, stderr: float) -> str:
    """``value(err)`` notation with the error in units of the last digit.

    The error keeps two significant digits when its leading digits are
    below 35 and one otherwise; the value is rounded to the same place.
    """
    if stderr < 0 or math.isnan(stderr):
        raise ValueError("stderr must be non-negative")
    if stderr == 0 or not math.isfinite(value):
        return repr(float(value))
    exp = math.floor(math.log10(stderr))
    lead2 = int(Decimal(stderr).scaleb(1 - exp).quantize(Decimal(1), ROUND_HALF_UP))
    if lead2 >= 100:  # rounding carried into the next decade
        exp += 1
        lead2 = 10
    digits = 2 if lead2 < 35 else 1
    place = exp - digits + 1
    err_digits = int(Decimal(stderr).scaleb(-place).quantize(Decimal(1), ROUND_HALF_UP))
    if digits == 1 and err_digits >= 10:
        place += 1
        err_digits = int(Decimal(stderr).scaleb(-place).quantize(Decimal(1), ROUND_HALF_UP))
    q = Decimal(1).scaleb(place)
    v = Decimal(repr(float(value))).quantize(q, ROUND_HALF_UP)
    vs = f"{v:f}" if place < 0 else f"{int(v)}"
    return f"{vs}({err_digits})"

"""Ratio estimators over weighted paths: expectations, energies, correlations."""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import AllWeightsDegenerate, ConfigInvalid
from .paths import EnsembleResult, PathParams, run_ensemble
from .stats import block_sums, jackknife_function, jackknife_ratio
from .trial import PerturbedPotential, TrialFunction

MIN_ESS = 10.0
DEFAULT_BLOCKS = 50


@dataclass(frozen=True)
class Observable:
    """A scalar function of one configuration.

    ``family`` is one of ``power_ri``, ``power_rij``, ``inverse_power_ri``,
    ``inverse_power_rij``, ``coordinate``, ``constant`` or ``custom``.
    Electron sums run over all particles (``sum_i r_i^n``) or all pairs.
    """

    name: str
    family: str
    power: float = 1.0
    dim: int = 3
    func: Callable | None = None
    index: int = 0

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        fam = self.family
        if fam == "constant":
            return np.ones(x.shape[:-1])
        if fam == "custom":
            return np.asarray(self.func(x), dtype=float)
        if fam == "coordinate":
            return x[..., self.index]
        e = x.reshape(x.shape[:-1] + (-1, self.dim))
        if fam in ("power_ri", "inverse_power_ri"):
            r = np.sqrt(np.sum(e * e, axis=-1))
        elif fam in ("power_rij", "inverse_power_rij"):
            n = e.shape[-2]
            if n < 2:
                raise ConfigInvalid(f"{self.name} needs at least two particles")
            r = np.stack([np.sqrt(np.sum((e[..., i, :] - e[..., j, :]) ** 2, axis=-1))
                          for i, j in itertools.combinations(range(n), 2)], axis=-1)
        else:
            raise ConfigInvalid(f"unknown observable family {fam!r}")
        p = -abs(self.power) if fam.startswith("inverse") else self.power
        return np.sum(r**p, axis=-1)

    __call__ = evaluate


def power_of_ri(n: float, dim: int = 3) -> Observable:
    if n < 0:
        return inverse_power_of_ri(-n, dim)
    return Observable("r_i" if n == 1 else f"r_i^{n:g}", "power_ri", n, dim)


def power_of_rij(n: float, dim: int = 3) -> Observable:
    if n < 0:
        return inverse_power_of_rij(-n, dim)
    return Observable("r_ij" if n == 1 else f"r_ij^{n:g}", "power_rij", n, dim)


def inverse_power_of_ri(n: float, dim: int = 3) -> Observable:
    # biased with plain diffusion sampling: dominated by the region near the nucleus
    return Observable(f"r_i^-{n:g}", "inverse_power_ri", n, dim)


def inverse_power_of_rij(n: float, dim: int = 3) -> Observable:
    return Observable(f"r_ij^-{n:g}", "inverse_power_rij", n, dim)


def coordinate(index: int, name: str | None = None) -> Observable:
    return Observable(name or f"x{index}", "coordinate", index=index)


def constant_one() -> Observable:
    return Observable("one", "constant")


def custom(name: str, func: Callable) -> Observable:
    return Observable(name, "custom", func=func)


OBSERVABLE_NAMES = {
    "r_i": lambda: power_of_ri(1),
    "r_i^2": lambda: power_of_ri(2),
    "r_ij": lambda: power_of_rij(1),
    "r_ij^2": lambda: power_of_rij(2),
    "r_i^-1": lambda: inverse_power_of_ri(1),
    "r_i^-2": lambda: inverse_power_of_ri(2),
    "r_ij^-1": lambda: inverse_power_of_rij(1),
    "r_ij^-2": lambda: inverse_power_of_rij(2),
}


def observable_by_name(name: str) -> Observable:
    try:
        return OBSERVABLE_NAMES[name.strip()]()
    except KeyError:
        raise ConfigInvalid(
            f"unknown observable {name!r}; known: {', '.join(OBSERVABLE_NAMES)}") from None


@dataclass
class ExpectationResult:
    name: str
    times: np.ndarray
    values: np.ndarray
    stderrs: np.ndarray
    ess: np.ndarray | None = None

    @property
    def converged_value(self):
        return float(self.values[-1]), float(self.stderrs[-1])

    def rows(self):
        return list(zip(self.times.tolist(), self.values.tolist(), self.stderrs.tolist()))

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time", "value", "stderr"])
            for t, v, s in self.rows():
                w.writerow([repr(t), repr(v), repr(s)])


# --------------------------------------------------------------------------
# reductions over an ensemble


def _weights(lw):
    """exp(lw - max) per column, plus the shift."""
    shift = np.max(lw, axis=0)
    return np.exp(lw - shift), shift


def effective_sample_size(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    return np.sum(w, axis=0) ** 2 / np.sum(w * w, axis=0)


def _check_ess(ess):
    worst = float(np.min(ess))
    if worst < MIN_ESS:
        raise AllWeightsDegenerate(
            f"effective sample size {worst:.1f} < {MIN_ESS:g}; "
            "the trial function is too poor for this run time")


def expectation_from_ensemble(ens: EnsembleResult, obs_index: int = 0,
                              n_blocks: int = DEFAULT_BLOCKS, name: str = "") -> ExpectationResult:
    """Per slice: sum_p A_p(t1) w_p / sum_p w_p with the full-path weight."""
    inc = ens.included
    w, _ = _weights(ens.log_weights[inc, -1])
    ess = effective_sample_size(w)
    _check_ess(np.atleast_1d(ess))
    a = ens.observables[inc, :, obs_index]
    wb = np.broadcast_to(w[:, None], a.shape)
    # identical array shapes keep the reductions identical: A == 1 gives exactly 1
    num = block_sums(a * wb, n_blocks)
    den = block_sums(np.array(wb), n_blocks)
    values, errs = jackknife_ratio(num, den)
    return ExpectationResult(name, ens.times, values, errs, np.full(a.shape[1], ess))


def energy_from_ensemble(ens: EnsembleResult, e0: float,
                         n_blocks: int = DEFAULT_BLOCKS) -> ExpectationResult:
    """Per slice: E(t) = e0 - log(mean_p exp(lw_p(t))) / t."""
    inc = ens.included
    lw = ens.log_weights[inc]
    w, shift = _weights(lw)
    ess = effective_sample_size(w)
    _check_ess(ess)
    t = ens.times
    sums = block_sums(w, n_blocks)
    counts = np.array([len(b) for b in np.array_split(np.arange(lw.shape[0]),
                                                        sums.shape[0])])

    def energy(mean_w):
        return e0 - (np.log(mean_w) + shift) / t

    values, errs = jackknife_function(sums, counts, energy)
    return ExpectationResult("energy", t, values, errs, ess)


def correlation_from_ensemble(ens: EnsembleResult, obs_indices: Sequence[int],
                              slice_indices: Sequence[int], n_blocks: int = DEFAULT_BLOCKS):
    inc = ens.included
    w, _ = _weights(ens.log_weights[inc, -1])
    _check_ess(np.atleast_1d(effective_sample_size(w)))
    prod = np.ones(w.shape)
    for j, s in zip(obs_indices, slice_indices):
        prod = prod * ens.observables[inc, s, j]
    value, err = jackknife_ratio(block_sums(prod * w, n_blocks), block_sums(w, n_blocks))
    return float(value), float(err)


# --------------------------------------------------------------------------
# public operations


def gfk_expectation(trial: TrialFunction, potential: PerturbedPotential, obs: Observable,
                    params: PathParams, start=None, workers: int = 1,
                    n_blocks: int = DEFAULT_BLOCKS) -> ExpectationResult:
    """Weighted ratio estimate of <A> at every recording slice."""
    ens = run_ensemble(trial, potential.potential, params, [obs], start=start, workers=workers)
    return expectation_from_ensemble(ens, 0, n_blocks, obs.name)


def energy_estimate(trial: TrialFunction, potential: PerturbedPotential, params: PathParams,
                    start=None, workers: int = 1,
                    n_blocks: int = DEFAULT_BLOCKS) -> ExpectationResult:
    """Large-deviation energy estimate E(t) at every recording slice."""
    ens = run_ensemble(trial, potential.potential, params, [], start=start, workers=workers)
    return energy_from_ensemble(ens, trial.e0, n_blocks)


def correlation_function(trial: TrialFunction, potential: PerturbedPotential,
                         obs_list: Sequence[tuple[float, Observable]], params: PathParams,
                         start=None, workers: int = 1, n_blocks: int = DEFAULT_BLOCKS):
    """Multi-time estimator <prod_k A_k(Y(t_k)) w> / <w>; returns (value, stderr)."""
    times = [float(t) for t, _ in obs_list]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigInvalid("correlation times must be strictly increasing")
    if times and (times[0] <= 0 or times[-1] >= params.total_time):
        raise ConfigInvalid("correlation times must lie strictly inside (0, total_time)")
    steps = list(params.steps_for_times(times)) + [params.n_steps]
    ens = run_ensemble(trial, potential.potential, params, [o for _, o in obs_list],
                       start=start, record_steps=steps, workers=workers)
    k = len(obs_list)
    return correlation_from_ensemble(ens, range(k), range(k), n_blocks)

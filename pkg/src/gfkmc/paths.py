"""Brownian and drifted diffusion paths with Feynman-Kac weights.

A path advances by Euler-Maruyama steps ``y = x + drift(x) h + dW`` and
accumulates ``log_weight = -int V_p ds`` with the trapezoidal rule.  Paths are
processed in fixed-size batches; every path draws from its own counter-based
stream, so an ensemble is bit-identical for any number of workers.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import multiprocessing as mp
import numpy as np

from . import kernels
from .errors import ConfigInvalid, DriftSingular
from .rng import GAUSSIAN, RngStream, increments, normalize_kernel, path_stream
from .trial import (
    FreeTrial,
    GaussianTrial,
    HarmonicPotential,
    PerturbedPotential,
    Potential,
    TrialFunction,
)

log = logging.getLogger(__name__)

LOG_WEIGHT_LIMIT = 700.0


@dataclass(frozen=True)
class Configuration:
    coords: np.ndarray
    dim: int = 3
    n_particles: int = 1

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float).reshape(-1)
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        if self.dim < 1 or self.n_particles < 1:
            raise ConfigInvalid("dim and n_particles must be positive")
        if coords.size != self.dim * self.n_particles:
            raise ConfigInvalid(
                f"{coords.size} coordinates cannot hold {self.n_particles} particles in {self.dim}-D")
        if not np.all(np.isfinite(coords)):
            raise ConfigInvalid("configuration has non-finite coordinates")

    @classmethod
    def for_trial(cls, trial: TrialFunction, coords=None) -> "Configuration":
        coords = trial.default_start() if coords is None else coords
        return cls(coords, trial.dim, trial.n_particles)

    def with_coords(self, coords) -> "Configuration":
        return Configuration(coords, self.dim, self.n_particles)


@dataclass(frozen=True)
class PathParams:
    stepsize: float = 1.0 / 30.0
    total_time: float = 1.0
    n_paths: int = 1000
    seed: int = 0
    kernel: str = GAUSSIAN
    record_every: int = 30
    burn_in: float = 0.0
    drift_cap: float = 1.0
    max_resample: int = 20
    max_restarts: int = 10
    batch_size: int = 512

    def __post_init__(self):
        if not self.stepsize > 0:
            raise ConfigInvalid("stepsize must be positive")
        if not self.total_time > 0:
            raise ConfigInvalid("total_time must be positive")
        if self.n_paths < 1:
            raise ConfigInvalid("n_paths must be positive")
        if self.record_every < 1 or self.batch_size < 1:
            raise ConfigInvalid("record_every and batch_size must be positive")
        if self.burn_in < 0:
            raise ConfigInvalid("burn_in must be non-negative")
        object.__setattr__(self, "kernel", normalize_kernel(self.kernel))
        object.__setattr__(self, "seed", int(self.seed) & ((1 << 64) - 1))
        _steps(self.total_time, self.stepsize, "total_time")
        if self.burn_in:
            _steps(self.burn_in, self.stepsize, "burn_in")

    @property
    def n_steps(self) -> int:
        return _steps(self.total_time, self.stepsize, "total_time")

    @property
    def n_burn(self) -> int:
        return _steps(self.burn_in, self.stepsize, "burn_in") if self.burn_in else 0

    def default_record_steps(self) -> np.ndarray:
        steps = list(range(self.record_every, self.n_steps + 1, self.record_every))
        if not steps or steps[-1] != self.n_steps:
            steps.append(self.n_steps)
        return np.array(steps, dtype=np.int64)

    def steps_for_times(self, times) -> np.ndarray:
        return np.array([_steps(t, self.stepsize, "recording time") for t in times], dtype=np.int64)


def _steps(t, h, what) -> int:
    n = round(t / h)
    if n < 1 or abs(t / h - n) > 1e-9:
        raise ConfigInvalid(f"{what}={t} is not a positive integer multiple of stepsize={h}")
    return int(n)


@dataclass
class WeightedPathResult:
    final_config: Configuration
    log_weight: float
    times: np.ndarray
    log_weights: np.ndarray      # running log weight at each recorded slice
    observables: np.ndarray      # (n_slices, n_obs)
    configs: np.ndarray | None = None

    @property
    def slice_samples(self):
        return list(zip(self.times, self.observables, self.log_weights))


@dataclass
class EnsembleResult:
    times: np.ndarray            # (R,)
    log_weights: np.ndarray      # (P, R)
    observables: np.ndarray      # (P, R, n_obs)
    final: np.ndarray            # (P, n_coords)
    included: np.ndarray         # (P,) False for overflowed paths
    configs: np.ndarray | None = None
    restarts: int = 0
    resamples: int = 0
    backend: str = "generic"

    @property
    def n_paths(self) -> int:
        return self.log_weights.shape[0]

    @property
    def n_excluded(self) -> int:
        return int(np.count_nonzero(~self.included))


# --------------------------------------------------------------------------
# single steps


def brownian_step(config: Configuration, h: float, rng_stream: RngStream,
                  kernel: str = GAUSSIAN) -> Configuration:
    if h < 0:
        raise ValueError("step must be non-negative")
    if h == 0:
        return config
    dw = increments(rng_stream, 1, config.n_particles, config.dim, h, normalize_kernel(kernel))[0]
    return config.with_coords(config.coords + dw)


def _drift_too_large(drift, h, dim, cap):
    d = np.asarray(drift).reshape(drift.shape[:-1] + (-1, dim))
    return np.max(np.sqrt(np.sum(d * d, axis=-1)), axis=-1) * h > cap


def drifted_step(config: Configuration, trial: TrialFunction, h: float, rng_stream: RngStream,
                 kernel: str = GAUSSIAN, drift_cap: float = 1.0,
                 max_resample: int = 20) -> Configuration:
    """One Euler-Maruyama step of dY = grad(phi)/phi dt + dW.

    A proposal that lands on a singular/nodal point, changes the sign of
    phi_0 or exceeds the drift cap is redrawn from a dedicated substream;
    after ``max_resample`` failures ``DriftSingular`` is raised.
    """
    kernel = normalize_kernel(kernel)
    x = config.coords
    ev = trial.evaluate(x)
    if not ev.ok or _drift_too_large(ev.drift, h, config.dim, drift_cap):
        raise DriftSingular("drift is singular at the current configuration")
    base = x + ev.drift * h
    stream = rng_stream
    for attempt in range(max_resample + 1):
        if attempt:
            stream = rng_stream.substream(0, attempt)
        dw = increments(stream, 1, config.n_particles, config.dim, h, kernel)[0]
        y = base + dw
        ey = trial.evaluate(y)
        if (ey.ok and not _drift_too_large(ey.drift, h, config.dim, drift_cap)
                and np.sign(ey.value) == np.sign(ev.value)):
            return config.with_coords(y)
    raise DriftSingular(f"no acceptable step after {max_resample} resamples")


# --------------------------------------------------------------------------
# batch engine


def _is_harmonic_pair(trial, potential):
    if not isinstance(potential, HarmonicPotential):
        return False
    if isinstance(trial, GaussianTrial):
        return trial.omegas.size == potential.n_coords
    return isinstance(trial, FreeTrial) and trial.n_coords == potential.n_coords


def _harmonic_coeffs(trial, potential):
    n = potential.n_coords
    a = trial.omegas if isinstance(trial, GaussianTrial) else np.zeros(n)
    w2 = potential.omegas**2
    # V_p = sum_i (w_i^2 - a_i^2)/2 x_i^2 + (sum_i a_i/2 - e0)
    c2 = 0.5 * (w2 - a * a)
    c0 = 0.0
    for ai in a:
        c0 += 0.5 * ai
    c0 -= trial.e0
    return -a, c2, float(c0)


class _Job:
    """Everything a worker needs for one ensemble; shared via fork."""

    def __init__(self, trial, potential, params, starts, record_steps, observables,
                 keep_configs, group, fast):
        self.trial = trial
        self.potential = potential
        self.pp = PerturbedPotential(trial, potential)
        self.params = params
        self.starts = starts
        self.record_steps = record_steps
        self.observables = list(observables)
        self.keep_configs = keep_configs
        self.group = group
        self.fast = fast

    def start_for(self, idx):
        return self.starts[idx] if self.starts.ndim == 2 else self.starts

    def noise(self, streams):
        p = self.params
        t = self.trial
        return np.stack([increments(s, p.n_burn + p.n_steps, t.n_particles, t.dim,
                                    p.stepsize, p.kernel) for s in streams])

    def run_batch(self, indices):
        """Propagate the paths ``indices``; restarts stay inside the batch."""
        p = self.params
        attempts = np.zeros(len(indices), dtype=int)
        out = None
        todo = np.arange(len(indices))
        restarts = resamples = 0
        while todo.size:
            streams = [path_stream(p.seed, indices[i], attempts[i], self.group) for i in todo]
            x0 = np.stack([self.start_for(indices[i]) for i in todo])
            res, failed, n_res = self._propagate(x0, streams)
            resamples += n_res
            if out is None:
                out = res
            else:
                for key, arr in res.items():
                    if arr is not None:
                        out[key][todo] = arr
            todo = todo[failed]
            if todo.size:
                restarts += todo.size
                attempts[todo] += 1
                if np.any(attempts[todo] > p.max_restarts):
                    raise DriftSingular(
                        f"path restarted more than {p.max_restarts} times; "
                        "the trial function or drift cap is unsuitable")
        out["restarts"] = restarts
        out["resamples"] = resamples
        return out

    def _propagate(self, x0, streams):
        noise = self.noise(streams)
        if self.fast:
            neg_a, c2, c0 = _harmonic_coeffs(self.trial, self.potential)
            lw, xr, flags = kernels.harmonic_paths(
                x0, noise, self.params.stepsize, neg_a, c2, c0, self.params.n_burn,
                self.record_steps, self.params.drift_cap, self.trial.dim)
            flagged = flags.astype(bool)
            if flagged.any():
                # rare: redo those paths with resampling in the generic engine
                sub, failed, n_res = self._generic(x0[flagged], noise[flagged],
                                                   [s for s, f in zip(streams, flagged) if f])
                lw[flagged] = sub["lw"]
                xr[flagged] = sub["xr"]
                failed_all = np.zeros(len(streams), bool)
                failed_all[np.flatnonzero(flagged)[failed]] = True
                return self._package(lw, xr), failed_all, n_res
            return self._package(lw, xr), np.zeros(len(streams), bool), 0
        res, failed, n_res = self._generic(x0, noise, streams)
        return self._package(res["lw"], res["xr"]), failed, n_res

    def _package(self, lw, xr):
        B, R, n = xr.shape
        flat = xr.reshape(B * R, n)
        obs = np.empty((B, R, len(self.observables)))
        for j, o in enumerate(self.observables):
            obs[:, :, j] = np.asarray(o.evaluate(flat), dtype=float).reshape(B, R)
        return {
            "lw": lw,
            "obs": obs,
            "final": xr[:, -1, :].copy(),
            "configs": xr if self.keep_configs else None,
        }

    def _generic(self, x0, noise, streams):
        p = self.params
        trial, pp = self.trial, self.pp
        h, cap, dim = p.stepsize, p.drift_cap, trial.dim
        B, n = x0.shape
        rec = self.record_steps
        lw = np.zeros(B)
        lw_rec = np.zeros((B, len(rec)))
        x_rec = np.zeros((B, len(rec), n))
        failed = np.zeros(B, bool)
        n_res = 0

        x = np.array(x0, dtype=float)
        ev, vp_x, ok = pp.evaluate(x)
        bad0 = ~ok | _drift_too_large(ev.drift, h, dim, cap)
        failed |= bad0
        drift, sign = ev.drift, np.sign(ev.value)
        r = 0
        for k in range(p.n_burn + p.n_steps):
            y = x + drift * h + noise[:, k]
            ey, vp_y, ok = pp.evaluate(y)
            bad = (~ok | _drift_too_large(ey.drift, h, dim, cap) | (np.sign(ey.value) != sign)) & ~failed
            if bad.any():
                for i in np.flatnonzero(bad):
                    n_res += 1
                    for j in range(1, p.max_resample + 1):
                        dw = increments(streams[i].substream(k, j), 1, trial.n_particles, dim,
                                        h, p.kernel)
                        yi = x[i:i + 1] + drift[i:i + 1] * h + dw
                        ei, vpi, oki = pp.evaluate(yi)
                        if (oki[0] and not _drift_too_large(ei.drift, h, dim, cap)[0]
                                and np.sign(ei.value[0]) == sign[i]):
                            y[i] = yi[0]
                            ey.drift[i] = ei.drift[0]
                            ey.value[i] = ei.value[0]
                            vp_y[i] = vpi[0]
                            break
                    else:
                        failed[i] = True
            if failed.any():
                # freeze failed paths; they are rerun from the start
                y[failed] = x[failed]
                vp_y[failed] = 0.0
                ey.drift[failed] = 0.0
            if k >= p.n_burn:
                lw = lw - 0.5 * h * (vp_x + vp_y)
                if r < len(rec) and k - p.n_burn + 1 == rec[r]:
                    lw_rec[:, r] = lw
                    x_rec[:, r] = y
                    r += 1
            x, drift, vp_x = y, ey.drift, vp_y
        return {"lw": lw_rec, "xr": x_rec}, failed, n_res


_CURRENT_JOB: _Job | None = None


def _run_batch_in_worker(indices):
    return _CURRENT_JOB.run_batch(indices)


def run_ensemble(trial: TrialFunction, potential: Potential, params: PathParams,
                 observables: Sequence = (), start=None, record_steps=None,
                 workers: int = 1, keep_configs: bool = False, group: int = 0,
                 backend: str = "auto") -> EnsembleResult:
    """Run ``params.n_paths`` weighted paths and collect per-slice samples.

    ``start`` is a single configuration shared by all paths or an array of
    shape ``(n_paths, n_coords)``; ``record_steps`` are 1-based step numbers
    after burn-in (default: every ``record_every`` steps plus the last).
    ``backend`` is ``auto`` (kernel when the trial/potential pair is
    harmonic), ``kernel`` or ``generic``.
    """
    global _CURRENT_JOB
    if start is None:
        start = trial.default_start()
    if isinstance(start, Configuration):
        start = start.coords
    starts = np.asarray(start, dtype=float)
    if starts.shape[-1] != trial.n_coords:
        raise ConfigInvalid("start configuration does not match the trial's coordinate count")
    if record_steps is None:
        record_steps = params.default_record_steps()
    record_steps = np.asarray(record_steps, dtype=np.int64)
    if record_steps.size == 0 or np.any(np.diff(record_steps) <= 0) \
            or record_steps[0] < 1 or record_steps[-1] > params.n_steps:
        raise ConfigInvalid("record steps must be increasing and inside (0, n_steps]")

    harmonic = _is_harmonic_pair(trial, potential)
    if backend == "kernel" and not harmonic:
        raise ConfigInvalid("the compiled kernel only handles Gaussian/free trials in harmonic potentials")
    fast = harmonic and backend != "generic"

    job = _Job(trial, potential, params, starts, record_steps, observables,
               keep_configs, group, fast)
    bs = params.batch_size
    batches = [np.arange(i, min(i + bs, params.n_paths)) for i in range(0, params.n_paths, bs)]

    if workers > 1 and len(batches) > 1:
        _CURRENT_JOB = job
        try:
            ctx = mp.get_context("fork")
            with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
                outs = list(pool.map(_run_batch_in_worker, batches))
        finally:
            _CURRENT_JOB = None
    else:
        outs = [job.run_batch(b) for b in batches]

    lw = np.concatenate([o["lw"] for o in outs])
    result = EnsembleResult(
        times=record_steps * params.stepsize,
        log_weights=lw,
        observables=np.concatenate([o["obs"] for o in outs]),
        final=np.concatenate([o["final"] for o in outs]),
        included=np.all(np.abs(lw) <= LOG_WEIGHT_LIMIT, axis=1) & np.all(np.isfinite(lw), axis=1),
        configs=np.concatenate([o["configs"] for o in outs]) if keep_configs else None,
        restarts=sum(o["restarts"] for o in outs),
        resamples=sum(o["resamples"] for o in outs),
        backend=kernels.BACKEND if fast else "generic",
    )
    if result.restarts or result.resamples or result.n_excluded:
        log.info("ensemble diagnostics: %d restarts, %d resampled steps, %d overflowed paths",
                 result.restarts, result.resamples, result.n_excluded)
    return result


def run_path(start: Configuration, trial: TrialFunction, params: PathParams,
             observables: Sequence = (), rng_stream: RngStream | None = None,
             potential: Potential | None = None, record_steps=None) -> WeightedPathResult:
    """Single weighted path from ``start`` driven by ``rng_stream``.

    ``potential`` defaults to the harmonic potential matching a Gaussian
    trial; other trials must pass one explicitly.
    """
    if potential is None:
        if isinstance(trial, GaussianTrial):
            potential = HarmonicPotential(np.ones(trial.n_coords))
        else:
            raise ConfigInvalid("run_path needs a potential for this trial")
    if rng_stream is None:
        rng_stream = path_stream(params.seed, 0)
    coords = start.coords if isinstance(start, Configuration) else np.asarray(start, float)
    if record_steps is None:
        record_steps = params.default_record_steps()
    record_steps = np.asarray(record_steps, dtype=np.int64)
    job = _Job(trial, potential, params, coords, record_steps, observables, True, 0, False)
    stream = rng_stream
    for _ in range(params.max_restarts + 1):
        noise = job.noise([stream])
        res, failed, _ = job._generic(coords[None, :], noise, [stream])
        if not failed[0]:
            break
        stream = stream.restart()
    else:
        raise DriftSingular("path could not be completed within the restart budget")
    pkg = job._package(res["lw"], res["xr"])
    lw = res["lw"][0]
    return WeightedPathResult(
        final_config=Configuration(res["xr"][0, -1], trial.dim, trial.n_particles),
        log_weight=float(lw[-1]),
        times=record_steps * params.stepsize,
        log_weights=lw,
        observables=pkg["obs"][0],
        configs=res["xr"][0],
    )

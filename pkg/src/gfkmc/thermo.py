"""Finite-temperature harmonic-oscillator thermodynamics from weighted Brownian paths.

Run time equals inverse temperature.  Each oscillator is simulated as an
independent one-dimensional ensemble started at the origin; endpoint
observables use the oscillator's own potential energy V = w^2 x^2 / 2, so
U = <V(X(beta))>_w and C = beta^2 Var_w[V(X(beta))].
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigInvalid, NonpositiveZ, TruncationInsufficient
from .oracles import transfer_matrix_moments
from .paths import PathParams, run_ensemble
from .rng import GAUSSIAN, normalize_kernel
from .stats import block_sums, jackknife_function, jackknife_ratio
from .trial import FreeTrial, GaussianTrial, HarmonicPotential

QUANTITIES = ("Z", "rho", "F", "U", "C")
SWEEP_HEADER = ["temperature", "beta", "quantity", "mc_value", "stderr", "oracle_value", "oracle_name"]


@dataclass(frozen=True)
class ThermoParams:
    temperature: float
    n_oscillators: int = 1
    frequencies: tuple = ()
    stepsize: float = 1.0 / 30.0
    n_paths: int = 10000
    seed: int = 0
    kernel: str = GAUSSIAN
    importance: bool = False
    n_blocks: int = 50
    batch_size: int = 1024

    def __post_init__(self):
        if not self.temperature > 0:
            raise ConfigInvalid("temperature must be positive")
        if self.n_oscillators < 1:
            raise ConfigInvalid("need at least one oscillator")
        freqs = tuple(float(f) for f in self.frequencies) or (1.0,) * self.n_oscillators
        if len(freqs) != self.n_oscillators or any(f <= 0 for f in freqs):
            raise ConfigInvalid("frequencies must be positive, one per oscillator")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "kernel", normalize_kernel(self.kernel))
        if not self.stepsize > 0:
            raise ConfigInvalid("stepsize must be positive")

    @property
    def beta(self) -> float:
        return 1.0 / self.temperature

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.beta / self.stepsize)))

    @property
    def effective_stepsize(self) -> float:
        """Step actually used: beta split into a whole number of steps."""
        return self.beta / self.n_steps

    def path_params(self) -> PathParams:
        return PathParams(stepsize=self.effective_stepsize, total_time=self.beta,
                          n_paths=self.n_paths, seed=self.seed, kernel=self.kernel,
                          record_every=self.n_steps, batch_size=self.batch_size)


@dataclass
class Quantity:
    mc: float
    stderr: float
    oracles: dict = field(default_factory=dict)


@dataclass
class ThermoReport:
    temperature: float
    beta: float
    n_oscillators: int
    quantities: dict

    def __getitem__(self, name) -> Quantity:
        return self.quantities[name]

    def rows(self):
        for name in QUANTITIES:
            q = self.quantities[name]
            for oname, oval in q.oracles.items():
                yield [self.temperature, self.beta, name, q.mc, q.stderr, oval, oname]

    def to_csv(self, path):
        write_rows(path, self.rows())


def write_rows(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _cell(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return v


# --------------------------------------------------------------------------
# closed forms


def cameron_martin(beta: float, omega: float = 1.0):
    """Closed forms for Brownian paths from the origin: (Z, U, C).

    Z = 1/sqrt(cosh(w beta)), U = w tanh(w beta)/2, C = (w beta)^2 / (2 cosh^2(w beta)).
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    t = omega * beta
    ch = math.cosh(t)
    return 1.0 / math.sqrt(ch), 0.5 * omega * math.tanh(t), 0.5 * t * t / (ch * ch)


def gaussian_moment_oracle(beta: float, omega: float = 1.0):
    """(U, C) of the endpoint estimators: X(beta) ~ N(0, tanh(w beta)/w) under the weight."""
    th = math.tanh(omega * beta)
    return 0.5 * omega * th, 0.5 * beta**2 * omega**2 * th * th


def free_energy(Z, beta: float):
    """F = -ln(Z)/beta; ``Z`` may be a bare value or ``(value, stderr)``."""
    z, dz = (Z if isinstance(Z, tuple) else (Z, 0.0))
    if not z > 0:
        raise NonpositiveZ(f"partition function must be positive, got {z}")
    return -math.log(z) / beta, dz / (beta * z)


def spectral_oracle(T: float, n_levels: int = 20000, omega: float = 1.0):
    """Level sums over e_n = w (n + 1/2): returns (Z, U, C, F)."""
    if not T > 0:
        raise ValueError("temperature must be positive")
    beta = 1.0 / T
    n = np.arange(n_levels)
    eps = omega * (n + 0.5)
    # subtract the ground energy to keep the exponentials in range
    boltz = np.exp(-beta * (eps - eps[0]))
    zs = boltz.sum()
    if boltz[-1] / zs > 1e-12:
        raise TruncationInsufficient(f"{n_levels} levels do not converge at T={T}")
    Z = zs * math.exp(-beta * eps[0])
    p = boltz / zs
    U = float(np.sum(p * eps))
    C = float(beta**2 * (np.sum(p * eps**2) - U**2))
    F = -T * (math.log(zs) - beta * eps[0])
    return float(Z), U, C, F


def transfer_matrix_oracle(beta: float, h: float, omega: float = 1.0, **kw):
    """(Z, U, C) of the discretised estimator, from grid propagation."""
    m = transfer_matrix_moments(beta, h, omega, **kw)
    w2 = omega**2
    U = 0.5 * w2 * m["m2"]
    var_v = 0.25 * w2 * w2 * (m["m4"] - m["m2"] ** 2)
    return m["Z"], U, beta**2 * var_v


# --------------------------------------------------------------------------
# Monte Carlo


@lru_cache(maxsize=16)
def _samples(params: ThermoParams, workers: int = 1):
    """Per oscillator: (log weights, endpoint positions), both shape (n_paths,)."""
    pp = params.path_params()
    out = []
    for i, w in enumerate(params.frequencies):
        pot = HarmonicPotential([w])
        trial = GaussianTrial([w]) if params.importance else FreeTrial(1, 1)
        ens = run_ensemble(trial, pot, pp, [], start=np.zeros(1),
                           record_steps=[pp.n_steps], workers=workers,
                           keep_configs=True, group=i)
        lw = ens.log_weights[:, -1].copy()
        x = ens.configs[:, -1, 0].copy()
        if params.importance:
            # Girsanov factor: phi(0)/phi(Y) exp(-e0 beta) turns the drifted
            # measure back into the Wiener measure
            lw = lw + 0.5 * w * x * x - trial.e0 * params.beta
        out.append((lw, x))
    return tuple(out)


def _per_oscillator(params, workers=1):
    """Per oscillator (Z, dZ, U, dU, C, dC)."""
    res = []
    beta = params.beta
    for (lw, x), w in zip(_samples(params, workers), params.frequencies):
        wt = np.exp(lw)
        n = wt.size
        z = float(np.mean(wt))
        dz = float(np.std(wt, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        v = 0.5 * w * w * x * x
        blocks = block_sums(np.stack([wt, wt * v, wt * v * v], axis=1), params.n_blocks)
        u, du = jackknife_ratio(blocks[:, 1], blocks[:, 0])

        def heat(m):
            mu = m[..., 1] / m[..., 0]
            return beta**2 * (m[..., 2] / m[..., 0] - mu * mu)

        counts = [len(b) for b in np.array_split(np.arange(n), blocks.shape[0])]
        c, dc = jackknife_function(blocks, counts, heat)
        res.append((z, dz, float(u), float(du), float(c), float(dc)))
    return res


def partition_function_mc(params: ThermoParams, workers: int = 1):
    """Product over oscillators of E[exp(-int V ds)]; returns (value, stderr)."""
    parts = _per_oscillator(params, workers)
    z = math.prod(p[0] for p in parts)
    rel = math.sqrt(sum((p[1] / p[0]) ** 2 for p in parts))
    return z, z * rel


def density_mc(params: ThermoParams, workers: int = 1):
    z, dz = partition_function_mc(params, workers)
    return z * z, 2.0 * z * dz


def internal_energy_mc(params: ThermoParams, workers: int = 1):
    parts = _per_oscillator(params, workers)
    return sum(p[2] for p in parts), math.sqrt(sum(p[3] ** 2 for p in parts))


def specific_heat_mc(params: ThermoParams, workers: int = 1):
    parts = _per_oscillator(params, workers)
    return sum(p[4] for p in parts), math.sqrt(sum(p[5] ** 2 for p in parts))


def thermo_report(params: ThermoParams, workers: int = 1, transfer_matrix: bool = True) -> ThermoReport:
    beta, T = params.beta, params.temperature
    z, dz = partition_function_mc(params, workers)
    u, du = internal_energy_mc(params, workers)
    c, dc = specific_heat_mc(params, workers)
    f, df = free_energy((z, dz), beta)

    cm = [cameron_martin(beta, w) for w in params.frequencies]
    gm = [gaussian_moment_oracle(beta, w) for w in params.frequencies]
    sp = [spectral_oracle(T, omega=w) for w in params.frequencies]
    z_cm = math.prod(o[0] for o in cm)
    z_sp = math.prod(o[0] for o in sp)
    q = {
        "Z": Quantity(z, dz, {"cameron_martin": z_cm, "spectral": z_sp}),
        "rho": Quantity(z * z, 2 * z * dz, {"cameron_martin": z_cm**2, "spectral": z_sp**2}),
        "F": Quantity(f, df, {"cameron_martin": -math.log(z_cm) / beta,
                              "spectral": sum(o[3] for o in sp)}),
        "U": Quantity(u, du, {"gaussian_moment": sum(o[0] for o in gm),
                              "cameron_martin": sum(o[1] for o in cm),
                              "spectral": sum(o[1] for o in sp)}),
        "C": Quantity(c, dc, {"gaussian_moment": sum(o[1] for o in gm),
                              "cameron_martin": sum(o[2] for o in cm),
                              "spectral": sum(o[2] for o in sp)}),
    }
    if transfer_matrix and params.kernel == GAUSSIAN:
        tm = [transfer_matrix_oracle(beta, params.effective_stepsize, w) for w in params.frequencies]
        z_tm = math.prod(o[0] for o in tm)
        q["Z"].oracles["transfer_matrix"] = z_tm
        q["rho"].oracles["transfer_matrix"] = z_tm**2
        q["F"].oracles["transfer_matrix"] = -math.log(z_tm) / beta
        q["U"].oracles["transfer_matrix"] = sum(o[1] for o in tm)
        q["C"].oracles["transfer_matrix"] = sum(o[2] for o in tm)
    return ThermoReport(T, beta, params.n_oscillators, q)


@dataclass
class SweepRow:
    temperature: float
    beta: float
    u: float
    stderr: float
    oracle: float


def temperature_sweep(temps, n_oscillators: int, params: ThermoParams | None = None,
                      workers: int = 1):
    """Internal energy of ``n_oscillators`` at each temperature.

    ``params`` supplies everything except the temperature and oscillator
    count.  The oracle column is the endpoint-estimator value sum_i w_i tanh(w_i/T)/2.
    """
    base = params or ThermoParams(temperature=1.0)
    rows = []
    for T in temps:
        freqs = base.frequencies if len(base.frequencies) == n_oscillators else ()
        p = ThermoParams(temperature=float(T), n_oscillators=n_oscillators, frequencies=freqs,
                         stepsize=base.stepsize, n_paths=base.n_paths, seed=base.seed,
                         kernel=base.kernel, importance=base.importance,
                         n_blocks=base.n_blocks, batch_size=base.batch_size)
        u, du = internal_energy_mc(p, workers)
        oracle = sum(gaussian_moment_oracle(p.beta, w)[0] for w in p.frequencies)
        rows.append(SweepRow(float(T), p.beta, u, du, oracle))
    return rows


def sweep_rows(rows, references=None):
    """Rows in the sweep CSV schema; ``references`` maps temperature -> cited U."""
    for r in rows:
        yield [r.temperature, r.beta, "U", r.u, r.stderr, r.oracle, "gaussian_moment"]
        if references and r.temperature in references:
            yield [r.temperature, r.beta, "U", r.u, r.stderr, float(references[r.temperature]),
                   "reference"]


def trace_fluctuations(temperature: float, stepsize: float = 1.0 / 30.0, seed: int = 0,
                       kernel: str = GAUSSIAN, omega: float = 1.0, path_index: int = 0):
    """Positions x(s) of one Brownian path at every step over s in (0, 1/T].

    Returns ``(times, x, log_weight)`` arrays with one row per step.
    """
    p = ThermoParams(temperature=temperature, stepsize=stepsize, n_paths=path_index + 1,
                     seed=seed, kernel=kernel, frequencies=(omega,))
    pp = p.path_params()
    steps = np.arange(1, pp.n_steps + 1)
    ens = run_ensemble(FreeTrial(1, 1), HarmonicPotential([omega]), pp, [], start=np.zeros(1),
                       record_steps=steps, keep_configs=True)
    return (steps * pp.stepsize, ens.configs[path_index, :, 0].copy(),
            ens.log_weights[path_index].copy())


def endpoint_density(params: ThermoParams, bins: int = 60, x_max: float | None = None):
    """Weighted histogram of X(beta) for the first oscillator, with the Gaussian
    endpoint law N(0, tanh(w beta)/w) alongside.  Returns (centres, mc, oracle)."""
    lw, x = _samples(params)[0]
    w = params.frequencies[0]
    var = math.tanh(w * params.beta) / w
    if x_max is None:
        x_max = 4.0 * math.sqrt(var)
    hist, edges = np.histogram(x, bins=bins, range=(-x_max, x_max), weights=np.exp(lw),
                               density=False)
    width = edges[1] - edges[0]
    total = np.sum(np.exp(lw))
    mc = hist / (total * width)
    centres = 0.5 * (edges[:-1] + edges[1:])
    oracle = np.exp(-centres**2 / (2 * var)) / math.sqrt(2 * math.pi * var)
    return centres, mc, oracle

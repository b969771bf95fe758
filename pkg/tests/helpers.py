"""Independent reference samplers used only by the tests."""
import numpy as np


def metropolis_samples(trial, n_samples, step=0.5, burn=2000, thin=5, seed=0, start=None,
                       n_walkers=64):
    """Plain Metropolis sampling of |phi_0|^2 (no drift, no weights).

    Runs ``n_walkers`` independent chains vectorised; returns an array of
    shape ``(n_samples, n_coords)``.
    """
    rng = np.random.default_rng(seed)
    n = trial.n_coords
    x = np.tile(trial.default_start() if start is None else start, (n_walkers, 1))
    x = x + 0.1 * rng.standard_normal(x.shape)
    logp = 2.0 * np.log(np.abs(trial.evaluate(x).value) + 1e-300)
    out = []
    needed = -(-n_samples // n_walkers)
    it = 0
    while len(out) < needed:
        y = x + step * rng.standard_normal(x.shape)
        ly = 2.0 * np.log(np.abs(trial.evaluate(y).value) + 1e-300)
        acc = np.log(rng.random(n_walkers)) < ly - logp
        x[acc], logp[acc] = y[acc], ly[acc]
        it += 1
        if it > burn and it % thin == 0:
            out.append(x.copy())
    return np.concatenate(out)[:n_samples]


def local_energy(trial, potential, x):
    ev = trial.evaluate(x)
    v, _ = potential.evaluate(x)
    return v - 0.5 * ev.lap_ratio


def blocked_mean(values, n_blocks=50):
    """Mean and block-based standard error (blocks absorb autocorrelation)."""
    blocks = np.array([b.mean() for b in np.array_split(np.asarray(values), n_blocks)])
    return float(np.mean(values)), float(blocks.std(ddof=1) / np.sqrt(n_blocks))

"""Pure-numpy reference implementation of the harmonic path kernel.

The floating-point operations and their order mirror ``_ckernels.pyx``
exactly, so both backends produce bit-identical output.  Loops run over
steps and coordinates; the path axis is vectorised.
"""
import numpy as np


def harmonic_paths(x0, noise, h, neg_a, c2, c0, n_burn, record_steps, cap, dim):
    """Propagate drifted paths for a separable quadratic trial/potential pair.

    Parameters
    ----------
    x0 : (B, n) start configurations
    noise : (B, T, n) Brownian increments, T = n_burn + n_steps
    h : step size
    neg_a : (n,) minus the Gaussian trial frequencies (drift = neg_a * x)
    c2, c0 : perturbed potential V_p(x) = c0 + sum_i c2_i x_i^2
    n_burn : leading steps that move the walker without accruing weight
    record_steps : increasing step numbers (1-based, counted after burn-in)
    cap : per-particle bound on |drift| * h
    dim : coordinates per particle

    Returns
    -------
    log_w : (B, R) log weight at every recorded step
    x_rec : (B, R, n) configuration at every recorded step
    flags : (B,) int8, 1 where the drift cap was exceeded
    """
    x = np.array(x0, dtype=np.float64, copy=True)
    B, n = x.shape
    total = noise.shape[1]
    n_rec = len(record_steps)
    log_w = np.zeros((B, n_rec))
    x_rec = np.zeros((B, n_rec, n))
    flags = np.zeros(B, dtype=np.int8)
    lw = np.zeros(B)
    hh = 0.5 * h

    vp_x = np.full(B, c0)
    for i in range(n):
        vp_x = vp_x + c2[i] * x[:, i] * x[:, i]

    r = 0
    for k in range(total):
        y = np.empty_like(x)
        for i in range(n):
            y[:, i] = x[:, i] + (neg_a[i] * x[:, i]) * h + noise[:, k, i]
        for p in range(n // dim):
            s = np.zeros(B)
            for j in range(p * dim, (p + 1) * dim):
                dr = neg_a[j] * y[:, j]
                s = s + dr * dr
            flags[np.sqrt(s) * h > cap] = 1
        vp_y = np.full(B, c0)
        for i in range(n):
            vp_y = vp_y + c2[i] * y[:, i] * y[:, i]
        if k >= n_burn:
            lw = lw - hh * (vp_x + vp_y)
            if r < n_rec and k - n_burn + 1 == record_steps[r]:
                log_w[:, r] = lw
                x_rec[:, r, :] = y
                r += 1
        x = y
        vp_x = vp_y
    return log_w, x_rec, flags

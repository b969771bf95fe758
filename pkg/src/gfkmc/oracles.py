"""Deterministic reference calculations on a spatial grid.

These never touch the Monte Carlo engine; tests and reports use them as
independent ground truth.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import eigh_tridiagonal


def ground_state_1d(potential, x_max: float = 10.0, n: int = 4001):
    """Lowest eigenpair of -1/2 d^2/dx^2 + V(x) by second-order finite differences.

    Returns ``(energy, x, psi)`` with ``psi`` normalised so sum(psi^2) dx = 1.
    """
    x = np.linspace(-x_max, x_max, n)
    dx = x[1] - x[0]
    diag = 1.0 / dx**2 + potential(x)
    off = np.full(n - 1, -0.5 / dx**2)
    w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
    psi = v[:, 0] / np.sqrt(np.sum(v[:, 0] ** 2) * dx)
    return float(w[0]), x, psi


def ground_state_moment(potential, f, **kw) -> float:
    """<psi_0| f(x) |psi_0> on the grid."""
    _, x, psi = ground_state_1d(potential, **kw)
    dx = x[1] - x[0]
    return float(np.sum(psi**2 * f(x)) * dx)


def discrete_gfk_energy(omega_trial: float, e0: float, h: float, omega: float = 1.0,
                        x_max: float = 8.0, n: int = 1601) -> float:
    """Exact large-t energy of the *discretised* drifted scheme for a Gaussian trial.

    The Euler-Maruyama transition density times the trapezoidal weight is
    assembled as a matrix; its dominant eigenvalue L gives E = e0 - ln(L)/h.
    This isolates the O(h) bias of the step rule from statistical noise.
    """
    x = np.linspace(-x_max, x_max, n)
    dx = x[1] - x[0]
    a = omega_trial
    vp = 0.5 * omega**2 * x**2 - e0 - 0.5 * (a * a * x * x - a)
    mean = x - a * x * h
    K = np.exp(-((x[None, :] - mean[:, None]) ** 2) / (2 * h)) / np.sqrt(2 * np.pi * h) * dx
    K *= np.exp(-0.5 * h * (vp[:, None] + vp[None, :]))
    lam = np.max(np.abs(np.linalg.eigvals(K)))
    return float(e0 - np.log(lam) / h)


def discrete_gfk_energy_at(omega_trial: float, e0: float, h: float, t: float,
                           omega: float = 1.0, start: float = 0.0,
                           x_max: float = 8.0, n: int = 1601) -> float:
    """Exact finite-time energy E(t) of the discretised drifted scheme.

    Same kernel as ``discrete_gfk_energy`` but propagated ``t/h`` steps from
    a point start, so the start-up transient is included.
    """
    steps = int(round(t / h))
    if steps < 1 or abs(t / h - steps) > 1e-9:
        raise ValueError("t must be a positive multiple of h")
    x = np.linspace(-x_max, x_max, n)
    dx = x[1] - x[0]
    a = omega_trial

    def vp(y):
        return 0.5 * omega**2 * y**2 - e0 - 0.5 * (a * a * y * y - a)

    def gauss(y, m):
        return np.exp(-((y - m) ** 2) / (2 * h)) / np.sqrt(2 * np.pi * h)

    K = gauss(x[None, :], (x - a * x * h)[:, None]) * dx
    K *= np.exp(-0.5 * h * (vp(x)[:, None] + vp(x)[None, :]))
    dens = gauss(x, start - a * start * h) * np.exp(-0.5 * h * (vp(start) + vp(x)))
    log_scale = 0.0
    for _ in range(steps - 1):
        dens = dens @ K
        m = dens.max()
        dens /= m
        log_scale += np.log(m)
    return float(e0 - (log_scale + np.log(np.sum(dens) * dx)) / t)


def transfer_matrix_moments(beta: float, h: float, omega: float = 1.0, x_max: float | None = None,
                            n: int = 2001, start: float = 0.0):
    """Exact moments of the discretised weighted Brownian path from ``start``.

    Propagates the density of X(beta) under Gaussian increments of variance
    h with the trapezoidal weight exp(-h (V(x_k) + V(x_{k+1})) / 2),
    V = omega^2 x^2 / 2.  Returns a dict with ``Z`` = E[w] and the weighted
    endpoint moments ``m2`` = <x^2>, ``m4`` = <x^4>, plus the grid density.
    """
    steps = int(round(beta / h))
    if steps < 1 or abs(beta / h - steps) > 1e-9:
        raise ValueError("beta must be a positive multiple of h")
    if x_max is None:
        x_max = 10.0 + 6.0 * np.sqrt(min(beta, 4.0))
    x = np.linspace(-x_max, x_max, n)
    dx = x[1] - x[0]
    v = 0.5 * omega**2 * x**2
    v0 = 0.5 * omega**2 * start**2
    g = np.exp(-((x - start) ** 2) / (2 * h)) / np.sqrt(2 * np.pi * h)
    dens = g * np.exp(-0.5 * h * (v0 + v))          # density after the first step
    K = np.exp(-((x[None, :] - x[:, None]) ** 2) / (2 * h)) / np.sqrt(2 * np.pi * h) * dx
    half = np.exp(-0.5 * h * v)
    for _ in range(steps - 1):
        dens = half * (K.T @ (half * dens))
    Z = np.sum(dens) * dx
    p = dens / (Z / dx) if Z > 0 else dens
    m2 = float(np.sum(p * x**2))
    m4 = float(np.sum(p * x**4))
    return {"Z": float(Z), "m2": m2, "m4": m4, "x": x, "density": dens / Z}

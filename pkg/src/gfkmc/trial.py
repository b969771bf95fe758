"""Trial functions, physical potentials and the perturbed potential.

All evaluators are vectorised: they accept a single configuration of shape
``(n_coords,)`` or a batch ``(..., n_coords)`` with coordinates stored
particle-major (x1, y1, z1, x2, ...).  ``evaluate`` never raises; it returns a
validity mask instead, so a path engine can resample bad proposals.  The
scalar convenience methods (``value``, ``drift``, ``lap_ratio``) raise the
matching exception for invalid input.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    CoalescencePoint,
    ConfigInvalid,
    EvaluationAtNucleus,
    NodalRegion,
    SpecShapeMismatch,
    TrialFileMissing,
)

R_MIN = 1e-10
NODAL_RATIO = 1e-30


class TrialEval(NamedTuple):
    value: np.ndarray      # phi_0, possibly rescaled by a positive per-row factor
    drift: np.ndarray      # grad(phi_0)/phi_0
    lap_ratio: np.ndarray  # laplacian(phi_0)/phi_0
    ok: np.ndarray         # False at nodes / singular points


def _as_batch(x):
    x = np.asarray(x)
    if not np.issubdtype(x.dtype, np.floating):
        x = x.astype(float)
    return x


class TrialFunction:
    """Base class.  Subclasses implement ``evaluate`` and set ``n_particles``,
    ``dim`` and ``e0`` (reference energy, hartree)."""

    n_particles: int
    dim: int
    e0: float
    signed = False  # True when phi_0 has nodes

    @property
    def n_coords(self) -> int:
        return self.n_particles * self.dim

    def evaluate(self, x) -> TrialEval:
        raise NotImplementedError

    def default_start(self) -> np.ndarray:
        return np.zeros(self.n_coords)

    def _checked(self, x):
        ev = self.evaluate(x)
        if not np.all(ev.ok):
            self._raise_invalid(x)
        return ev

    def _raise_invalid(self, x):
        raise NodalRegion(f"{type(self).__name__} is singular or nodal at the given configuration")

    def value(self, x):
        return self._checked(x).value

    def drift(self, x):
        return self._checked(x).drift

    def lap_ratio(self, x):
        return self._checked(x).lap_ratio


class FreeTrial(TrialFunction):
    """phi_0 = 1: no drift, plain Brownian motion."""

    def __init__(self, n_particles: int = 1, dim: int = 1, e0: float = 0.0):
        self.n_particles, self.dim, self.e0 = int(n_particles), int(dim), float(e0)

    def evaluate(self, x):
        x = _as_batch(x)
        shape = x.shape[:-1]
        return TrialEval(np.ones(shape, x.dtype), np.zeros_like(x),
                         np.zeros(shape, x.dtype), np.ones(shape, bool))


class GaussianTrial(TrialFunction):
    """phi_0 = prod_i exp(-w_i x_i^2 / 2) for one-dimensional oscillators."""

    def __init__(self, omegas, e0: float | None = None):
        self.omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
        if np.any(self.omegas <= 0):
            raise ValueError("oscillator frequencies must be positive")
        self.n_particles = self.omegas.size
        self.dim = 1
        self.e0 = float(0.5 * self.omegas.sum()) if e0 is None else float(e0)

    def __repr__(self):
        return f"GaussianTrial(omegas={self.omegas.tolist()}, e0={self.e0})"

    def evaluate(self, x):
        x = _as_batch(x)
        w = self.omegas.astype(x.dtype)
        wx = w * x
        value = np.exp(-0.5 * np.sum(wx * x, axis=-1))
        lap = np.sum(wx * wx - w, axis=-1)
        return TrialEval(value, -wx, lap, np.ones(value.shape, bool))


def gaussian_trial(omega: float, n_osc: int = 1, e0: float | None = None) -> GaussianTrial:
    if n_osc < 1:
        raise ValueError("n_osc must be >= 1")
    return GaussianTrial(np.full(int(n_osc), float(omega)), e0=e0)


class HydrogenicTrial(TrialFunction):
    """phi_0 = exp(-z r) for one electron around a fixed nucleus."""

    def __init__(self, z: float, e0: float | None = None, r_min: float = R_MIN):
        if z <= 0:
            raise ValueError("nuclear charge must be positive")
        self.z = float(z)
        self.n_particles, self.dim = 1, 3
        self.e0 = -0.5 * self.z**2 if e0 is None else float(e0)
        self.r_min = r_min

    def evaluate(self, x):
        x = _as_batch(x)
        r = np.sqrt(x[..., 0] ** 2 + x[..., 1] ** 2 + x[..., 2] ** 2)
        ok = r >= self.r_min
        rs = np.where(ok, r, 1.0)
        drift = -self.z * x / rs[..., None]
        lap = self.z**2 - 2.0 * self.z / rs
        return TrialEval(np.exp(-self.z * r), drift, lap, ok)

    def default_start(self):
        return np.array([1.0 / self.z, 0.0, 0.0])

    def _raise_invalid(self, x):
        raise EvaluationAtNucleus("electron within r_min of the nucleus")


def hydrogenic_trial(z: float) -> HydrogenicTrial:
    return HydrogenicTrial(z)


# --------------------------------------------------------------------------
# potentials


class Potential:
    n_coords: int

    def evaluate(self, x):
        """Return ``(v, ok)``; rows with ``ok`` False hold arbitrary finite values."""
        raise NotImplementedError

    def __call__(self, x):
        v, ok = self.evaluate(x)
        if not np.all(ok):
            self._raise_invalid()
        return v

    def _raise_invalid(self):
        raise ArithmeticError("potential is singular at the given configuration")


class HarmonicPotential(Potential):
    """V = sum_i w_i^2 x_i^2 / 2."""

    def __init__(self, omegas):
        self.omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
        self.n_coords = self.omegas.size

    def __repr__(self):
        return f"HarmonicPotential(omegas={self.omegas.tolist()})"

    def evaluate(self, x):
        x = _as_batch(x)
        v = 0.5 * np.sum((self.omegas**2) * x * x, axis=-1)
        return v, np.ones(v.shape, bool)


class CoulombPotential(Potential):
    """V = -sum_i z/r_i + sum_{i<j} 1/r_ij, nucleus fixed at the origin."""

    def __init__(self, z: float, n_electrons: int, r_min: float = R_MIN):
        self.z, self.n_electrons, self.r_min = float(z), int(n_electrons), r_min
        self.n_coords = 3 * self.n_electrons

    def __repr__(self):
        return f"CoulombPotential(z={self.z}, n_electrons={self.n_electrons})"

    def _distances(self, x):
        x = _as_batch(x)
        e = x.reshape(x.shape[:-1] + (self.n_electrons, 3))
        ri = np.sqrt(e[..., 0] ** 2 + e[..., 1] ** 2 + e[..., 2] ** 2)
        rij = [np.sqrt(np.sum((e[..., i, :] - e[..., j, :]) ** 2, axis=-1))
               for i, j in itertools.combinations(range(self.n_electrons), 2)]
        return ri, rij

    def evaluate(self, x):
        ri, rij = self._distances(x)
        ok = np.all(ri >= self.r_min, axis=-1)
        v = -self.z * np.sum(1.0 / np.where(ri >= self.r_min, ri, 1.0), axis=-1)
        for r in rij:
            good = r >= self.r_min
            ok &= good
            v = v + 1.0 / np.where(good, r, 1.0)
        return v, ok

    def __call__(self, x):
        ri, rij = self._distances(x)
        if np.any(ri < self.r_min):
            raise EvaluationAtNucleus("electron within r_min of the nucleus")
        if any(np.any(r < self.r_min) for r in rij):
            raise CoalescencePoint("two electrons within r_min of each other")
        return self.evaluate(x)[0]


def coulomb_potential(z: float, n_electrons: int) -> CoulombPotential:
    return CoulombPotential(z, n_electrons)


@dataclass(frozen=True)
class PerturbedPotential:
    """V_p = V - e0 - lap_ratio/2; zero everywhere when the trial is exact."""

    trial: TrialFunction
    potential: Potential

    def v(self, x):
        return self.potential(x)

    def v_p(self, x):
        ev = self.trial._checked(x)
        return self.potential(x) - self.trial.e0 - 0.5 * ev.lap_ratio

    def evaluate(self, x):
        """Vectorised ``(trial_eval, v_p, ok)`` used by the path engine."""
        ev = self.trial.evaluate(x)
        v, ok = self.potential.evaluate(x)
        vp = v - self.trial.e0 - 0.5 * ev.lap_ratio
        return ev, vp, ok & ev.ok


# --------------------------------------------------------------------------
# Hylleraas-exponential trial functions


@dataclass(frozen=True)
class HylleraasSpec:
    """Parameters of the explicitly correlated 3- or 4-electron trial function.

    ``exponents`` holds one orbital exponent per electron (alpha, beta, gamma
    [, delta]).  ``terms`` is a list of ``(coefficient, powers)`` where powers
    index the variables (q1, q2, q3, q12, q13, q23) for three electrons or
    (q1, q2, q3, q4, q12, q13, q14, q23, q24, q34) for four.  ``spin_pattern``
    gives one label per electron; the antisymmetriser permutes electrons that
    share a label.
    """

    z: float
    exponents: tuple
    b: float
    c: float
    terms: tuple
    e0: float
    d: float = 0.0
    spin_pattern: str = ""
    name: str = ""

    def __post_init__(self):
        n = len(self.exponents)
        if n not in (3, 4):
            raise SpecShapeMismatch(f"Hylleraas trial supports 3 or 4 electrons, got {n}")
        if not self.terms:
            raise ConfigInvalid("Hylleraas spec needs at least one term")
        if self.b <= 0:
            raise ConfigInvalid("b must be positive")
        if any(a <= 0 for a in self.exponents):
            raise ConfigInvalid("orbital exponents must be positive")
        n_vars = n + n * (n - 1) // 2
        for coeff, powers in self.terms:
            if len(powers) != n_vars:
                raise SpecShapeMismatch(
                    f"term has {len(powers)} powers but {n} electrons need {n_vars}")
            if any(int(p) != p or p < 0 for p in powers):
                raise ConfigInvalid("term powers must be non-negative integers")
        pattern = self.spin_pattern or default_spin_pattern(n)
        if len(pattern) != n:
            raise SpecShapeMismatch(f"spin pattern {pattern!r} does not cover {n} electrons")
        object.__setattr__(self, "spin_pattern", pattern)

    @property
    def n_electrons(self) -> int:
        return len(self.exponents)


def default_spin_pattern(n_electrons: int) -> str:
    # electrons 1 and 3 carry the same spin: 1s up, 1s down, 2s up (, 2s down)
    return {3: "udu", 4: "udud"}[n_electrons]


def q_transform(r, b):
    """Bounded Hylleraas variable q = r / (1 + b r)."""
    return r / (1.0 + b * r)


def _same_label_permutations(pattern: str):
    """All permutations that only exchange electrons with equal labels, with parity."""
    n = len(pattern)
    groups = {}
    for i, lab in enumerate(pattern):
        groups.setdefault(lab, []).append(i)
    perms = []
    for choice in itertools.product(*(itertools.permutations(g) for g in groups.values())):
        perm = list(range(n))
        for g, pg in zip(groups.values(), choice):
            for src, dst in zip(g, pg):
                perm[src] = dst
        perms.append((np.array(perm), _parity(perm)))
    return perms


def _parity(perm) -> int:
    perm, sign = list(perm), 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def _excluding_products(q):
    """prod over the last axis excluding each entry in turn (no division)."""
    ones = np.ones_like(q[..., :1])
    prefix = np.cumprod(np.concatenate([ones, q[..., :-1]], axis=-1), axis=-1)
    suffix = np.cumprod(np.concatenate([ones, q[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    return prefix * suffix


class HylleraasTrial(TrialFunction):
    """Antisymmetrised Hylleraas-exponential trial (lithium / beryllium forms).

    Three electrons:  (r3 - c) exp(hyll - a1 r1 - a2 r2 - a3 r3)
    Four electrons:  ((r3 - d)(r4 - d) + c r3.r4) exp(hyll - sum a_i r_i)
    with hyll = sum_k a_k prod_m q_m^p_km.

    Derivatives are analytic (chain rule through the interparticle
    distances); ``derivatives="fd"`` switches to central differences.
    """

    signed = True

    def __init__(self, spec: HylleraasSpec, derivatives: str = "analytic",
                 r_min: float = R_MIN, fd_step: float = 1e-5):
        if derivatives not in ("analytic", "fd"):
            raise ValueError("derivatives must be 'analytic' or 'fd'")
        self.spec = spec
        self.n_particles = spec.n_electrons
        self.dim = 3
        self.e0 = float(spec.e0)
        self.derivatives = derivatives
        self.r_min = r_min
        self.fd_step = fd_step
        n = self.n_particles
        self._pairs = list(itertools.combinations(range(n), 2))
        self._coeffs = np.array([t[0] for t in spec.terms], dtype=float)
        self._powers = np.array([t[1] for t in spec.terms], dtype=np.int64)
        self._alpha = np.array(spec.exponents, dtype=float)
        self._perms = _same_label_permutations(spec.spin_pattern)

    def __repr__(self):
        return f"HylleraasTrial({self.spec.name or 'unnamed'}, {len(self.spec.terms)} terms)"

    def default_start(self):
        # electrons on distinct axes at increasing radii, away from nodes and each other
        dirs = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [-0.6, -0.6, 0.53]], dtype=float)
        radii = np.array([0.5, 0.7, 3.0, 2.5]) * 3.0 / self.spec.z
        pos = dirs[: self.n_particles] * radii[: self.n_particles, None]
        return pos.reshape(-1)

    def _raise_invalid(self, x):
        raise NodalRegion("configuration is nodal or too close to a Coulomb centre")

    # -- geometry -------------------------------------------------------

    def _geometry(self, e):
        """Distances s (B,S), Jacobian ds/dx (B,S,N,3), Laplacians of s (B,S)."""
        n = self.n_particles
        ri = np.sqrt(e[..., 0] ** 2 + e[..., 1] ** 2 + e[..., 2] ** 2)
        shape = e.shape[:-2]
        n_s = n + len(self._pairs)
        s = np.empty(shape + (n_s,), e.dtype)
        jac = np.zeros(shape + (n_s, n, 3), e.dtype)
        lap = np.empty(shape + (n_s,), e.dtype)
        s[..., :n] = ri
        safe_ri = np.where(ri > 0, ri, 1.0)
        for i in range(n):
            jac[..., i, i, :] = e[..., i, :] / safe_ri[..., i, None]
            lap[..., i] = 2.0 / safe_ri[..., i]
        for m, (i, j) in enumerate(self._pairs, start=n):
            diff = e[..., i, :] - e[..., j, :]
            r = np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2 + diff[..., 2] ** 2)
            safe = np.where(r > 0, r, 1.0)
            s[..., m] = r
            u = diff / safe[..., None]
            jac[..., m, i, :] = u
            jac[..., m, j, :] = -u
            lap[..., m] = 4.0 / safe
        return s, jac, lap

    def _hyll(self, s, order):
        """hyll and its first (order>=1) and second (order>=2) derivatives in s.

        Each term is a monomial f_k = a_k prod_m q_m^p_km, so derivatives
        follow from logarithmic derivatives g_km = p_km q'_m / q_m.  Distances
        are strictly positive wherever the result is used (coalescences are
        flagged separately).
        """
        b = self.spec.b
        p = self._powers                              # (K,S)
        q = q_transform(s, b)[..., None, :]           # (B,1,S)
        f = self._coeffs * np.prod(q ** p, axis=-1)   # (B,K)
        value = np.sum(f, axis=-1)
        if order == 0:
            return value, None, None
        denom = 1.0 + b * s[..., None, :]
        dq = 1.0 / denom**2
        q_safe = np.where(q > 0, q, 1.0)
        g = p * (dq / q_safe)                         # (B,K,S)
        grad = (f[..., None, :] @ g)[..., 0, :]
        if order == 1:
            return value, grad, None
        d2q = -2.0 * b / denom**3
        curv = p * (d2q / q_safe) - g * g / p.clip(min=1)  # dg/ds per term
        hess = np.swapaxes(g * f[..., None], -1, -2) @ g
        diag = (f[..., None, :] @ curv)[..., 0, :]
        idx = np.arange(s.shape[-1])
        hess[..., idx, idx] += diag
        return value, grad, hess

    def _prefactor(self, e, order):
        """Polynomial prefactor P and (optionally) grad P (B,N,3), lap P."""
        c, d = self.spec.c, self.spec.d
        r3 = np.sqrt(np.sum(e[..., 2, :] ** 2, axis=-1))
        if self.n_particles == 3:
            P = r3 - c
            if order == 0:
                return P, None, None
            grad = np.zeros_like(e)
            safe = np.where(r3 > 0, r3, 1.0)
            grad[..., 2, :] = e[..., 2, :] / safe[..., None]
            return P, grad, 2.0 / safe
        r4 = np.sqrt(np.sum(e[..., 3, :] ** 2, axis=-1))
        dot = np.sum(e[..., 2, :] * e[..., 3, :], axis=-1)
        P = (r3 - d) * (r4 - d) + c * dot
        if order == 0:
            return P, None, None
        s3 = np.where(r3 > 0, r3, 1.0)
        s4 = np.where(r4 > 0, r4, 1.0)
        grad = np.zeros_like(e)
        grad[..., 2, :] = (r4 - d)[..., None] * e[..., 2, :] / s3[..., None] + c * e[..., 3, :]
        grad[..., 3, :] = (r3 - d)[..., None] * e[..., 3, :] / s4[..., None] + c * e[..., 2, :]
        lap = 2.0 * (r4 - d) / s3 + 2.0 * (r3 - d) / s4
        return P, grad, lap

    def _term(self, e, order):
        """One unsymmetrised term: log-scale exponent, prefactor and derivatives."""
        s, jac, lap_s = self._geometry(e) if order else (self._distances_only(e), None, None)
        hyll, h_s, h_ss = self._hyll(s, order if order else 0)
        n = self.n_particles
        expo = hyll - np.sum(self._alpha * s[..., :n], axis=-1)
        P, gP, lP = self._prefactor(e, order)
        if not order:
            return expo, P, None, None
        E_s = h_s.copy()
        E_s[..., :n] -= self._alpha
        J = jac.reshape(jac.shape[:-2] + (-1,))
        gE = (E_s[..., None, :] @ J).reshape(e.shape)
        G = J @ np.swapaxes(J, -1, -2)
        lE = np.sum(E_s * lap_s, axis=-1) + np.sum(h_ss * G, axis=(-2, -1))
        grad = gP + P[..., None, None] * gE
        lap = (lP + 2.0 * np.sum(gP * gE, axis=(-2, -1))
               + P * (lE + np.sum(gE * gE, axis=(-2, -1))))
        return expo, P, grad, lap

    def _distances_only(self, e):
        n = self.n_particles
        s = [np.sqrt(e[..., i, 0] ** 2 + e[..., i, 1] ** 2 + e[..., i, 2] ** 2) for i in range(n)]
        for i, j in self._pairs:
            diff = e[..., i, :] - e[..., j, :]
            s.append(np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2 + diff[..., 2] ** 2))
        return np.stack(s, axis=-1)

    def _singular(self, e):
        s = self._distances_only(e)
        return np.any(s < self.r_min, axis=-1)

    # -- public evaluators --------------------------------------------------

    def log_terms(self, x):
        """Per-permutation (sign, exponent, prefactor) without derivatives."""
        x = _as_batch(x)
        e = x.reshape(x.shape[:-1] + (self.n_particles, 3))
        out = []
        for perm, sign in self._perms:
            expo, P, _, _ = self._term(e[..., perm, :], 0)
            out.append((sign, expo, P))
        return out

    def raw_value(self, x):
        """Unscaled phi_0 (may underflow far from the nucleus)."""
        return sum(sign * P * np.exp(expo) for sign, expo, P in self.log_terms(x))

    def evaluate(self, x):
        x = _as_batch(x)
        if self.derivatives == "fd":
            return self._evaluate_fd(x)
        e = x.reshape(x.shape[:-1] + (self.n_particles, 3))
        terms = []
        for perm, sign in self._perms:
            expo, P, grad, lap = self._term(e[..., perm, :], 2)
            g = np.empty_like(grad)
            g[..., perm, :] = grad
            terms.append((sign, expo, P, g, lap))
        emax = np.max(np.stack([t[1] for t in terms]), axis=0)
        value = np.zeros_like(emax)
        grad = np.zeros_like(e)
        lap = np.zeros_like(emax)
        biggest = np.zeros_like(emax)
        for sign, expo, P, g, l in terms:
            scale = sign * np.exp(expo - emax)
            value = value + scale * P
            grad = grad + scale[..., None, None] * g
            lap = lap + scale * l
            biggest = np.maximum(biggest, np.abs(scale * P))
        ok = (np.abs(value) >= NODAL_RATIO * biggest) & (biggest > 0) & ~self._singular(e)
        safe = np.where(ok, value, 1.0)
        drift = (grad / safe[..., None, None]).reshape(x.shape)
        lap_ratio = lap / safe
        return TrialEval(value * np.exp(emax), drift, lap_ratio, ok)

    def _evaluate_fd(self, x):
        value = self.raw_value(x)
        drift, lap = finite_difference_derivatives(self.raw_value, x, self.fd_step)
        e = x.reshape(x.shape[:-1] + (self.n_particles, 3))
        ok = (value != 0) & ~self._singular(e)
        return TrialEval(value, drift, lap, ok)


def hylleraas_trial(spec: HylleraasSpec, **kwargs) -> HylleraasTrial:
    return HylleraasTrial(spec, **kwargs)


def finite_difference_derivatives(value_fn, x, step=1e-5, dtype=np.longdouble):
    """Central-difference drift and Laplacian ratio of ``value_fn`` at ``x``.

    Evaluated in extended precision by default so the second difference is
    not swamped by cancellation.
    """
    x = np.asarray(x, dtype=dtype)
    f0 = value_fn(x)
    n = x.shape[-1]
    grad = np.zeros(x.shape, dtype)
    lap = np.zeros(x.shape[:-1], dtype)
    h = dtype(step)
    for k in range(n):
        dx = np.zeros(n, dtype)
        dx[k] = h
        fp = value_fn(x + dx)
        fm = value_fn(x - dx)
        grad[..., k] = (fp - fm) / (2 * h)
        lap = lap + (fp - 2 * f0 + fm) / (h * h)
    return (grad / f0[..., None]).astype(float), (lap / f0).astype(float)


# --------------------------------------------------------------------------
# parameter files

_LI_HEADER = 7   # z alpha beta gamma b c e0
_BE_HEADER = 9   # z alpha beta gamma delta b c d e0


def parse_hylleraas(text: str, name: str = "") -> HylleraasSpec:
    """Parse the line-oriented parameter format (see README, "Trial files")."""
    header = None
    terms = []
    spin = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.lower()
            if key == "spin":
                spin = val.replace(" ", "").replace(",", "")
            elif key == "name":
                name = val
            else:
                raise ConfigInvalid(f"line {lineno}: unknown directive {key!r}")
            continue
        fields = line.split()
        try:
            nums = [float(f) for f in fields]
        except ValueError:
            raise ConfigInvalid(f"line {lineno}: non-numeric field in {raw!r}") from None
        if header is None:
            if len(nums) not in (_LI_HEADER, _BE_HEADER):
                raise SpecShapeMismatch(
                    f"line {lineno}: header needs {_LI_HEADER} (3 electrons) or "
                    f"{_BE_HEADER} (4 electrons) numbers, got {len(nums)}")
            header = nums
            continue
        width = 7 if len(header) == _LI_HEADER else 11
        if len(nums) != width:
            raise SpecShapeMismatch(
                f"line {lineno}: term needs {width} numbers (coefficient + powers), got {len(nums)}")
        if any(p != int(p) for p in nums[1:]):
            raise ConfigInvalid(f"line {lineno}: powers must be integers")
        terms.append((nums[0], tuple(int(p) for p in nums[1:])))
    if header is None:
        raise ConfigInvalid("parameter file has no header line")
    if len(header) == _LI_HEADER:
        z, a1, a2, a3, b, c, e0 = header
        return HylleraasSpec(z=z, exponents=(a1, a2, a3), b=b, c=c, e0=e0,
                             terms=tuple(terms), spin_pattern=spin, name=name)
    z, a1, a2, a3, a4, b, c, d, e0 = header
    return HylleraasSpec(z=z, exponents=(a1, a2, a3, a4), b=b, c=c, d=d, e0=e0,
                         terms=tuple(terms), spin_pattern=spin, name=name)


def load_hylleraas(path) -> HylleraasSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise TrialFileMissing(f"trial parameter file not found: {path}") from None
    return parse_hylleraas(text, name=path.stem)


def dump_hylleraas(spec: HylleraasSpec) -> str:
    lines = []
    if spec.name:
        lines.append(f"name = {spec.name}")
    lines.append(f"spin = {spec.spin_pattern}")
    if spec.n_electrons == 3:
        head = [spec.z, *spec.exponents, spec.b, spec.c, spec.e0]
    else:
        head = [spec.z, *spec.exponents, spec.b, spec.c, spec.d, spec.e0]
    lines.append(" ".join(repr(float(v)) for v in head))
    for coeff, powers in spec.terms:
        lines.append(" ".join([repr(float(coeff))] + [str(int(p)) for p in powers]))
    return "\n".join(lines) + "\n"


def demo_spec(kind: str = "li") -> HylleraasSpec:
    """Small shipped demonstration specs (``li`` or ``be``)."""
    from importlib.resources import files

    fname = {"li": "li_demo.txt", "be": "be_demo.txt"}[kind.lower()]
    return parse_hylleraas(files("gfkmc.data").joinpath(fname).read_text(), name=f"{kind}_demo")

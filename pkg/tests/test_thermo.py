import math

import numpy as np
import pytest

from gfkmc.errors import NonpositiveZ, TruncationInsufficient
from gfkmc.thermo import (SWEEP_HEADER, ThermoParams, cameron_martin, density_mc, endpoint_density,
                          free_energy, gaussian_moment_oracle, internal_energy_mc,
                          partition_function_mc, specific_heat_mc, spectral_oracle,
                          temperature_sweep, thermo_report, trace_fluctuations,
                          transfer_matrix_oracle)


def test_cameron_martin_values():
    z, u, c = cameron_martin(0.5)
    assert z == pytest.approx(0.9417106158316757, abs=1e-12)
    assert u == pytest.approx(0.23105857863000487, abs=1e-12)
    assert c == pytest.approx(0.09830596662074094, abs=1e-12)
    assert cameron_martin(0.0) == (1.0, 0.0, 0.0)
    assert cameron_martin(8.0)[1] == pytest.approx(0.49999, abs=1e-5)
    assert cameron_martin(1.0)[0] == pytest.approx(1 / math.sqrt(math.cosh(1.0)), abs=1e-15)


def test_free_energy_examples():
    assert free_energy(0.94166, 0.5)[0] == pytest.approx(0.12021, abs=2e-5)
    assert free_energy(1.0, 3.0)[0] == 0.0
    assert free_energy(0.80522, 1.0)[0] == pytest.approx(0.21664, abs=1e-5)
    f, df = free_energy((0.9, 0.01), 0.5)
    assert df == pytest.approx(0.01 / (0.5 * 0.9))
    with pytest.raises(NonpositiveZ):
        free_energy(0.0, 1.0)


def test_spectral_closed_forms():
    z, u, c, f = spectral_oracle(2.0)
    assert z == pytest.approx(math.exp(-0.25) / (1 - math.exp(-0.5)), rel=1e-12)
    assert u == pytest.approx(0.5 / math.tanh(0.25), rel=1e-12)
    assert c == pytest.approx(0.0625 / math.sinh(0.25) ** 2, rel=1e-10)
    assert f == pytest.approx(-2.0 * math.log(z), rel=1e-12)
    _, u0, c0, _ = spectral_oracle(0.02)
    assert u0 == pytest.approx(0.5, abs=1e-12) and c0 < 1e-12
    with pytest.raises(TruncationInsufficient):
        spectral_oracle(100.0, n_levels=100)


def test_gaussian_moment_oracle():
    u, c = gaussian_moment_oracle(0.5)
    assert u == pytest.approx(0.5 * math.tanh(0.5))
    assert c == pytest.approx(0.5 * 0.25 * math.tanh(0.5) ** 2)
    assert c == pytest.approx(0.0267, abs=1e-4)


def test_transfer_matrix_converges_to_closed_form():
    beta = 0.5
    z_cm, u_cm, _ = cameron_martin(beta)
    _, c_gm = gaussian_moment_oracle(beta)
    gaps = []
    for h in (1 / 10, 1 / 30, 1 / 90):
        z, u, c = transfer_matrix_oracle(beta, h)
        gaps.append(abs(z - z_cm))
        assert abs(u - u_cm) < 2e-3 and abs(c - c_gm) < 2e-3
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-6


@pytest.mark.parametrize("beta", [0.25, 0.5, 1.0])
def test_partition_function_matches_closed_form(beta):
    p = ThermoParams(temperature=1 / beta, n_paths=10_000, seed=31)
    z, dz = partition_function_mc(p)
    assert abs(z - cameron_martin(beta)[0]) < 3 * dz


def test_partition_function_decreases_with_beta():
    vals = [partition_function_mc(ThermoParams(temperature=1 / b, n_paths=4000, seed=3))
            for b in (0.25, 0.5, 1, 2, 4)]
    for (z1, e1), (z2, e2) in zip(vals, vals[1:]):
        assert z1 - z2 > -3 * math.hypot(e1, e2)
    assert all(0 < z <= 1 for z, _ in vals)


def test_density_is_square_of_partition_function():
    p = ThermoParams(temperature=2.0, n_paths=3000, seed=5)
    z, dz = partition_function_mc(p)
    rho, drho = density_mc(p)
    assert rho == z * z and drho == 2 * z * dz


def test_internal_energy_and_heat_vs_grid_oracle():
    p = ThermoParams(temperature=2.0, n_paths=10_000, seed=8)
    _, u_tm, c_tm = transfer_matrix_oracle(0.5, p.effective_stepsize)
    u, du = internal_energy_mc(p)
    c, dc = specific_heat_mc(p)
    assert abs(u - u_tm) < 3 * du
    assert abs(c - c_tm) < 3 * dc


def test_additivity_over_oscillators():
    single = internal_energy_mc(ThermoParams(temperature=2.0, n_paths=4000, seed=6))
    many = internal_energy_mc(ThermoParams(temperature=2.0, n_oscillators=3, n_paths=4000, seed=6))
    # oscillator 0 of the ensemble shares its stream with the single run
    assert abs(many[0] - 3 * single[0]) < 3 * math.hypot(many[1], 3 * single[1])


def test_distinct_frequencies():
    p = ThermoParams(temperature=1.0, n_oscillators=2, frequencies=(1.0, 2.0), n_paths=6000, seed=2)
    u, du = internal_energy_mc(p)
    expected = sum(gaussian_moment_oracle(1.0, w)[0] for w in (1.0, 2.0))
    assert abs(u - expected) < 3 * du


def test_importance_sampling_hook():
    plain = ThermoParams(temperature=0.5, n_paths=4000, seed=4)
    drifted = ThermoParams(temperature=0.5, n_paths=4000, seed=4, importance=True)
    z_cm, u_cm, _ = cameron_martin(2.0)
    z, dz = partition_function_mc(drifted)
    u, du = internal_energy_mc(drifted)
    assert abs(z - z_cm) < 3 * dz and abs(u - u_cm) < 3 * du
    z0, dz0 = partition_function_mc(plain)
    assert abs(z - z0) < 3 * math.hypot(dz, dz0)


def test_effective_step_makes_beta_exact():
    p = ThermoParams(temperature=1.66)
    assert p.n_steps == 18
    assert p.n_steps * p.effective_stepsize == pytest.approx(p.beta, rel=1e-15)


def test_report_layout():
    rep = thermo_report(ThermoParams(temperature=2.0, n_paths=2000, seed=1))
    rows = list(rep.rows())
    assert {r[2] for r in rows} == {"Z", "rho", "F", "U", "C"}
    assert {r[6] for r in rows} >= {"cameron_martin", "spectral", "gaussian_moment",
                                     "transfer_matrix"}
    assert len(SWEEP_HEADER) == len(rows[0])
    assert rep["rho"].mc == rep["Z"].mc ** 2


def test_sweep_rows_track_oracle():
    rows = temperature_sweep([2.5, 1.0], 10, ThermoParams(temperature=1.0, n_paths=3000, seed=9))
    for r in rows:
        assert abs(r.u - r.oracle) < 3 * r.stderr
    single = temperature_sweep([2.0], 1, ThermoParams(temperature=1.0, n_paths=3000, seed=9))[0]
    u, du = internal_energy_mc(ThermoParams(temperature=2.0, n_paths=3000, seed=9))
    assert (single.u, single.stderr) == (u, du)


@pytest.mark.parametrize("T,h,rows", [(0.125, 1 / 30, 240), (1.0, 1 / 30, 30), (2.0, 0.5, 1)])
def test_trace_shapes(T, h, rows):
    times, x, lw = trace_fluctuations(T, stepsize=h, seed=3)
    assert times.shape == x.shape == lw.shape == (rows,)
    assert np.all(np.isfinite(x)) and times[-1] == pytest.approx(1 / T)


def test_endpoint_density_normalised():
    p = ThermoParams(temperature=1.0, n_paths=5000, seed=2)
    xs, mc, oracle = endpoint_density(p, bins=40)
    dx = xs[1] - xs[0]
    assert abs(np.sum(mc) * dx - 1.0) < 0.02
    assert abs(np.sum(oracle) * dx - 1.0) < 0.01

import numpy as np
import pytest

from gfkmc.errors import ConfigInvalid, DriftSingular
from gfkmc.paths import (Configuration, PathParams, brownian_step, drifted_step, run_ensemble,
                         run_path)
from gfkmc.rng import path_stream
from gfkmc.trial import (CoulombPotential, FreeTrial, GaussianTrial, HarmonicPotential,
                         HydrogenicTrial)


def test_configuration_validation():
    with pytest.raises(ConfigInvalid):
        Configuration(np.zeros(5), 3, 2)
    with pytest.raises(ConfigInvalid):
        Configuration(np.array([0.0, np.nan, 0.0]), 3, 1)


def test_pathparams_step_mismatch():
    assert PathParams(stepsize=1 / 30, total_time=80).n_steps == 2400
    with pytest.raises(ConfigInvalid):
        PathParams(stepsize=0.3, total_time=1.0)


def test_brownian_increment_statistics():
    h = 1.0 / 30.0
    c = Configuration(np.zeros(3), 3, 1)
    s = path_stream(11, 0)
    dw = np.array([brownian_step(c, h, s).coords for _ in range(100_000)])
    n = dw.shape[0]
    assert np.all(np.abs(dw.mean(axis=0)) < 4 * np.sqrt(h / n))
    assert np.allclose(dw.var(axis=0), h, rtol=0.05)


def test_brownian_zero_step_and_determinism():
    c = Configuration(np.array([0.3, -0.1, 2.0]), 3, 1)
    assert brownian_step(c, 0.0, path_stream(0, 0)) is c
    a = brownian_step(c, 0.1, path_stream(5, 1))
    b = brownian_step(c, 0.1, path_stream(5, 1))
    assert np.array_equal(a.coords, b.coords)


def test_zero_drift_reduces_to_brownian_step():
    c = Configuration(np.array([0.5, 0.2]), 1, 2)
    a = drifted_step(c, FreeTrial(2, 1), 0.05, path_stream(3, 9))
    b = brownian_step(c, 0.05, path_stream(3, 9))
    assert np.array_equal(a.coords, b.coords)


def test_drifted_step_gaussian_is_euler_update():
    c = Configuration(np.array([0.7]), 1, 1)
    h = 0.02
    y = drifted_step(c, GaussianTrial([1.0]), h, path_stream(2, 0))
    dw = brownian_step(Configuration(np.zeros(1), 1, 1), h, path_stream(2, 0)).coords
    assert np.array_equal(y.coords, 0.7 + (-0.7) * h + dw)


def test_drifted_step_at_nucleus_raises():
    c = Configuration(np.zeros(3), 3, 1)
    with pytest.raises(DriftSingular):
        drifted_step(c, HydrogenicTrial(1.0), 1 / 30, path_stream(0, 0))


def test_gaussian_stationary_second_moment():
    # equilibrate from the origin, then read the slice configurations
    p = PathParams(total_time=6, n_paths=10_000, seed=21, record_every=30)
    ens = run_ensemble(GaussianTrial([1.0]), HarmonicPotential([1.0]), p, [], keep_configs=True)
    x2 = ens.configs[:, -1, 0] ** 2
    err = x2.std(ddof=1) / np.sqrt(x2.size)
    assert abs(x2.mean() - 0.5) < 3 * err


def test_hydrogenic_mean_radius():
    p = PathParams(total_time=20, n_paths=2000, seed=4, record_every=30)
    ens = run_ensemble(HydrogenicTrial(1.0), CoulombPotential(1, 1), p, [], keep_configs=True)
    r = np.linalg.norm(ens.configs[:, -1, :], axis=-1)
    assert abs(r.mean() - 1.5) < 3 * r.std(ddof=1) / np.sqrt(r.size)


@pytest.mark.parametrize("trial,pot", [
    (GaussianTrial([1.0]), HarmonicPotential([1.0])),
    (GaussianTrial([1.0, 2.0, 0.5]), HarmonicPotential([1.0, 2.0, 0.5])),
    (HydrogenicTrial(1.0), CoulombPotential(1, 1)),
    (HydrogenicTrial(2.0), CoulombPotential(2, 1)),
])
def test_exact_trials_have_unit_weights(trial, pot):
    p = PathParams(total_time=80, n_paths=200, seed=8, record_every=600)
    ens = run_ensemble(trial, pot, p, [])
    assert np.max(np.abs(ens.log_weights)) < 1e-9


def test_detuned_trial_accumulates_weight():
    p = PathParams(total_time=4, n_paths=50, seed=1)
    ens = run_ensemble(GaussianTrial([1.2]), HarmonicPotential([1.0]), p, [])
    assert np.all(np.isfinite(ens.log_weights))
    assert np.max(np.abs(ens.log_weights)) > 1e-3


def test_worker_count_does_not_change_results():
    p = PathParams(total_time=2, n_paths=300, seed=77, batch_size=64)
    for trial, pot in ((GaussianTrial([1.2]), HarmonicPotential([1.0])),
                       (HydrogenicTrial(1.0), CoulombPotential(1, 1))):
        a = run_ensemble(trial, pot, p, [], workers=1, keep_configs=True)
        b = run_ensemble(trial, pot, p, [], workers=3, keep_configs=True)
        assert a.log_weights.tobytes() == b.log_weights.tobytes()
        assert a.configs.tobytes() == b.configs.tobytes()


def test_batch_size_does_not_change_results():
    a = run_ensemble(HydrogenicTrial(1.0), CoulombPotential(1, 1),
                     PathParams(total_time=2, n_paths=100, seed=3, batch_size=100), [])
    b = run_ensemble(HydrogenicTrial(1.0), CoulombPotential(1, 1),
                     PathParams(total_time=2, n_paths=100, seed=3, batch_size=7), [])
    assert a.log_weights.tobytes() == b.log_weights.tobytes()


def test_kernel_and_generic_engines_agree():
    p = PathParams(total_time=3, n_paths=64, seed=5)
    t, v = GaussianTrial([1.2]), HarmonicPotential([1.0])
    a = run_ensemble(t, v, p, [], backend="kernel", keep_configs=True)
    b = run_ensemble(t, v, p, [], backend="generic", keep_configs=True)
    assert np.allclose(a.log_weights, b.log_weights, rtol=1e-12, atol=1e-13)
    assert np.allclose(a.configs, b.configs, rtol=1e-12, atol=1e-13)


def test_run_path_matches_ensemble_member():
    p = PathParams(total_time=2, n_paths=4, seed=12)
    t, v = GaussianTrial([1.2]), HarmonicPotential([1.0])
    ens = run_ensemble(t, v, p, [], backend="generic")
    one = run_path(Configuration(np.zeros(1), 1, 1), t, p, rng_stream=path_stream(12, 2),
                   potential=v)
    assert one.log_weights.tobytes() == ens.log_weights[2].tobytes()
    assert one.log_weight == ens.log_weights[2, -1]
    assert len(one.slice_samples) == len(p.default_record_steps())


def test_overflowing_paths_are_excluded():
    p = PathParams(total_time=1, n_paths=10, seed=0)
    ens = run_ensemble(FreeTrial(1, 1), HarmonicPotential([100.0]), p, [], start=np.array([10.0]))
    assert ens.n_excluded == 10


def test_fixed_length_kernel_runs():
    p = PathParams(total_time=5, n_paths=500, seed=2, kernel="fixed_length")
    ens = run_ensemble(HydrogenicTrial(1.0), CoulombPotential(1, 1), p, [])
    assert np.max(np.abs(ens.log_weights)) < 1e-9

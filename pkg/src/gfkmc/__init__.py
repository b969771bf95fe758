"""Generalized Feynman-Kac path-integral Monte Carlo."""
from .errors import GFKError
from .kernels import BACKEND
from .paths import (
    Configuration,
    EnsembleResult,
    PathParams,
    WeightedPathResult,
    brownian_step,
    drifted_step,
    run_ensemble,
    run_path,
)
from .rng import RngStream, path_stream
from .trial import (
    CoulombPotential,
    FreeTrial,
    GaussianTrial,
    HarmonicPotential,
    HydrogenicTrial,
    HylleraasSpec,
    HylleraasTrial,
    PerturbedPotential,
    coulomb_potential,
    gaussian_trial,
    hydrogenic_trial,
    hylleraas_trial,
    load_hylleraas,
)

__version__ = "0.1.0"

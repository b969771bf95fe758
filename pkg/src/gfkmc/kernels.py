"""Backend selection for the hot path kernel.

The compiled extension is used when it is importable and
``GFKMC_PURE_PYTHON`` is unset; otherwise the numpy fallback is used.  Both
implementations are always reachable by name for testing and benchmarking.
"""
import os

from . import _pykernels

python_harmonic_paths = _pykernels.harmonic_paths

try:
    from ._ckernels import harmonic_paths as compiled_harmonic_paths
except ImportError:  # extension not built
    compiled_harmonic_paths = None

if compiled_harmonic_paths is not None and not os.environ.get("GFKMC_PURE_PYTHON"):
    harmonic_paths = compiled_harmonic_paths
    BACKEND = "cython"
else:
    harmonic_paths = python_harmonic_paths
    BACKEND = "python"

__all__ = ["harmonic_paths", "python_harmonic_paths", "compiled_harmonic_paths", "BACKEND"]

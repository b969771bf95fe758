"""Exception hierarchy.

Each exception carries the CLI exit code it maps to, so the front end can
translate failures without a lookup table.
"""


class GFKError(Exception):
    exit_code = 1


# configuration / input problems (exit 2)
class ConfigInvalid(GFKError, ValueError):
    exit_code = 2


class TrialFileMissing(ConfigInvalid, FileNotFoundError):
    exit_code = 2


class SpecShapeMismatch(ConfigInvalid):
    """Hylleraas term powers do not match the header's particle count."""


class DegenerateDesign(GFKError, ValueError):
    """Extrapolation design matrix is singular (e.g. all times equal)."""

    exit_code = 3


# runtime degeneracies (exit 3)
class RuntimeDegeneracy(GFKError, ArithmeticError):
    exit_code = 3


class DriftSingular(RuntimeDegeneracy):
    """Drift too large after the allowed number of resamples (node or Coulomb centre)."""


class WeightOverflow(RuntimeDegeneracy):
    pass


class AllWeightsDegenerate(RuntimeDegeneracy):
    """Effective sample size of the path weights fell below the threshold."""


class EvaluationAtNucleus(RuntimeDegeneracy):
    pass


class CoalescencePoint(RuntimeDegeneracy):
    pass


class NodalRegion(RuntimeDegeneracy):
    pass


class NonpositiveZ(RuntimeDegeneracy):
    pass


class ZeroDenominatorBlock(RuntimeDegeneracy):
    pass


class TruncationInsufficient(RuntimeDegeneracy):
    pass


# I/O (exit 4)
class OutputUnwritable(GFKError, OSError):
    exit_code = 4

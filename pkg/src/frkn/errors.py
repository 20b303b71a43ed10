"""Exception hierarchy.

Every numeric failure carries a short ``code`` and the ``module`` it came
from so the CLI can print a structured error line.
"""


class FRKNError(Exception):
    code = "FRKN_ERROR"
    module = "frkn"

    def __init__(self, detail="", **context):
        self.detail = detail
        self.context = context
        super().__init__(detail)


class SingularMatrix(FRKNError):
    code = "SINGULAR_MATRIX"
    module = "numkernel"


class NoConvergence(FRKNError):
    code = "NO_CONVERGENCE"
    module = "numkernel"


class InvalidParams(FRKNError):
    code = "INVALID_PARAMS"
    module = "basis"


class MissingCertificate(FRKNError):
    code = "MISSING_CERTIFICATE"
    module = "basis"


class CollocationFailure(FRKNError):
    code = "COLLOCATION_FAILURE"
    module = "tableau"


class DenominatorVanishes(FRKNError):
    code = "DENOMINATOR_VANISHES"
    module = "tableau"


class AugmentedSingular(FRKNError):
    code = "AUGMENTED_SINGULAR"
    module = "tableau"


class StageNoConvergence(FRKNError):
    code = "STAGE_NO_CONVERGENCE"
    module = "integrator"


class OriginSingularity(FRKNError):
    code = "ORIGIN_SINGULARITY"
    module = "problems"


class ResolventSingular(FRKNError):
    code = "RESOLVENT_SINGULAR"
    module = "stability"


class WSingular(FRKNError):
    code = "W_SINGULAR"
    module = "stability"


class InsufficientRows(FRKNError):
    code = "INSUFFICIENT_ROWS"
    module = "harness"

"""Exception hierarchy.

Every domain failure raised by the library derives from :class:`BendixError`
so the CLI can map it to exit code 1 with a JSON error object.
"""


class BendixError(Exception):
    """Base class for all domain errors."""

    code = "domain_error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"error": self.code, "message": str(self)}
        out.update({k: _jsonable(v) for k, v in self.details.items()})
        return out


def _jsonable(value):
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)


class InvalidInput(BendixError):
    code = "invalid_input"


class EigenConvergenceError(BendixError):
    code = "eigen_convergence"


class DegenerateEigenvalue(BendixError):
    code = "degenerate_eigenvalue"


class NotAProjection(BendixError):
    code = "not_a_projection"


class ClosureViolation(BendixError):
    code = "closure_violation"


class TriangleInequalityViolation(BendixError):
    code = "triangle_inequality_violation"


class SizeLimit(BendixError):
    code = "size_limit"


class PoleEvaluation(BendixError):
    code = "pole_evaluation"


class RepeatedEigenvalue(BendixError):
    code = "repeated_eigenvalue"


class InterlacingViolation(BendixError):
    code = "interlacing_violation"


class StrictInterlacingViolation(BendixError):
    code = "strict_interlacing_violation"


class IndexOutOfRange(BendixError, IndexError):
    code = "index_out_of_range"


class ZeroVector(BendixError):
    code = "zero_vector"


class BoundaryPattern(BendixError):
    code = "boundary_pattern"


class NormDefect(BendixError):
    code = "norm_defect"


class EmptyInterior(BendixError):
    code = "empty_interior"

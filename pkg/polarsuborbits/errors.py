"""Exception hierarchy for polarsuborbits."""


class PolarSuborbitsError(Exception):
    """Base class for every error raised by the package."""


class FieldError(PolarSuborbitsError, ValueError):
    """Invalid field order or undefined field operation (inverse of zero, square root of a non-square)."""


class MatrixError(PolarSuborbitsError, ValueError):
    """Shape mismatch, singular inverse or a matrix that should be alternate but is not."""


class GeometryError(PolarSuborbitsError, ValueError):
    """Bad orthogonal-space parameters or a group element that fails its defining identities."""


class VertexError(PolarSuborbitsError, ValueError):
    """A subspace or encoding that does not describe a vertex of the last subconstituent."""


class LabelError(PolarSuborbitsError, ValueError):
    """Suborbit or relation label that is unparsable or out of range for (q, nu)."""


class ClassificationError(PolarSuborbitsError):
    """A canonical-form reduction did not land on its representative."""


class SchemeAxiomError(PolarSuborbitsError):
    """The relation partition violates an association-scheme axiom."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(PolarSuborbitsError, ValueError):
    """Invalid run configuration."""


class CapExceededError(PolarSuborbitsError):
    """A desk-scale guard was hit; `required` is what the run would need."""

    def __init__(self, what: str, required: int, cap: int):
        super().__init__(f"{what} needs {required} but the cap is {cap}; raise the cap to run it")
        self.what = what
        self.required = required
        self.cap = cap

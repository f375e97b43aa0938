"""Exception hierarchy. Every error carries a stable ``code`` used by the CLI."""


class HalfTransError(Exception):
    code = "Error"


class SurfaceError(HalfTransError):
    code = "SurfaceError"


class InvalidPolygon(SurfaceError):
    code = "InvalidPolygon"


class EdgeMismatch(SurfaceError):
    code = "EdgeMismatch"


class NonManifold(SurfaceError):
    code = "NonManifold"


class Disconnected(SurfaceError):
    code = "Disconnected"


class BadConeAngle(SurfaceError):
    code = "BadConeAngle"


class NonPositiveDeterminant(HalfTransError):
    code = "NonPositiveDeterminant"


class NotUpperHalfPlane(HalfTransError):
    code = "NotUpperHalfPlane"


class NotJenkinsStrebel(HalfTransError):
    code = "NotJenkinsStrebel"


class WrongStratum(HalfTransError):
    code = "WrongStratum"


class NotCase1(HalfTransError):
    code = "NotCase1"


class NotCase2(HalfTransError):
    code = "NotCase2"


class NonPositiveParameter(HalfTransError):
    code = "NonPositiveParameter"


class OutOfRange(HalfTransError):
    code = "OutOfRange"


class InconsistentMonodromy(HalfTransError):
    code = "InconsistentMonodromy"


class DomainViolation(HalfTransError):
    code = "DomainViolation"


class QuadratureFailure(HalfTransError):
    code = "QuadratureFailure"


class NoConvergence(HalfTransError):
    code = "NoConvergence"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NonPositiveSolution(HalfTransError):
    code = "NonPositiveSolution"


class FormatError(HalfTransError):
    code = "FormatError"

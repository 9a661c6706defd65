"""Exception hierarchy.

Every domain failure derives from ``ToricError`` so the CLI can map it to exit
code 1; ``SchemaError`` is the one parse-level failure (exit code 2).
"""


class ToricError(Exception):
    """Base class for domain failures."""


class SchemaError(ToricError):
    """Malformed or unsupported input file."""


class ZeroVector(ToricError):
    pass


class NonSquare(ToricError):
    pass


class Unbounded(ToricError):
    pass


class NotFullDimensional(ToricError):
    pass


class NotSimple(ToricError):
    def __init__(self, message, vertices=()):
        super().__init__(message)
        self.vertices = tuple(vertices)


class EmptySet(ToricError):
    pass


class DimensionMismatch(ToricError):
    pass


class NotUnimodular(ToricError):
    pass


class NotPrequantizable(ToricError):
    def __init__(self, message, edges=()):
        super().__init__(message)
        # (start vertex, end vertex, edge length) triples, 2pi-units
        self.edges = tuple(edges)


class NotPrequantized(ToricError):
    pass


class NoHalfForm(ToricError):
    def __init__(self, message, certificate=()):
        super().__init__(message)
        # facet indices whose parity constraints sum to 0 = 1 over GF(2)
        self.certificate = tuple(certificate)


class OutOfPolytope(ToricError):
    pass


class InconsistentSystem(ToricError):
    pass


class HullDegenerate(ToricError):
    pass


class RationalizationFailed(ToricError):
    pass


class SnapExceeded(ToricError):
    def __init__(self, message, raw=None):
        super().__init__(message)
        self.raw = raw


class NotDelzant(ToricError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report

"""Typed failures.

Every validation failure carries a witness (indices, a matrix entry, a
monomial) in its message so a report can point at the offending datum.
"""


class EngineError(Exception):
    """Base class for all engine failures."""


class AntisymmetryViolation(EngineError):
    pass


class JacobiViolation(EngineError):
    pass


class NotAModule(EngineError):
    pass


class NotEquivariant(EngineError):
    pass


class NotAlgebraic(EngineError):
    pass


class TruncationOverflow(EngineError):
    """An exact result needs PBW degree beyond the carrier's cutoff."""


class NotReductive(EngineError):
    pass


class MixedAlgebras(EngineError):
    """Operands defined over different algebras or DG tags."""


class NotAMorphism(EngineError):
    pass


class NotSemisplit(EngineError):
    pass


class NotASubalgebra(EngineError):
    pass


class NonIntegralWeight(EngineError):
    pass


class UnsupportedGroup(EngineError):
    pass


class CutoffInsufficient(EngineError):
    """Certified block range too small for the requested computation."""


class MismatchReport(EngineError):
    """Two computations that must agree did not; message lists both sides."""

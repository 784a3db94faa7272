"""Exception hierarchy.

Every domain error raised by the package derives from :class:`AddinfoError`,
so callers (the CLI in particular) can separate domain failures from
programming errors.
"""


class AddinfoError(ValueError):
    """Base class for all domain errors."""


class SchemaError(AddinfoError):
    """Malformed JSON or command-line object description."""


# linalg-core
class NegativeWeight(AddinfoError):
    pass


class SumNotOne(AddinfoError):
    pass


class NotProjection(AddinfoError):
    pass


class NotOrthogonal(AddinfoError):
    pass


class NotComplete(AddinfoError):
    pass


class NotHermitian(AddinfoError):
    pass


class NotState(AddinfoError):
    pass


class DimensionMismatch(AddinfoError):
    pass


class NonCommuting(AddinfoError):
    pass


class NotUnitVector(AddinfoError):
    pass


# borel-algebra
class NotNested(AddinfoError):
    pass


class UnequalMeasure(AddinfoError):
    pass


class NotPartition(AddinfoError):
    pass


# boolean-structure
class WeightMismatch(AddinfoError):
    pass


class UnsplittableCell(AddinfoError):
    pass


class NotCellAligned(AddinfoError):
    pass


class GridMismatch(AddinfoError):
    pass


class IncompatibleStates(AddinfoError):
    pass


class NoCommonRefinement(AddinfoError):
    pass


class InvalidStructure(AddinfoError):
    pass


# info-functionals
class DivergentTerm(AddinfoError):
    pass


class ZeroConditioningEvent(AddinfoError):
    pass


class ZeroAtom(AddinfoError):
    pass


# decompose
class QueryBudgetExceeded(AddinfoError):
    pass


class OracleNotAdditive(AddinfoError):
    pass


class OracleProtocolError(AddinfoError):
    pass


class RankDeficient(AddinfoError):
    def __init__(self, message, null_dim=None):
        super().__init__(message)
        self.null_dim = null_dim


class DimensionTooSmall(AddinfoError):
    pass


# dilation
class RankInfeasible(AddinfoError):
    pass


class NotCommuting(NonCommuting):
    pass


# axioms-gallery
class ResolutionTooCoarse(AddinfoError):
    pass


class WeightZero(AddinfoError):
    pass


class ChainNotMonotone(AddinfoError):
    pass

"""Exception hierarchy shared by every module."""


class TableError(ValueError):
    """Base class for all contingency-table errors raised by nmipf."""


class InvalidTableError(TableError):
    """A table violates the ContingencyTable invariants."""


class InvalidTargetsError(TableError):
    """Margin targets are negative or their grand totals disagree."""


class DimensionError(TableError):
    """Shapes of tables or targets are incompatible."""


class CutOutOfBoundsError(TableError, IndexError):
    """An aggregation cut lies outside ``[1, n-1] x [1, m-1]``."""


class ZeroCellError(TableError):
    """The odds-ratio is undefined because a cell is zero."""


class NegativeAssociationError(TableError):
    """The H,H cell is below its integer independence value.

    Such tables fall outside the nonnegative-association subset on which the
    Liu-Lu indicator is defined.
    """

    def __init__(self, message, cut=None):
        super().__init__(message)
        self.cut = cut


class DegenerateMarginError(TableError):
    """The Liu-Lu denominator ``min(N_H., N_.H) - int(R)`` is not positive."""

    def __init__(self, message, cut=None):
        super().__init__(message)
        self.cut = cut


class InfeasibleError(TableError):
    """No nonnegative table with the requested margins can be produced."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class SupportError(TableError):
    """``p > 0`` where ``q == 0`` in a divergence computation."""


class EnumerationCapError(TableError):
    """Enumerating tables would exceed the configured cap."""


class CounterfactualError(TableError):
    """A counterfactual table in a decomposition could not be built.

    ``leg`` names the failing counterfactual, e.g. ``"g(A1, P0)"``; the
    engine error is chained as ``__cause__``.
    """

    def __init__(self, message, leg):
        super().__init__(message)
        self.leg = leg

"""Exception hierarchy shared by all glram modules."""


class GlramError(Exception):
    """Base class for library errors."""


class CapabilityError(GlramError):
    """No regression solver is available for the requested loss."""


class BudgetError(GlramError):
    """An exhaustive enumeration would exceed its combinatorial budget."""


class SolverError(GlramError):
    """A numerical solver produced a non-finite intermediate."""


class GenerationError(GlramError):
    """A randomized instance generator failed to meet its target."""


class LemmaPreconditionError(GlramError):
    """The column is part of the max-determinant set, so no bounded
    coefficient representation is promised."""

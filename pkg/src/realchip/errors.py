"""Exception types shared across the package.

Every domain failure raises a subclass of :class:`RealChipError`; the CLI
maps these to exit codes (1 for domain errors, 2 for property violations,
3 for exceeded enumeration budgets).
"""


class RealChipError(Exception):
    """Base class for all errors raised by this package."""


class GraphValidationError(RealChipError):
    """A graph failed one of the structural axioms."""


class NotInvolutive(GraphValidationError):
    """A sigma map is not its own inverse."""


class IncompatibleInvolution(GraphValidationError):
    """Edge and vertex involutions disagree on some incidence."""


class Disconnected(GraphValidationError):
    """The underlying multigraph is not connected."""


class DanglingIncidence(GraphValidationError):
    """An edge end or sigma entry references an unknown id."""


class EnumerationBudgetExceeded(RealChipError):
    """An exhaustive sweep would exceed the configured budget."""


class BudgetExceeded(EnumerationBudgetExceeded):
    """A model construction would exceed the configured size cap."""


class NotReal(RealChipError):
    """A divisor expected to be conjugation-invariant is not."""


class NotEquivalent(RealChipError):
    """Two divisors expected to be linearly equivalent are not."""


class PreconditionViolated(RealChipError):
    """An operation's stated precondition does not hold; names which one."""


class NotMGraph(RealChipError):
    """The graph does not satisfy s(G) = g(G) + 1 with no isolated real edges."""


class NotStrongMGraph(RealChipError):
    """The real locus does not have g(G) + 1 connected components."""


class NotRealEffective(RealChipError):
    """A divisor expected to be real and effective is not."""


class SearchExhausted(RealChipError):
    """A sweep guaranteed to succeed found nothing; certifies a defect."""


class InadmissibleTriple(RealChipError):
    """(g, s, a) violates the parity or range constraints."""


class GenusTooSmall(RealChipError):
    """A construction requires a base graph of genus at least one."""


class IrrationalPoint(RealChipError):
    """A metric-graph point does not have rational coordinates."""


class NotMMetricGraph(RealChipError):
    """The metric graph does not satisfy s = g + 1."""


class IncompatibleOrientation(RealChipError):
    """Stored edge orientations are not compatible with the involution."""

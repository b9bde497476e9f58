"""Exception hierarchy for the package."""


class SphereRamseyError(Exception):
    """Base class for all package errors."""


class DomainError(SphereRamseyError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InfeasibleParametersError(SphereRamseyError):
    """Parameters fail a feasibility precondition (bad bracket, desk-scale cap)."""


class RejectionExhaustedError(SphereRamseyError):
    """A rejection sampler ran out of its candidate budget."""


class SingularSequenceError(SphereRamseyError, ValueError):
    """A point sequence is numerically rank-deficient."""


class ResourceLimitError(SphereRamseyError):
    """A request exceeds the configured memory or size guard."""

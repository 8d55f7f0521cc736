"""Exception types shared across the package."""


class QpnError(Exception):
    """Base class for all qpnet errors."""


class ArcError(QpnError):
    """An arc is missing or has the wrong kind for the requested operation."""


class ObservationError(QpnError):
    """Evidence is malformed: duplicate node, non-evidence sign, unknown node."""


class EnumerationLimitError(QpnError):
    """The network is too large for brute-force enumeration."""


class ZeroProbabilityEvidence(QpnError):
    """A conditional query was asked against impossible evidence."""


class DocumentError(QpnError):
    """A network or evidence document failed to parse."""


class InvariantViolation(QpnError):
    """An internal engine invariant failed; indicates a bug or a degenerate input."""

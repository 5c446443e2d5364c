"""Exception hierarchy.

Validation problems derive from :class:`ValueError`, tripped resource
guards from :class:`ResourceLimitExceeded`, so callers (and the CLI) can
separate bad input from instances that are merely too large.
"""


class FbasError(Exception):
    pass


class ValidationError(FbasError, ValueError):
    pass


class MembershipViolation(ValidationError):
    pass


class EmptySliceSet(ValidationError):
    pass


class UnknownNode(ValidationError):
    pass


class DuplicateSlice(ValidationError):
    pass


class ThresholdOutOfRange(ValidationError):
    pass


class KTooLarge(ValidationError):
    pass


class PreconditionViolation(ValidationError):
    pass


class EmptySet(ValidationError):
    pass


class NotATrustCluster(ValidationError):
    pass


class PartitionInvalid(ValidationError):
    pass


class MalformedFormula(ValidationError):
    pass


class InvalidDistribution(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class NoQuorumIntersection(FbasError):
    """An operation that assumes quorum intersection got an FBAS without it."""


class ResourceLimitExceeded(FbasError):
    pass


class ExpansionTooLarge(ResourceLimitExceeded):
    pass


class InstanceTooLarge(ResourceLimitExceeded):
    pass


class TooManyQuorums(ResourceLimitExceeded):
    pass


class TooManyMaximalDsets(ResourceLimitExceeded):
    pass

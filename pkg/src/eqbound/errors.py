"""Exception types raised across the package."""


class EqboundError(Exception):
    """Base class for every error raised by eqbound."""


class OverlappingUsers(EqboundError, ValueError):
    pass


class IncompleteProfile(EqboundError, ValueError):
    pass


class IncompleteOmega(IncompleteProfile):
    pass


class MissingSocialGraph(EqboundError):
    pass


class MissingGrouping(EqboundError):
    pass


class DegenerateDistribution(EqboundError, ValueError):
    pass


class ResourceLimit(EqboundError):
    """Raised instead of silently truncating an enumeration above the cap."""


class NondecreasingViolated(EqboundError):
    pass


class HypothesisUnverified(EqboundError):
    """A theorem check was requested in strict mode but a premise failed."""


class EmptyChannelSet(EqboundError, ValueError):
    pass


class AsymmetricTies(EqboundError, ValueError):
    pass


class UnequalPowers(EqboundError, ValueError):
    pass


class InvalidParams(EqboundError, ValueError):
    pass


class ParseError(EqboundError, ValueError):
    pass


class UndefinedProfile(EqboundError, KeyError):
    """A table-backed oracle was asked for a profile it does not list."""

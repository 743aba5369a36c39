"""Exception hierarchy shared by all pmmwm modules.

Every error carries an ``exit_code`` so the CLI can map failures to
distinct, scriptable process exit codes (see README).
"""


class PmmwmError(Exception):
    """Base class for all solver errors."""

    exit_code = 1


class ParseError(PmmwmError):
    """Instance or solution file is malformed."""

    exit_code = 3


class InfeasibleInstance(PmmwmError):
    """No perfect matching on available edges, or m * ubar < n1."""

    exit_code = 4


class NoPerfectMatching(PmmwmError):
    """An augmentation phase exhausted reachable vertices without a free one.

    Raised by the matcher when a ban (or a defective instance) leaves some
    U-vertex unmatchable. Callers banning edges must treat this as a vetoed
    ban and restore the edge.
    """

    exit_code = 4


class CapacityInfeasible(PmmwmError):
    """Partition constructors called with m * ubar < number of items."""

    exit_code = 4


class TooLarge(PmmwmError):
    """Exhaustive oracle guard exceeded."""

    exit_code = 5


class SpecInvalid(PmmwmError):
    """Instance-generator specification violates its invariants."""

    exit_code = 2

"""Exception hierarchy for the attack toolkit."""


class DagsAttackError(Exception):
    """Base class for all errors raised by this package."""


class FieldMismatch(DagsAttackError):
    """Operands belong to different fields; this is a programming error."""


class DivisionByZero(DagsAttackError):
    """Inversion of the zero element."""


class ShapeMismatch(DagsAttackError):
    """Matrix dimensions are incompatible."""


class RankDeficient(DagsAttackError):
    """Operation requires a full-row-rank matrix."""


class InvalidSupport(DagsAttackError):
    """Repeated support entry or zero column multiplier."""


class DegenerateGroup(DagsAttackError):
    """Group generators are linearly dependent over GF(2)."""


class CosetCollision(DagsAttackError):
    """Coset representatives are not pairwise disjoint."""


class SamplingExhausted(DagsAttackError):
    """Rejection sampling failed too many times."""


class UnknownPreset(DagsAttackError):
    """No parameter set registered under that name."""


class NonexistentD(DagsAttackError):
    """k0 <= c: the searched subcode has non-positive dimension."""


class SystematicFormFailure(DagsAttackError):
    """Could not reach simultaneous systematic forms after all retries."""


class SolutionSpaceTooLarge(DagsAttackError):
    """Solution enumeration would exceed the configured cap."""


class MemoryCapExceeded(DagsAttackError):
    """Estimated matrix allocation exceeds the configured memory cap."""


class DegenerateSupport(DagsAttackError):
    """Reconstructed support has repeated entries (wrong solution branch)."""


class InconsistentStructure(DagsAttackError):
    """Reconstructed punctured support is not block-affine."""


class NoValidMultiplier(DagsAttackError):
    """Multiplier solution space has no nonzero dyadic-constant element."""


class ExhaustedSearchSpace(DagsAttackError):
    """Hybrid enumeration ran out of guesses without a verified key."""

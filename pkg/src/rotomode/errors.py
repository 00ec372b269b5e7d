"""Exception hierarchy.

Every error raised by the library derives from :class:`RotomodeError`, which is
itself a :class:`ValueError` so callers validating user input can catch either.
"""


class RotomodeError(ValueError):
    pass


class NonPositiveFrequency(RotomodeError):
    pass


class BadHelicity(RotomodeError):
    pass


class ParaxialityViolated(RotomodeError):
    pass


class ShiftExceedsFrequency(RotomodeError):
    pass


class DegenerateOrbitalPair(RotomodeError):
    pass


class DegeneratePair(RotomodeError):
    pass


class TruncationOverflow(RotomodeError):
    pass


class UnnormalizedState(RotomodeError):
    pass


class BasisMismatch(RotomodeError):
    pass


class ZeroProbabilityBranch(RotomodeError):
    pass


class LgOffFocalPlane(RotomodeError):
    pass


class NullField(RotomodeError):
    pass


class NoAzimuthalStructure(RotomodeError):
    pass


class SupportCrossesZero(RotomodeError):
    pass


class ZeroAbsorption(RotomodeError):
    pass

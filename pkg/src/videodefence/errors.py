"""Exception hierarchy shared by every stage of the pipeline."""


class DefenceError(Exception):
    """Base class for all errors raised by :mod:`videodefence`."""


class DimensionMismatch(DefenceError, ValueError):
    pass


class DegenerateInput(DefenceError, ValueError):
    pass


class InputTooSmall(DefenceError, ValueError):
    pass


class NonFiniteState(DefenceError, ArithmeticError):
    pass


class EmptyInput(DefenceError, ValueError):
    pass


class AllHoles(DefenceError, ValueError):
    pass


class NeighborWindowEmpty(DefenceError, ValueError):
    pass


class InvalidSpec(DefenceError, ValueError):
    pass


class EmptyGroundTruth(DefenceError, ValueError):
    pass


class EmptyRegion(DefenceError, ValueError):
    pass


# io
class MissingFrames(DefenceError, FileNotFoundError):
    pass


class DecodeError(DefenceError, ValueError):
    pass


class NonContiguousIndices(DefenceError, ValueError):
    pass


class BadMagic(DefenceError, ValueError):
    pass


class TruncatedFile(DefenceError, ValueError):
    pass


class ConfigError(DefenceError, ValueError):
    """Malformed line, unknown key or bad value in a key = value file."""

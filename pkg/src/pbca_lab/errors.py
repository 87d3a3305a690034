"""Exception hierarchy shared by all engines."""


class PBCAError(Exception):
    """Base class for errors raised by pbca_lab."""


class ParameterError(PBCAError, ValueError):
    """Invalid sizes, counts or probabilities."""


class AlphabetError(ParameterError):
    """Ring alphabet does not match what the operation or model expects."""


class UndefinedTallyError(ParameterError):
    """Species tally requested for a ring without any particle."""


class CapacityError(PBCAError):
    """Too many movable particles to enumerate successor subsets."""


class ClosureError(PBCAError):
    """A transition leaves the configuration space it was built on."""


class ErgodicityError(PBCAError):
    """The chain does not have a unique aperiodic recurrent class."""


class LumpabilityError(PBCAError):
    """Rotation classes do not form a lumpable partition."""

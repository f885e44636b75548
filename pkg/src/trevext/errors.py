"""Exception hierarchy shared by all modules."""


class TrevextError(Exception):
    """Base class for all library errors."""


class ParameterError(TrevextError):
    """Caller passed inconsistent or out-of-range parameters."""


class UnsupportedParametersError(TrevextError):
    """The requested parameters are valid but outside what this
    implementation supports (e.g. symbol size beyond the modulus table)."""


class ConstructionError(TrevextError):
    """Internal failure of a construction whose success is guaranteed by
    its parameter choice; reaching this indicates a bug."""


class VerificationError(TrevextError):
    """An exact re-verification of a certified object failed."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SizeGuardError(TrevextError):
    """An exhaustive computation was requested above its size guard."""

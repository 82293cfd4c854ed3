"""Exception hierarchy shared by the library and the CLI."""


class RacheError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RacheError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class KeyGenerationError(RacheError):
    pass


class MalformedCiphertextError(RacheError, ValueError):
    pass


class OutOfCacheRangeError(DomainError):
    """A plaintext exceeds the maximal value the radix cache was built for."""


class FormatError(RacheError, ValueError):
    """A serialized file (keys, ciphertexts, plaintexts) could not be parsed."""


class KeyMismatchError(FormatError):
    pass


class EmptyDatasetError(RacheError, ValueError):
    pass


class VerificationError(RacheError):
    """Benchmarked output failed its decrypt check; timings are discarded."""

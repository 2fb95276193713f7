"""Exception and warning types shared across the package."""


class KerrPolError(Exception):
    """Base class for all domain errors raised by kerrpol."""


class TruncationError(KerrPolError):
    """Fock cutoff too small for the requested coherent amplitudes."""


class DomainError(KerrPolError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class DivisionDomainError(DomainError):
    """Compression ratio undefined because both modes carry equal flux."""


class ConfigError(KerrPolError):
    """Base class for configuration problems."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = ""
        if key is not None:
            where += f" [key {key!r}"
            where += f", line {line}]" if line is not None else "]"
        super().__init__(message + where)


class ParseError(ConfigError):
    pass


class SchemaError(ConfigError):
    pass


class RangeError(ConfigError):
    pass


class BoundaryWarning(UserWarning):
    """Significant probability mass sits in the top Fock shells."""


class MultimodalWarning(UserWarning):
    """Coarse phase scan found several distinct local minima."""

"""Exception hierarchy. Every error the CLI can surface has a distinct name."""


class StackjamError(Exception):
    """Base class for all package errors."""


class ConfigError(StackjamError):
    """Invalid configuration value (nonpositive power, zero counts, bad range)."""


class MissingFieldError(ConfigError):
    def __init__(self, section: str, key: str):
        self.section = section
        self.key = key
        super().__init__(f"missing field: [{section}] {key}")


class AsymmetricGainError(ConfigError):
    """Explicit cross gains violate H_mn^c == H_nm^c."""


class UtilityBoundError(ConfigError):
    """Utility constant L is below the worst-case interference plus jamming."""


class ModelViolation(StackjamError):
    """Input breaks an assumption the computation depends on."""


class InstanceTooLargeError(StackjamError):
    """Exhaustive enumeration would exceed the profile budget."""


class UnknownKindError(StackjamError):
    """Experiment kind or sweep parameter is not recognized."""


class OutputError(StackjamError):
    """Output destination cannot be written."""

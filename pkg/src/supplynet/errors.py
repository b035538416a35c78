class SupplyNetError(Exception):
    """Base class for package errors."""


class ParameterError(SupplyNetError, ValueError):
    """Invalid argument values or configuration."""


class UnsupportedConfigurationError(SupplyNetError):
    """Input is valid but outside what an algorithm defines (e.g. multiple producers)."""


class SamplingError(SupplyNetError, RuntimeError):
    """A rejection sampler ran out of attempts."""


class LoadError(SupplyNetError, ValueError):
    """Malformed input file."""

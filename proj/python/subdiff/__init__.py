"""Spectral forward and inverse solvers for the subdiffusion source problem."""

from ._core import (
    AccuracyError,
    ConfigError,
    DomainError,
    NoSolutionError,
    PreconditionError,
    duhamel,
    example1,
    forward,
    gamma,
    invert,
    ml,
    null_modes,
    roundtrip,
    run,
    version,
)

__all__ = [
    "AccuracyError",
    "ConfigError",
    "DomainError",
    "NoSolutionError",
    "PreconditionError",
    "duhamel",
    "example1",
    "forward",
    "gamma",
    "invert",
    "ml",
    "null_modes",
    "roundtrip",
    "run",
    "version",
]
__version__ = version()

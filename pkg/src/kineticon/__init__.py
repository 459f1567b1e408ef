"""Design toolkit for kinetic-inductance nanowire qubits at millimeter-wave frequencies."""

from .errors import KineticonError, ValidityWarning

__version__ = "0.1.0"

__all__ = ["KineticonError", "ValidityWarning", "__version__"]

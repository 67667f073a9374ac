"""Exception types shared across the package.

Library code raises these; the tool environment converts anything raised
while executing a call into an in-band error result, and the CLI maps them
to exit codes (2 for configuration problems, 1 for generation/validation
failures).
"""

from __future__ import annotations


class SlotbenchError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SlotbenchError):
    """Invalid configuration value or combination."""


class ConstraintSchemaError(SlotbenchError):
    """Constraint references an unknown field or mismatched value type."""


class ConstraintParseError(SlotbenchError):
    """Constraint text does not match the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownItemError(SlotbenchError):
    """Item id does not resolve against the known item pool."""


class IncompleteAssignmentError(SlotbenchError):
    """Full-grid evaluation was asked for a grid with unfilled cells."""


class InstanceFormatError(SlotbenchError):
    """Instance or key file is malformed; message names the field path."""


class GenerationError(SlotbenchError):
    """Instance generation exhausted its retry budget."""

    def __init__(self, message: str, slot: tuple[int, int] | None = None):
        super().__init__(message)
        self.slot = slot


class EndpointError(SlotbenchError):
    """Chat endpoint failed after all retry attempts."""

"""
Exception hierarchy for reflectsim.

Library code raises these; only the command-line runner turns them into
exit codes.
"""

from typing import Any, Optional


class ReflectSimError(Exception):
    """Base class for every error raised by this package."""


# Wire codec errors

class WireError(ReflectSimError):
    """A frame could not be decoded. ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class BadMagic(WireError):
    pass


class BadChecksum(WireError):
    pass


class TruncatedPayload(WireError):
    pass


class UnknownCommand(WireError):
    pass


class CapExceeded(WireError):
    """A list exceeded its protocol cap (raised by encode with offset -1)."""

    def __init__(self, message: str, offset: int = -1, *, count: int = 0, cap: int = 0):
        super().__init__(message, offset)
        self.count = count
        self.cap = cap


class MalformedPayload(WireError):
    pass


class TrailingBytes(WireError):
    pass


# Transport errors

class UnknownDestination(ReflectSimError):
    def __init__(self, address: Any):
        super().__init__(f"No endpoint registered at {address}")
        self.address = address


class SpoofNotPermitted(ReflectSimError):
    """Only endpoints registered as attackers may forge a source address."""


class MaxTicksExceeded(ReflectSimError):
    def __init__(self, max_ticks: int, trace: Any):
        super().__init__(f"Simulation did not quiesce within {max_ticks} ticks")
        self.max_ticks = max_ticks
        self.trace = trace


class EmptySeedPool(ReflectSimError):
    pass


# Scenario and CLI errors

class ScenarioPreconditionFailed(ReflectSimError):
    pass


class ConfigError(ReflectSimError):
    def __init__(self, key: str, value: Any, reason: Optional[str] = None):
        detail = f"Invalid configuration value for '{key}': {value!r}"
        if reason:
            detail += f" ({reason})"
        super().__init__(detail)
        self.key = key
        self.value = value


class ReportWriteError(ReflectSimError):
    def __init__(self, path: Any, reason: str):
        super().__init__(f"Could not write report to {path}: {reason}")
        self.path = path

"""Shared exception types."""


class UltrametryError(Exception):
    """Base class for all library errors."""


class InputError(UltrametryError):
    """Malformed input or a violated precondition."""


class DomainError(UltrametryError):
    """A function was evaluated outside its covered domain."""

"""Error types shared across the package."""


class ConecrafterError(Exception):
    """Base class for package errors."""


class ParseError(ConecrafterError):
    """Malformed input document."""


class ValidationError(ConecrafterError):
    """Input violates a stated structural invariant; carries its name."""

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        self.detail = detail
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)


class ClosureError(ConecrafterError):
    """Group generators do not close within the bound."""

    invariant = "group_closure"


class DeskScaleError(ConecrafterError):
    """Input exceeds the sizes this toolkit promises to handle."""

    invariant = "desk_scale"


class SearchExhausted(ConecrafterError):
    """A bounded deterministic search ran out of candidates."""


class InternalInvariantError(ConecrafterError):
    """A mathematical identity that must hold failed; indicates a bug or an
    inconsistent input that slipped past validation."""

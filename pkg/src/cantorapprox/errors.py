"""Exception types shared across the package."""


class NotInCantorSet(ValueError):
    """Raised when a rational's base-3 expansion produces the digit 1.

    ``digit_index`` is the 1-based position of the offending digit.
    """

    def __init__(self, p: int, q: int, digit_index: int):
        self.p = p
        self.q = q
        self.digit_index = digit_index
        super().__init__(
            f"{p}/{q} is not in the Cantor set: base-3 digit 1 at position {digit_index}"
        )


class ResourceCapExceeded(RuntimeError):
    """A requested computation exceeds the configured enumeration caps."""


class DegenerateInput(ValueError):
    """An input is structurally valid but yields an empty or undefined computation."""


class InvariantViolation(RuntimeError):
    """A construction-time invariant failed; indicates a bug or a falsified bound."""

"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed input: wrong lengths, non-binary entries, bad spec values."""


class CapacityError(ValueError):
    """Requested size exceeds what exhaustive tabulation/simulation supports."""


class NumericFailure(ArithmeticError):
    """A non-finite value appeared during optimization."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step

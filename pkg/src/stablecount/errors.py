"""Exception hierarchy shared by all stablecount modules."""


class StableCountError(Exception):
    """Base class for every error raised by this package."""


class ParseError(StableCountError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class ProgramError(StableCountError):
    """A program is syntactically fine but semantically invalid."""


class UnsupportedModeError(StableCountError):
    """Raised when a counting mode's prerequisites do not hold."""


class NotStratifiedError(UnsupportedModeError):
    pass


class InconsistentAssumptionsError(StableCountError):
    pass


class SizeLimitError(StableCountError):
    """Instance exceeds a configured resource bound."""


class ZeroEvidenceWeightError(StableCountError):
    """The evidence has probability zero, so conditionals are undefined."""

"""Exception hierarchy shared by the engines and the command line."""


class GradecalcError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(GradecalcError, ValueError):
    """Malformed input: bad ring data, invalid substitution, bad config."""


class StructureError(ValidationError):
    """Operands belong to different rings or have incompatible shapes."""


class TruncationError(ValidationError):
    """A value could not be represented within the configured truncation."""


class ContractError(ValidationError):
    """An operation was called outside its precondition (e.g. order too high)."""


class IntegrityError(GradecalcError):
    """A cochain complex failed delta∘delta = 0, or presheaf data is incoherent."""


class ParseError(ValidationError):
    def __init__(self, message, text="", pos=0):
        self.text = text
        self.pos = pos
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line = line
        self.column = col
        super().__init__(f"{message} (line {line}, column {col})")

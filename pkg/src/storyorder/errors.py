"""Exception hierarchy. ValidationError maps to CLI exit code 2, everything
else that escapes maps to exit code 1."""


class ValidationError(ValueError):
    """Malformed input data, file, or configuration."""


class CorpusError(ValidationError):
    pass


class CorpusParseError(CorpusError):
    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc += f"{path}"
        if line is not None:
            loc += f":{line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line


class TwoChoiceStoryError(CorpusParseError):
    """Record carries two fifth-sentence options instead of one gold ending."""


class EmbeddingFormatError(ValidationError):
    pass


class SearchSpaceError(ValidationError):
    """Sequence too long for exhaustive search; use the greedy strategy."""


class TrainingDivergedError(RuntimeError):
    """Non-finite loss encountered during training."""

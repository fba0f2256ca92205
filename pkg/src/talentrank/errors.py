"""Exception types shared across the toolkit."""


class TalentRankError(Exception):
    """Base class for all toolkit errors."""

    code = "error"


class ParseError(TalentRankError):
    """Malformed input document or table; carries a line number when known."""

    code = "parse_error"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoBlocksError(ParseError):
    """Document contained no usable text blocks."""

    code = "no_blocks"


class NormalizationError(TalentRankError):
    """A surface form could not be normalized; carries the original text."""

    code = "normalization_error"

    def __init__(self, text, reason="unrecognized expression"):
        self.text = text
        super().__init__(f"{reason}: {text!r}")


class TrainingError(TalentRankError):
    code = "training_error"


class IncompatibleModelError(TalentRankError):
    """Model feature-spec version does not match the library."""

    code = "incompatible_model"


class OutOfVocabularyError(TalentRankError):
    code = "out_of_vocabulary"

    def __init__(self, token):
        self.token = token
        super().__init__(f"skill not in vocabulary: {token!r}")


class ParameterError(TalentRankError):
    code = "invalid_parameter"


class NotFoundError(TalentRankError):
    code = "not_found"


class ConflictError(TalentRankError):
    code = "conflict"


class IntegrityError(TalentRankError):
    """Persisted artifact is corrupt; carries the byte offset of the damage."""

    code = "integrity_error"

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class VersionError(TalentRankError):
    """Persisted artifact has an unknown or future format version."""

    code = "version_error"


class StateError(TalentRankError):
    """Operation requires an artifact (model, map) that is not present."""

    code = "missing_state"

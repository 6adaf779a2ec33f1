class PredSearchError(Exception):
    """Root of every error raised by the toolkit."""


class MpsParseError(PredSearchError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class DimensionMismatchError(PredSearchError):
    pass


class InvalidSizeError(PredSearchError):
    pass


class LpNumericsError(PredSearchError):
    """The simplex lost accuracy; the caller gets this instead of a wrong answer."""


class ProblemTooLargeError(PredSearchError):
    pass


class EmptyPoolError(PredSearchError):
    pass


class ModelCompatibilityError(PredSearchError):
    pass


class MissingInputError(PredSearchError):
    """An instance, label or model file named in a run spec does not exist."""

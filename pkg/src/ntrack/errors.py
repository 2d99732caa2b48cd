"""Exception types shared across the package."""


class NTrackError(Exception):
    """Base class for all errors raised by this package."""


class InvalidBox(NTrackError):
    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class InvalidState(NTrackError):
    pass


class MalformedSeqInfo(NTrackError):
    pass


class MalformedRow(NTrackError):
    def __init__(self, message, line_no):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class NotAFlowFile(NTrackError):
    pass


class TruncatedFlow(NTrackError):
    pass


class CorruptFlow(NTrackError):
    pass


class OutOfField(NTrackError):
    pass


class InvalidVelocity(NTrackError):
    pass


class InvalidMeasurement(NTrackError):
    pass


class InsufficientHistory(NTrackError):
    pass


class DegenerateRegressor(NTrackError):
    pass


class NoEstimates(NTrackError):
    pass


class SequenceError(NTrackError):
    pass


class InvalidFlow(NTrackError):
    pass


class EmptyInput(NTrackError):
    pass


class InvalidMargin(NTrackError):
    pass


class DegenerateSample(NTrackError):
    pass


class InsufficientData(NTrackError):
    pass


class InvalidConfig(NTrackError):
    pass

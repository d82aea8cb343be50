"""Exception types shared across the package."""


class PomsetError(Exception):
    """Base class for all errors raised by this package."""


class UnknownLetter(PomsetError, KeyError):
    pass


class AlphabetMismatch(PomsetError):
    pass


class InvalidBimonoid(PomsetError):
    pass


class FormatError(PomsetError, ValueError):
    """A JSON document does not describe a valid object of the requested kind."""


class DefectPresent(PomsetError):
    pass


class NotClosed(PomsetError):
    pass


class TeacherInconsistent(PomsetError):
    pass


class NotSaturatedWithin(PomsetError):
    def __init__(self, bound, violation):
        super().__init__(f"not saturated within {bound} nodes: {violation}")
        self.bound = bound
        self.violation = violation


class NotDepthNilpotent(PomsetError):
    def __init__(self, report):
        super().__init__(f"recogniser is not depth-nilpotent: {report.failure_witness}")
        self.report = report


class ClosureDiverged(PomsetError):
    pass

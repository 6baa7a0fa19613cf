"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` so the CLI and the
HTTP service can serialize failures uniformly.
"""


class MorseflowError(Exception):
    code = "error"

    def __init__(self, message="", **details):
        super().__init__(message or self.code)
        self.details = details

    def to_json(self):
        return {"code": self.code, "message": str(self), **self.details}


class UnknownId(MorseflowError):
    code = "UnknownId"


class IndexOutOfRange(MorseflowError):
    code = "IndexOutOfRange"


class SaddleFull(MorseflowError):
    code = "SaddleFull"


class KindMismatch(MorseflowError):
    code = "KindMismatch"


class AngleConflict(MorseflowError):
    code = "AngleConflict"


class InvalidSkeleton(MorseflowError):
    code = "InvalidSkeleton"


class InvalidTarget(MorseflowError):
    code = "InvalidTarget"


class WrongEdgeClass(MorseflowError):
    code = "WrongEdgeClass"


class InvalidSourceState(MorseflowError):
    code = "InvalidSourceState"


class ValueConflict(MorseflowError):
    code = "ValueConflict"


class InfeasibleInterval(MorseflowError):
    code = "InfeasibleInterval"


class NotAdjacent(MorseflowError):
    code = "NotAdjacent"


class DegenerateCancellation(MorseflowError):
    code = "DegenerateCancellation"


class BoundaryCancellation(MorseflowError):
    code = "BoundaryCancellation"


class DuplicateValues(MorseflowError):
    code = "DuplicateValues"


class DuplicateValue(MorseflowError):
    code = "DuplicateValue"


class ValueOrderViolation(MorseflowError):
    code = "ValueOrderViolation"


class NotEligible(MorseflowError):
    code = "NotEligible"


class NothingToUndo(MorseflowError):
    code = "NothingToUndo"


class NothingToRedo(MorseflowError):
    code = "NothingToRedo"


class ParseError(MorseflowError):
    code = "ParseError"


class SchemaVersionError(MorseflowError):
    code = "SchemaVersionError"


class SeedOutsideDomain(MorseflowError):
    code = "SeedOutsideDomain"


class NoNearbySeparatrix(MorseflowError):
    code = "NoNearbySeparatrix"

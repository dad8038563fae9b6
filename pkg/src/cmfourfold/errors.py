"""Exception hierarchy shared by all modules."""


class CMError(Exception):
    """Base class for every error raised by this package."""


class AlgebraMismatch(CMError):
    pass


class NotInvertible(CMError, ZeroDivisionError):
    def __init__(self, factor):
        super().__init__(f"element is zero in factor {factor}")
        self.factor = factor


class CannotCertifySign(CMError):
    def __init__(self, embedding, cap):
        super().__init__(
            f"could not certify the sign at embedding {embedding} "
            f"within {cap} bits (value may be zero)")
        self.embedding = embedding
        self.cap = cap


class NotTotallyReal(CMError):
    pass


class NotFound(CMError):
    def __init__(self, what, searched):
        super().__init__(f"{what}: nothing found after {searched} candidates")
        self.searched = searched


class QuadraticNotContained(CMError):
    pass


class WrongDimension(CMError):
    pass


class DimensionMismatch(CMError):
    pass


class DegeneratePairing(CMError):
    pass


class SingularPolarization(CMError):
    pass


class InvalidCMType(CMError):
    def __init__(self, report):
        super().__init__("; ".join(report.violations))
        self.report = report


class ParseError(CMError, ValueError):
    def __init__(self, message, text, position):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


class StageError(CMError):
    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause

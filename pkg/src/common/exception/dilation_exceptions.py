# src\common\exception\dilation_exceptions.py

from src.common.exception.custom_exception import CustomException


class InvalidInput(CustomException):
    """Malformed, non-finite or dimensionally inconsistent input."""
    default_identity = "input_schema"


class NotPositive(CustomException):
    """A matrix expected to be positive semidefinite has a negative eigenvalue beyond tolerance."""
    default_identity = "psd_spectrum"


class NotPartialIsometry(CustomException):
    default_identity = "partial_isometry"


class NotCommuting(CustomException):
    """The two CP maps do not commute (Choi residual above tolerance)."""
    default_identity = "cp_commutation"


class CoisometryCheckFailed(CustomException):
    default_identity = "coisometry_identity"


class NotStronglyCommuting(CustomException):
    default_identity = "kernel_dimensions"


class ConstructionFailed(CustomException):
    """A construction stage produced an object violating one of its contracts."""
    default_identity = "construction"


class TooLarge(CustomException):
    default_identity = "size_cap"


class InvalidFlip(CustomException):
    default_identity = "flip_unitarity"


class NotContractive(CustomException):
    default_identity = "row_contraction"


# exit code 2 in the CLI; every other CustomException is a verification failure
INPUT_ERRORS = (InvalidInput, InvalidFlip, TooLarge, NotContractive)

"""Các lỗi miền; tất cả đều là ValueError để nơi gọi cũ vẫn bắt được."""
from __future__ import annotations


class SimpcalcError(ValueError):
    pass


class ShapeMismatchError(SimpcalcError):
    pass


class InvalidPresheafError(SimpcalcError):
    pass


class InvalidMapError(SimpcalcError):
    pass


class IllegalSpecError(SimpcalcError):
    pass


class MissingCertificateError(SimpcalcError):
    pass


class BoundExceededError(SimpcalcError):
    pass


class NotInnerFibrationError(SimpcalcError):
    pass


class NotQuasiCategoryError(SimpcalcError):
    pass


class NotCartesianFibrationError(SimpcalcError):
    pass


class NotConstantError(SimpcalcError):
    pass


class InvalidCategoryError(SimpcalcError):
    pass


class UnknownSuiteError(SimpcalcError):
    pass

"""Exception hierarchy shared by every module.

Each error carries the name of the module that raised it and the parameters
that were in play, so the CLI can emit a machine-readable error record.
"""
from __future__ import annotations


class ConeMorseError(Exception):
    """Base class for all library errors."""

    module = "conemorse"

    def __init__(self, message: str, **params):
        super().__init__(message)
        self.params = params

    def record(self) -> dict:
        return {
            "error": type(self).__name__,
            "module": self.module,
            "message": str(self),
            "params": {k: _plain(v) for k, v in self.params.items()},
        }


def _plain(value):
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    try:
        return float(value)
    except (TypeError, ValueError):
        return repr(value)


class InvalidParameterError(ConeMorseError, ValueError):
    pass


class StepSizeUnderflowError(ConeMorseError):
    module = "radial_solver"


class NoFirstZeroError(ConeMorseError):
    module = "radial_solver"


class BracketError(ConeMorseError):
    module = "singular_spectrum"


class BoundViolationError(BracketError):
    """A Lane-Emden potential produced a singular eigenvalue at or below -(N-1)."""


class CutoffError(ConeMorseError):
    module = "morse"


class SpectrumFormatError(ConeMorseError, ValueError):
    module = "cap_spectrum"


class NoSignChangeError(ConeMorseError):
    module = "morse"

    def __init__(self, message: str, samples=None, **params):
        super().__init__(message, **params)
        self.samples = samples or []

    def record(self) -> dict:
        rec = super().record()
        rec["samples"] = [[float(x) for x in row] for row in self.samples]
        return rec

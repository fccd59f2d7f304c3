"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    pass


class ResourceLimitError(RuntimeError):
    """Raised when a requested Hilbert-space dimension exceeds the configured cap."""


class LabelNotFoundError(KeyError):
    pass


class LabelingError(RuntimeError):
    """Dressed states could not be assigned the labels an observable needs."""


class DegenerateCircuitError(ValueError):
    pass


class DegenerateDriveError(ZeroDivisionError):
    pass


class FitFailure(RuntimeError):
    """Raised by curve fits that cannot produce a result.

    The ``diagnostics`` dict carries whatever the fitter knew when it gave up.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})

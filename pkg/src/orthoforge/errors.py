"""Exception hierarchy shared by all orthoforge modules."""


class OrthoforgeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(OrthoforgeError, ValueError):
    """An argument lies outside the domain of a geometric formula."""


class DecompositionError(DomainError):
    """A gluing description does not define a valid hexagon decomposition."""


class ResourceCapError(OrthoforgeError, RuntimeError):
    """A search would exceed its configured size cap.

    Raised instead of returning a silently truncated result.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class IncompleteSpectrumError(ResourceCapError):
    """The orthogeodesic search frontier outgrew ``max_queue``."""


class ConvergenceError(OrthoforgeError, RuntimeError):
    """An optimizer hit its iteration cap; ``diagnostics`` says where it stopped."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

"""Exception hierarchy shared across the package."""


class XthmError(Exception):
    """Base class for all solver errors."""


class InvalidArgumentError(XthmError, ValueError):
    """An argument is outside its documented domain."""


class DegenerateGeometryError(XthmError):
    """An element mapping is inverted or collapsed."""


class GeometryConflictError(XthmError):
    """A crack update or crack configuration is geometrically inadmissible."""


class ConfigError(XthmError):
    """A run configuration is malformed or references unknown entities."""

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class OutOfDomainError(XthmError):
    """A query point lies outside the mesh or the enriched zone."""


class NonConvergenceError(XthmError):
    """Newton iteration failed to converge; carries the residual history."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history or []


class IntegrationDomainError(XthmError):
    """A path/domain integral region is clipped by the mesh boundary."""

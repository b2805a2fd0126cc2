"""Exception types shared across modules."""


class UnsupportedBase(ValueError):
    """The degree-0 ring is outside the supported finite-global-dimension cases."""


class CertificateViolation(RuntimeError):
    """A computed certificate failed its own re-check."""


class NotGorensteinInWindow(RuntimeError):
    """The Ext scan did not find exactly one rank-one degree."""

    def __init__(self, message: str, degrees=()):
        super().__init__(message)
        self.degrees = list(degrees)

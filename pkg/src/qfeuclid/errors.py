class QFError(Exception):
    pass


class PreconditionError(QFError, ValueError):
    """Raised when an operation is called outside its domain."""


class FieldError(PreconditionError):
    pass


class SignatureError(PreconditionError):
    pass


class NonCyclicClassGroup(PreconditionError):
    pass


class NotPrincipal(PreconditionError):
    pass


class ClassMismatch(PreconditionError):
    pass


class VerificationError(QFError):
    """A certificate or inequality failed an exact recheck."""

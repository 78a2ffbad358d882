"""Exception hierarchy shared by every qdsp module."""


class QdspError(Exception):
    """Base class for all domain/model errors raised by qdsp."""


class DomainError(QdspError, ValueError):
    pass


class CapExceeded(QdspError):
    """Path enumeration would exceed the configured cap."""


class SizeError(QdspError, ValueError):
    pass


class QubitIndexError(QdspError, IndexError):
    pass


class UnsupportedK(QdspError):
    """The circuit compiler only handles qubit (k <= 2) index registers."""


class WrongGateKind(QdspError, TypeError):
    pass


class MissingEval(QdspError, KeyError):
    pass


class QuadratureFailure(QdspError):
    pass

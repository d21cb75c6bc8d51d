"""Exception hierarchy shared across the package."""


class IttopoError(Exception):
    """Base class for all package errors."""


# --- structure parsing ---

class MissingCell(IttopoError):
    pass


class MissingAtoms(IttopoError):
    pass


class BadSymop(IttopoError):
    pass


class BadNumber(IttopoError):
    pass


class MissingLattice(IttopoError):
    pass


class CountMismatch(IttopoError):
    pass


class TooManyAtoms(IttopoError):
    pass


# --- element clustering ---

class EmptyCorpus(IttopoError):
    pass


class UnknownElement(IttopoError):
    pass


class InsufficientElements(IttopoError):
    pass


# --- filtrations / persistence ---

class TooManyPoints(IttopoError):
    pass


class InvalidFiltration(IttopoError):
    pass


class TooLarge(IttopoError):
    pass


class EmptyCluster(IttopoError):
    pass


# --- featurization / bundle IO ---

class SamePair(IttopoError):
    pass


class BadManifest(IttopoError):
    pass


class ShapeMismatch(IttopoError):
    pass

"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class TelokitError(Exception):
    """Base class for all toolkit errors."""


# --- concept core ---------------------------------------------------------

class UnknownConcept(TelokitError):
    def __init__(self, gid: int):
        super().__init__(f"unknown concept gid {gid}")
        self.gid = gid


class UnknownParent(UnknownConcept):
    pass


class SelfLoop(TelokitError):
    def __init__(self, gid: int):
        super().__init__(f"edge {gid} -> {gid} would be a self loop")
        self.gid = gid


class CycleError(TelokitError):
    """Raised when an edge insertion would close a directed cycle.

    ``path`` is the pre-existing directed path from parent back to child
    that the rejected edge would have closed.
    """

    def __init__(self, child: int, parent: int, path: list[int]):
        super().__init__(
            f"edge {child} -> {parent} closes cycle via {' -> '.join(map(str, path))}"
        )
        self.child = child
        self.parent = parent
        self.path = path


# --- language core --------------------------------------------------------

class UnknownLanguage(TelokitError):
    def __init__(self, key: str):
        super().__init__(f"unknown language {key!r}")
        self.key = key


class EmptyWordList(TelokitError):
    pass


class EmptyGloss(TelokitError):
    pass


class SynsetExists(TelokitError):
    def __init__(self, language: str, gid: int):
        super().__init__(f"synset already exists for ({language}, {gid})")
        self.language = language
        self.gid = gid


# --- annotation pipeline --------------------------------------------------

class BadHeader(TelokitError):
    pass


class BadRow(TelokitError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"row {line}: {reason}")
        self.line = line
        self.reason = reason


class StageMismatch(TelokitError):
    pass


class OutOfOrder(TelokitError):
    pass


class UnknownGid(UnknownConcept):
    pass


class UnresolvedParent(TelokitError):
    def __init__(self, line: int, parent: str):
        super().__init__(f"row {line}: parent {parent!r} does not resolve")
        self.line = line
        self.parent = parent


class TransactionAborted(TelokitError):
    pass


# --- teleontology ---------------------------------------------------------

class UnresolvedName(TelokitError):
    pass


class UnknownName(TelokitError):
    pass


class IllTypedAxiom(TelokitError):
    pass


class UnsupportedConstruct(TelokitError):
    def __init__(self, location: str, detail: str = ""):
        msg = f"unsupported construct at {location}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.location = location
        self.detail = detail


class MalformedDocument(TelokitError):
    pass


# --- catalog --------------------------------------------------------------

class MissingProvenance(TelokitError):
    pass


class DuplicateId(TelokitError):
    def __init__(self, resource_id: str):
        super().__init__(f"resource id {resource_id!r} already exists")
        self.resource_id = resource_id


class NotPending(TelokitError):
    pass


class ApproveWithFailingReport(TelokitError):
    pass


class EmptyRejectionMessage(TelokitError):
    pass


class LicenseDowngrade(TelokitError):
    pass


class IncompatibleComposition(TelokitError):
    def __init__(self, pair: tuple):
        a, b = pair
        super().__init__(f"licenses {a} and {b} cannot be composed")
        self.pair = pair


class UnknownResource(TelokitError):
    def __init__(self, resource_id: str):
        super().__init__(f"unknown resource {resource_id!r}")
        self.resource_id = resource_id


class BadFilter(TelokitError):
    pass


# --- service --------------------------------------------------------------

class BadSheet(TelokitError):
    pass


class UndecidedRows(TelokitError):
    pass

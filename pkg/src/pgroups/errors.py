"""Exception types shared across the workbench."""


class WorkbenchError(Exception):
    """Base class for all errors raised by this package."""


class PcParseError(WorkbenchError):
    """Syntax or validation error in presentation source text."""

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}"
            if col is not None:
                where += f", col {col}"
            where += ": "
        super().__init__(where + message)


class PresentationError(WorkbenchError):
    """Structurally invalid presentation (bad prime, unweighted rule, ...)."""


class InconsistentPresentationError(WorkbenchError):
    """The presentation fails a consistency or associativity check."""


class CollectionBudgetExceeded(WorkbenchError):
    """Collection did not reach a normal form within the step budget."""


class EnumerationCapExceeded(WorkbenchError):
    """The group is too large to enumerate/materialize under the given cap.

    Callers catching this should fall back to a streaming strategy or a
    smaller corpus; it never indicates a wrong answer.
    """


class MixedPresentationError(WorkbenchError):
    """Element arithmetic across two distinct presentation objects."""


class NotASubgroupError(WorkbenchError):
    """An element set expected to be closed under multiplication is not."""


class NotNormalError(WorkbenchError):
    """A subgroup expected to be normal is not."""


class PreconditionError(WorkbenchError):
    """A theorem procedure was invoked outside its hypotheses."""

"""Exception hierarchy for fmconf.

Every error raised by the library derives from :class:`FmconfError` and
carries the CLI exit code the command layer should use: 2 for input and
model errors, 4 for unsatisfiable requirement sets. I/O failures are left
to the standard :class:`OSError` family (exit 3 at the CLI).
"""

from __future__ import annotations


class FmconfError(Exception):
    """Base class for all fmconf errors."""

    exit_code = 2


# ---------------------------------------------------------------------------
# Model construction / validation
# ---------------------------------------------------------------------------

class ModelError(FmconfError):
    """A feature model violates a structural invariant."""


class EmptyHeadSetError(ModelError):
    """An arc has no head features."""


class BadMultiplicityError(ModelError):
    """A multiplicity is inconsistent with its arc's head count."""


class UnknownFeatureError(ModelError):
    """A referenced feature does not exist in the model (or scope)."""


class MultipleParentsError(ModelError):
    """More than one tree arc targets the same feature."""


class CycleError(ModelError):
    """The tree arcs do not form a tree rooted at the declared root."""


class DisconnectedFeatureError(ModelError):
    """A non-root feature has no tree arc attaching it to the tree."""


class DuplicateFeatureNameError(ModelError):
    """Two features share the same token."""


class DuplicateIndexError(ModelError):
    """Two features share the same numeric index."""


class DuplicateHeadError(ModelError):
    """An arc lists the same head feature twice."""


class InvalidTokenError(ModelError):
    """A feature token is empty or contains whitespace."""


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------

class ParseError(FmconfError):
    """Input text could not be parsed. Carries a location when known."""

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f" at line {line}" + (f", column {column}" if column is not None else "")
            message = message + where
        super().__init__(message)


class MalformedDocumentError(ParseError):
    """The XML document is not well formed or lacks required structure."""


class UnknownElementError(ParseError):
    """An element inside the feature tree is not part of the dialect."""


class InputSyntaxError(ParseError):
    """The arc-table text does not match the dialect grammar."""


class UnknownIndexError(ParseError):
    """An arc references a node index the node block does not declare."""


class UnrepresentableError(FmconfError):
    """The model contains a construct the output dialect cannot express."""


# ---------------------------------------------------------------------------
# Enumeration / metrics / self-configuration
# ---------------------------------------------------------------------------

class ScopeTooLargeError(FmconfError):
    """The scope subtree exceeds the enumeration feature cap."""


class NoLayerTagsError(FmconfError):
    """The model carries no layer tags, so a per-layer report is undefined."""


class InvalidRequirementError(FmconfError):
    """A requirement set is internally inconsistent."""


class NoValidConfigurationError(FmconfError):
    """No valid configuration satisfies the requirement set."""

    exit_code = 4

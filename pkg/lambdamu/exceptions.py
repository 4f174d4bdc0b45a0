"""Exceptions for the lambdamu workbench."""

from typing import Any, Dict, Optional


class LambdaMuError(Exception):
    """Base exception for workbench errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        """Initialize the exception.

        Args:
            message: The error message.
            details: Extra structured information about the failure.
        """
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class TermSyntaxError(LambdaMuError):
    """Exception raised when concrete syntax cannot be parsed."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        """Initialize the exception.

        Args:
            message: The error message.
            line: The 1-based line of the offending token.
            column: The 1-based column of the offending token.
        """
        self.line = line
        self.column = column
        if line is not None and column is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message, {"line": line, "column": column})


class NamespaceError(TermSyntaxError):
    """Exception raised when a λ-name is used as a naming tag or vice versa."""

    pass


class TypeSyntaxError(TermSyntaxError):
    """Exception raised when a type or context expression cannot be parsed."""

    pass


class InvalidRedexError(LambdaMuError):
    """Exception raised when a redex reference does not match the term."""

    pass


class SubstitutionError(LambdaMuError):
    """Exception raised for ill-formed head substitutions."""

    pass


class BudgetExceededError(LambdaMuError):
    """Exception raised when a step, node or term-size budget runs out."""

    def __init__(self, message: str, kind: str, trace: Optional[Any] = None):
        """Initialize the exception.

        Args:
            message: The error message.
            kind: Which budget ran out: "steps", "nodes" or "term-size".
            trace: The partial reduction trace, when there is one.
        """
        self.kind = kind
        self.trace = trace
        super().__init__(message, {"kind": kind})


class TypeCheckError(LambdaMuError):
    """Base exception for typing failures."""

    def __init__(self, message: str, path: Optional[tuple] = None):
        """Initialize the exception.

        Args:
            message: The error message.
            path: Position of the offending sub-term.
        """
        self.path = tuple(path or ())
        if self.path:
            message = f"{message} at {'.'.join(s.value for s in self.path)}"
        super().__init__(message, {"path": [s.value for s in self.path]})


class UnboundVariableError(TypeCheckError):
    """Exception raised when a variable has no declaration in the context."""

    pass


class TypeMismatchError(TypeCheckError):
    """Exception raised when two types cannot be unified."""

    pass


class OccursCheckError(TypeCheckError):
    """Exception raised when unification would build an infinite type."""

    pass


class AmbiguousTypeError(TypeCheckError):
    """Exception raised when a derivation keeps unresolved metavariables."""

    pass


class InvalidTraceError(LambdaMuError):
    """Exception raised when a reduction trace does not replay."""

    def __init__(self, message: str, index: Optional[int] = None):
        """Initialize the exception.

        Args:
            message: The error message.
            index: Index of the first step that fails to replay.
        """
        self.index = index
        super().__init__(message, {"index": index})


class NotStandardError(LambdaMuError):
    """Exception raised when no standard decomposition of a trace exists."""

    pass


class VerdictError(LambdaMuError):
    """Exception raised when a quantity needs strong normalization but the term diverges."""

    pass


class UnknownVerdictError(VerdictError):
    """Exception raised when exploration stopped before a verdict was reached."""

    pass

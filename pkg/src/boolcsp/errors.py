"""Exception hierarchy shared by every module.

The CLI maps these onto its exit-code contract: InputError and its
subclasses exit 20, unsatisfiable/no-certificate outcomes exit 10,
anything else exits 1.
"""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class for all errors raised by this package."""


class InputError(WorkbenchError):
    """Malformed input: bad syntax, wrong arity, violated preconditions."""


class ParseError(InputError):
    """Syntax error in a formula or file, with a position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ArityCapError(InputError):
    """Arity exceeds the fixed caps (functions 4, relations 16)."""


class DegenerateRelationError(InputError):
    """An empty relation was handed to an operation that rejects them."""


class WrongClassError(InputError):
    """An engine was invoked on an instance outside its relation class."""


class NoGadgetError(InputError):
    """No relation in the set admits the requested unit-pinning gadget."""


class DefinitionMismatchError(InputError):
    """A conjunctive definition does not define the relation it claims to."""


class ResourceBudgetError(WorkbenchError):
    """A configured enumeration budget was exceeded; names the bound."""


class EncodingViolationError(WorkbenchError):
    """A decoded object breaks the encoding contract (e.g. a path not in its tree)."""


class LemmaFalsifiedError(WorkbenchError):
    """An exhaustive case split that must cover all inputs found none; internal."""

"""Exception types shared across the engines and the parsing surface."""


class TransfiniteError(Exception):
    """Base class for all workbench errors."""


class MissingOracleError(TransfiniteError):
    """An oracle query instruction was executed with no oracle supplied."""


class UncertifiedLimitError(TransfiniteError):
    """A limit stage was requested but only heuristic evidence exists."""


class OrdinalBoundExceededError(TransfiniteError):
    """An ordinal argument fell outside the configured search range."""


class NotStabilizedError(TransfiniteError):
    """A trial-and-error value sequence did not settle within budget."""


class BudgetExceededError(TransfiniteError):
    """A helper run exhausted its step budget before reaching a verdict."""


class AmbiguousBranchError(TransfiniteError):
    """A validated-mode interval straddles zero at a branch or denominator."""


class MachineDefinitionError(TransfiniteError):
    """A program value violates its structural invariants."""

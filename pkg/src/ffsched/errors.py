"""Exception hierarchy with stable error categories for the CLI."""


class FfschedError(Exception):
    """Base class; `category` is the machine-readable token printed by the CLI."""

    category = "internal"


class OutOfRangeError(FfschedError):
    """A quantized input fell outside its universe of discourse."""

    category = "out-of-range"


class DegenerateSetError(FfschedError):
    """A fuzzy set with no support where positive mass is required."""

    category = "degenerate-set"


class TableError(FfschedError):
    """A look-up table violating its range or monotonicity invariants."""

    category = "bad-table"


class InfeasibleLoadError(FfschedError):
    """Utilization target not achievable by rescaling the control tasks."""

    category = "infeasible-load"


class ScenarioSyntaxError(FfschedError):
    category = "scenario-syntax"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ScenarioSemanticError(FfschedError):
    """A well-formed scenario that violates a configuration invariant."""

    category = "scenario-semantic"


class EmitError(FfschedError):
    """Trace or report output could not be written."""

    category = "io"

"""Exception hierarchy.

Exit-code contract used by the CLI:

* parse and domain errors (bad input, bad hypotheses on data, numerical
  failures such as singular shifts or non-convergence)  -> exit 2
* hypothesis-unmet skips (a check whose mathematical preconditions do
  not hold; not a failure)                               -> exit 3
* theory violations (a proved statement contradicted numerically; the
  most serious failure, it indicates a solver or tolerance bug)
                                                         -> exit 4
"""


class MMStabError(Exception):
    """Base class for all package errors."""


class DomainError(MMStabError):
    """Input violates a documented precondition (e.g. negative entry in H)."""


class ParseError(MMStabError):
    """Problem file could not be parsed; carries line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)


class SizeError(DomainError):
    """Dimension exceeds an enumeration guard."""


class EigenConvergenceError(MMStabError):
    """QR iteration exhausted its budget; result would be ill-conditioned."""


class SingularShiftError(MMStabError):
    """Shift too close to the spectrum for a resolvent solve."""

    def __init__(self, message: str, condition_estimate: float | None = None):
        self.condition_estimate = condition_estimate
        if condition_estimate is not None:
            message += f" (estimated condition number {condition_estimate:.3e})"
        super().__init__(message)


class FlowDivergenceError(MMStabError):
    """Flow trajectory left the divergence guard |lambda| <= 1e6 * ||H||."""


class HypothesisNotMet(MMStabError):
    """A check was requested whose mathematical hypotheses do not hold.

    This is a skip signal, not a failure: the statement under test says
    nothing about the given input.
    """


class NotGeometricallySimple(HypothesisNotMet):
    """Zero eigenvalue of A has geometric multiplicity > 1.

    No rank-one perturbation of such an A is strictly positive stable,
    and the Perron machinery (NZP, clause checks) is undefined.
    """


class TheoryViolationError(MMStabError):
    """A numerically checked theorem failed; carries a diagnostic dump."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        self.diagnostics = dict(diagnostics or {})
        if self.diagnostics:
            detail = "\n".join(f"  {k}: {v}" for k, v in self.diagnostics.items())
            message = f"{message}\ndiagnostics:\n{detail}"
        super().__init__(message)

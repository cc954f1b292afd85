"""Exception hierarchy shared by the services, handlers and CLI."""

from typing import Iterable


class AnsfdError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidParameterError(AnsfdError, ValueError):
    """A parameter is outside its admissible range (eta, h, gain, span...)."""


class WindowUnderflowError(AnsfdError):
    """A slope estimate was requested before the history window was full."""

    def __init__(self, have: int, need: int):
        super().__init__(f"history window holds {have} samples, {need} required")
        self.have = have
        self.need = need


class InvalidStateError(AnsfdError):
    """State vectors or right-hand side outputs have inconsistent dimensions."""


class DivergenceError(AnsfdError):
    """An integration left the admissible range.

    Attributes
    ----------
    step_index : int
        Index of the first sample whose magnitude exceeded the guard.
    value : float
        Offending magnitude (may be ``inf`` or ``nan``).
    """

    def __init__(self, step_index: int, value: float):
        super().__init__(f"integration diverged at step {step_index} (|y| = {value:.3g})")
        self.step_index = step_index
        self.value = value


class BracketError(AnsfdError):
    """A stability bracket does not straddle the stable/unstable boundary."""


class UnknownProblemError(AnsfdError):
    """The requested problem name is not in the catalog."""

    def __init__(self, name: str, known: Iterable[str]):
        self.name = name
        self.known = list(known)
        super().__init__(f"unknown problem '{name}'; available: {', '.join(self.known)}")


class SchemeParseError(AnsfdError):
    """A compact scheme string could not be parsed."""


class OrderStudyError(AnsfdError):
    """A run diverged while measuring the observed order of convergence."""

    def __init__(self, h: float, cause: DivergenceError):
        super().__init__(f"run with h={h!r} diverged at step {cause.step_index}")
        self.h = h
        self.cause = cause

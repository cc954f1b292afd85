"""Initial-value problems, input signals and analytic references."""

from dataclasses import dataclass, replace
from typing import Callable, Protocol
import math

import numpy as np

from ansfd.errors import InvalidParameterError, InvalidStateError, UnknownProblemError

Rhs = Callable[[np.ndarray, float], np.ndarray]
Reference = Callable[[float], np.ndarray]


class InputSignal(Protocol):
    def value(self, t: float, sample_index: int) -> float: ...


@dataclass(frozen=True)
class ZeroInput:
    def value(self, t: float, sample_index: int) -> float:
        return 0.0


@dataclass(frozen=True)
class ConstantInput:
    c: float

    def value(self, t: float, sample_index: int) -> float:
        return float(self.c)


@dataclass(frozen=True)
class StepInput:
    t_on: float
    level: float

    def value(self, t: float, sample_index: int) -> float:
        return float(self.level) if t >= self.t_on else 0.0


@dataclass(frozen=True)
class SinusoidInput:
    amplitude: float
    angular_frequency: float
    phase: float = 0.0

    def value(self, t: float, sample_index: int) -> float:
        return self.amplitude * math.sin(self.angular_frequency * t + self.phase)


@dataclass(frozen=True)
class NoisyInput:
    """
    Base signal plus Gaussian noise keyed on ``(seed, sample_index)``.

    The noise does not depend on call order or on ``t``: two trajectories with
    different step sizes see the same noise sequence sample by sample.
    """

    base: InputSignal
    sigma: float
    seed: int

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise InvalidParameterError(f"noise sigma must be >= 0, got {self.sigma}")
        if self.seed < 0:
            raise InvalidParameterError(f"noise seed must be >= 0, got {self.seed}")

    def value(self, t: float, sample_index: int) -> float:
        return self.base.value(t, sample_index) + self.sigma * gaussian(self.seed, sample_index)


def gaussian(seed: int, sample_index: int) -> float:
    """Standard normal draw determined by ``(seed, sample_index)`` only."""
    return float(np.random.default_rng([int(seed), int(sample_index)]).standard_normal())


def eval_input(signal: InputSignal, t: float, sample_index: int) -> float:
    """Value of ``u`` at time ``t`` for sample number ``sample_index``."""
    return signal.value(t, sample_index)


@dataclass(frozen=True)
class OdeProblem:
    """
    First-order initial-value problem ``y' = f(y, u(t))``, ``y(0) = y0``.

    Attributes
    ----------
    name : str
        Stable identifier, addressable from the CLI.
    rhs : Callable
        ``f(y, u)`` acting on a 1-D state array.
    input : InputSignal
        The ``u(t)`` signal.
    y0 : numpy.ndarray
        Initial condition.
    t_final : float
        Integration horizon.
    reference : Callable | None
        Analytic solution ``t -> y(t)`` when known.
    """

    name: str
    rhs: Rhs
    input: InputSignal
    y0: np.ndarray
    t_final: float
    reference: Reference | None = None

    @property
    def dim(self) -> int:
        return int(np.size(self.y0))


def eval_rhs(problem: OdeProblem, y, t: float, sample_index: int) -> np.ndarray:
    """
    Evaluate ``f(y, u(t))`` with the problem's input signal.

    Raises
    ------
    InvalidStateError
        If ``y`` or the returned derivative does not match ``y0`` in size.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape != (problem.dim,):
        raise InvalidStateError(f"{problem.name}: state has shape {y.shape}, expected ({problem.dim},)")
    out = np.atleast_1d(np.asarray(problem.rhs(y, eval_input(problem.input, t, sample_index)), dtype=float))
    if out.shape != (problem.dim,):
        raise InvalidStateError(f"{problem.name}: rhs returned shape {out.shape}, expected ({problem.dim},)")
    return out


def with_input(problem: OdeProblem, signal: InputSignal) -> OdeProblem:
    """Copy of ``problem`` driven by ``signal``; the reference is kept only for zero input."""
    reference = problem.reference if isinstance(signal, ZeroInput) else None
    return replace(problem, input=signal, reference=reference)


def _scalar(value: float) -> np.ndarray:
    return np.array([value], dtype=float)


def linear_gain5(signal: InputSignal | None = None) -> OdeProblem:
    """``y' = 5 y + u``, ``y(0) = 1`` over ``[0, 0.5]``."""
    problem = OdeProblem(
        name="linear_gain5",
        rhs=lambda y, u: 5.0 * y + u,
        input=ZeroInput(),
        y0=_scalar(1.0),
        t_final=0.5,
        reference=lambda t: _scalar(math.exp(5.0 * t)),
    )
    return with_input(problem, signal) if signal is not None else problem


def dahlquist(lam: float, t_final: float = 1.0, y0: float = 1.0) -> OdeProblem:
    """Dahlquist test equation ``y' = lam * y``."""
    return OdeProblem(
        name=f"dahlquist:{lam:g}",
        rhs=lambda y, u: lam * y,
        input=ZeroInput(),
        y0=_scalar(y0),
        t_final=t_final,
        reference=lambda t: _scalar(y0 * math.exp(lam * t)),
    )


def noisy_dahlquist(lam: float, sigma: float = 0.1, seed: int = 0, t_final: float = 1.0) -> OdeProblem:
    """``y' = lam * y + u`` with zero-mean noisy input; no analytic reference."""
    return OdeProblem(
        name=f"noisy_dahlquist:{lam:g}",
        rhs=lambda y, u: lam * y + u,
        input=NoisyInput(ZeroInput(), sigma, seed),
        y0=_scalar(1.0),
        t_final=t_final,
    )


def logistic(y0: float = 0.1, t_final: float = 10.0) -> OdeProblem:
    def reference(t: float) -> np.ndarray:
        grow = math.exp(t)
        return _scalar(y0 * grow / (1.0 - y0 + y0 * grow))

    return OdeProblem(
        name="logistic",
        rhs=lambda y, u: y * (1.0 - y),
        input=ZeroInput(),
        y0=_scalar(y0),
        t_final=t_final,
        reference=reference,
    )


def zero_rhs() -> OdeProblem:
    return OdeProblem(
        name="zero_rhs",
        rhs=lambda y, u: np.zeros_like(y),
        input=ZeroInput(),
        y0=_scalar(1.0),
        t_final=1.0,
        reference=lambda t: _scalar(1.0),
    )


def constant_drift() -> OdeProblem:
    return OdeProblem(
        name="constant_drift",
        rhs=lambda y, u: np.ones_like(y),
        input=ZeroInput(),
        y0=_scalar(0.0),
        t_final=1.0,
        reference=lambda t: _scalar(t),
    )


DAHLQUIST_RATES = (-1.0, -10.0, -100.0)


def catalog() -> list[OdeProblem]:
    """The named problems shipped with the toolkit."""
    problems = [linear_gain5()]
    problems += [dahlquist(lam) for lam in DAHLQUIST_RATES]
    problems.append(logistic())
    problems += [noisy_dahlquist(lam) for lam in DAHLQUIST_RATES]
    problems += [zero_rhs(), constant_drift()]
    return problems


def resolve_problem(name: str, seed: int | None = None) -> OdeProblem:
    """
    Look up a problem by name.

    ``dahlquist:<lam>`` and ``noisy_dahlquist:<lam>`` accept any real rate.
    ``seed`` replaces the noise seed of noisy problems.

    Raises
    ------
    UnknownProblemError
        If the name matches nothing in the catalog.
    """
    name = (name or "").strip()
    family, _, arg = name.partition(":")
    problem: OdeProblem | None = None
    if family in ("dahlquist", "noisy_dahlquist") and arg:
        try:
            lam = float(arg)
        except ValueError:
            lam = math.nan
        if math.isfinite(lam):
            problem = dahlquist(lam) if family == "dahlquist" else noisy_dahlquist(lam)
    else:
        problem = next((p for p in catalog() if p.name == name), None)
    if problem is None:
        raise UnknownProblemError(name, [p.name for p in catalog()])
    if seed is not None and isinstance(problem.input, NoisyInput):
        problem = replace(problem, input=replace(problem.input, seed=int(seed)))
    return problem

"""Fixed-step time integration: classical baselines and the two A-NSFD schemes.

Every scheme sits behind the :class:`Stepper` contract (``prime`` then
``advance`` once per step) so that :func:`integrate` drives all of them the
same way.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from ansfd.errors import DivergenceError, InvalidParameterError
from ansfd.services.estimator import (
    EstimatorCoefficients,
    HistoryWindow,
    estimate_slope,
    make_coefficients,
)
from ansfd.services.problems import NoisyInput, OdeProblem, eval_rhs
from ansfd.services.scheme_spec import BASELINE_KINDS, DeltaMode, SchemeSpec, format_scheme

logger = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e12


@dataclass(frozen=True)
class TrajectoryMeta:
    scheme: str
    h: float
    seed: int | None
    problem: str


@dataclass
class SlopeDiagnostics:
    """Counters exposed by the RK-like stepper.

    Attributes
    ----------
    flat_count : int
        Slope estimates forced to zero because the delta span collapsed.
    last_slope : numpy.ndarray | None
        The most recent ``a1`` estimate (one entry per state component).
    """

    flat_count: int = 0
    last_slope: np.ndarray | None = None


@dataclass
class Trajectory:
    times: np.ndarray
    values: np.ndarray
    meta: TrajectoryMeta
    diagnostics: SlopeDiagnostics = field(default_factory=SlopeDiagnostics)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def y(self) -> np.ndarray:
        """Values of a scalar trajectory as a 1-D array."""
        return self.values[:, 0] if self.values.shape[1] == 1 else self.values

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]


def time_grid(t_final: float, h: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Sample times and step sizes covering ``[0, t_final]``.

    Full steps have size exactly ``h``; a shorter last step lands on
    ``t_final`` when ``h`` does not divide the horizon.

    Returns
    -------
    tuple[numpy.ndarray, numpy.ndarray]
        ``times`` (``n + 1`` entries) and ``steps`` (``n`` entries).
    """
    if not h > 0 or not math.isfinite(h):
        raise InvalidParameterError(f"h must be positive, got {h!r}")
    if h > t_final * (1.0 + 1e-12):
        raise InvalidParameterError(f"h={h!r} exceeds the horizon t_final={t_final!r}")
    n_full = int(math.floor(t_final / h + 1e-9))
    times = np.arange(n_full + 1, dtype=float) * h
    steps = np.full(n_full, h, dtype=float)
    remainder = t_final - n_full * h
    if remainder > 1e-9 * h:
        times = np.append(times, t_final)
        steps = np.append(steps, remainder)
    else:
        times[-1] = t_final
    return times, steps


def _guard(y: np.ndarray, index: int) -> np.ndarray:
    magnitude = float(np.max(np.abs(y))) if y.size else 0.0
    if not math.isfinite(magnitude) or magnitude > DIVERGENCE_LIMIT:
        raise DivergenceError(index, magnitude)
    return y


def step_baseline(kind: str, problem: OdeProblem, y_k, t_k: float, h: float, sample_index: int = 0) -> np.ndarray:
    """
    One step of a classical explicit scheme.

    Parameters
    ----------
    kind : {"explicit_euler", "rk2_midpoint", "rk4_classic"}
        Scheme selector.
    problem : OdeProblem
        Problem supplying ``f`` and ``u``.
    y_k : array_like
        Current state.
    t_k : float
        Current time.
    h : float
        Step size.
    sample_index : int, optional
        Index ``k`` used to key noisy inputs; every stage of the step shares it.

    Returns
    -------
    numpy.ndarray
        The state at ``t_k + h``.
    """
    if not h > 0:
        raise InvalidParameterError(f"h must be positive, got {h!r}")
    y = np.atleast_1d(np.asarray(y_k, dtype=float))
    f = lambda state, t: eval_rhs(problem, state, t, sample_index)  # noqa: E731

    if kind == "explicit_euler":
        return y + h * f(y, t_k)
    if kind == "rk2_midpoint":
        y_mid = y + 0.5 * h * f(y, t_k)
        return y + h * f(y_mid, t_k + 0.5 * h)
    if kind == "rk4_classic":
        k1 = f(y, t_k)
        k2 = f(y + 0.5 * h * k1, t_k + 0.5 * h)
        k3 = f(y + 0.5 * h * k2, t_k + 0.5 * h)
        k4 = f(y + h * k3, t_k + h)
        return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    raise InvalidParameterError(f"{kind!r} is not a baseline scheme")


def _bootstrap(problem: OdeProblem, times: np.ndarray, steps: np.ndarray, count: int, method: str) -> list[np.ndarray]:
    kind = "rk4_classic" if method == "rk4" else "explicit_euler"
    samples = [np.atleast_1d(np.asarray(problem.y0, dtype=float)).copy()]
    for k in range(count):
        nxt = step_baseline(kind, problem, samples[-1], float(times[k]), float(steps[k]), k)
        samples.append(_guard(nxt, k + 1))
    return samples


def bootstrap_window(problem: OdeProblem, h: float, eta: int, method: str = "euler") -> tuple[HistoryWindow, Trajectory]:
    """
    Produce ``y_0 .. y_{eta-1}`` with a classical scheme and prime the window.

    The first E-A-NSFD solve then targets ``y_eta``.
    """
    if eta < 1:
        raise InvalidParameterError(f"eta must be >= 1, got {eta}")
    if not h > 0:
        raise InvalidParameterError(f"h must be positive, got {h!r}")
    times = np.arange(eta, dtype=float) * h
    steps = np.full(max(eta - 1, 0), h, dtype=float)
    samples = _bootstrap(problem, times, steps, eta - 1, method)
    window = HistoryWindow(eta + 1, samples)
    partial = Trajectory(
        times=times,
        values=np.stack(samples),
        meta=TrajectoryMeta(scheme=f"bootstrap:{method}", h=h, seed=None, problem=problem.name),
    )
    return window, partial


def step_euler_ansfd(
    coeffs: EstimatorCoefficients, window: HistoryWindow, rhs_value, step_ratio: float = 1.0
) -> np.ndarray | float:
    """
    Solve the E-A-NSFD relation for the next sample.

    The window holds ``y_{k-eta+1} .. y_k``; the relation
    ``scale * (w_eta y_{k+1} + sum_{j<eta} w_j y_j) = rhs_value * step_ratio``
    is linear in ``y_{k+1}``. ``step_ratio`` is ``phi(h) / h`` for a
    generalized denominator.
    """
    past = window.latest(coeffs.eta)
    pattern = coeffs.pattern
    # offsets from y_k so that a constant window with zero rhs stays exactly constant
    y_k = past[-1]
    offsets = past - y_k
    weighted = np.tensordot(pattern[:-1], offsets, axes=1)
    drive = np.asarray(rhs_value, dtype=float) * step_ratio / (coeffs.scale * coeffs.h)
    return y_k + (drive - weighted) / pattern[-1]


def delta_span(mode: DeltaMode, h: float, y_k: float, f_k: float) -> tuple[float, float, bool]:
    """Resolved ``(delta_min, delta_max, collapsed)`` for one state component."""
    if mode.delta_max is not None:
        return mode.delta_min, mode.delta_max, False
    eps = 1e-12 * max(1.0, abs(y_k))
    excursion = h * abs(f_k)
    return mode.delta_min, mode.delta_min + max(excursion, eps), not excursion > eps


def sample_deltas(mode: DeltaMode, eta: int, h: float, y_k: float, f_k: float, rng: np.random.Generator | None = None) -> np.ndarray:
    """
    Place the ``eta + 1`` perturbations of the RK-like slope estimate.

    ``regular_grid`` spaces them evenly on the span; ``random_uniform`` draws
    them i.i.d. uniform and sorts them ascending.
    """
    if eta < 1:
        raise InvalidParameterError(f"eta must be >= 1, got {eta}")
    lo, hi, _ = delta_span(mode, h, y_k, f_k)
    if mode.kind == "regular_grid":
        return lo + np.arange(eta + 1, dtype=float) * ((hi - lo) / eta)
    if rng is None:
        raise InvalidParameterError("random_uniform deltas need a random generator")
    return np.sort(rng.uniform(lo, hi, size=eta + 1))


def step_rk_ansfd(
    spec: SchemeSpec,
    problem: OdeProblem,
    y_k,
    t_k: float,
    h: float,
    rng: np.random.Generator | None = None,
    *,
    sample_index: int = 0,
    diagnostics: SlopeDiagnostics | None = None,
) -> np.ndarray:
    """
    One RK-A-NSFD step: algebraic slope of ``f`` in ``y``, prediction, correction.

    The slope ``a1`` of ``f`` is estimated from ``f(y_k + delta_j)``; the
    prediction is ``y_k + h/2 (f(y_k) + h a1)`` and the correction
    ``y_k + phi(h) f(y_mid)``. Vector states perturb one component at a
    time, each with its own delta sequence scaled to that component's
    excursion.
    """
    y = np.atleast_1d(np.asarray(y_k, dtype=float))
    f_k = eval_rhs(problem, y, t_k, sample_index)
    eta = spec.eta

    slope = np.zeros(y.size)
    for i in range(y.size):
        lo, hi, collapsed = delta_span(spec.delta, h, float(y[i]), float(f_k[i]))
        deltas = sample_deltas(spec.delta, eta, h, float(y[i]), float(f_k[i]), rng)
        if collapsed:
            if diagnostics is not None:
                diagnostics.flat_count += 1
            logger.debug("flat f near y=%g at t=%g; slope forced to zero", y[i], t_k)
            continue
        # only component i is perturbed: a1 is the diagonal of the Jacobian
        shift = np.zeros(y.size)
        f_samples = []
        for d in deltas:
            shift[i] = d
            f_samples.append(eval_rhs(problem, y + shift, t_k, sample_index)[i])
        spacing = h if spec.weights_on_h else (hi - lo) / eta
        coeffs = make_coefficients(eta, spacing, spec.gain)
        slope[i] = estimate_slope(coeffs, HistoryWindow(eta + 1, f_samples))
    if diagnostics is not None:
        diagnostics.last_slope = slope.copy()

    y_mid = y + 0.5 * h * (f_k + h * slope)
    f_mid = eval_rhs(problem, y_mid, t_k + 0.5 * h, sample_index)
    return y + spec.denominator(h) * f_mid


class Stepper(ABC):
    """Single-run stepping state. One instance per integration, never shared."""

    def __init__(self, spec: SchemeSpec):
        self.spec = spec
        self.diagnostics = SlopeDiagnostics()

    def prime(self, problem: OdeProblem, times: np.ndarray, steps: np.ndarray) -> list[np.ndarray]:
        """Initial samples; the default is ``[y0]``."""
        return [np.atleast_1d(np.asarray(problem.y0, dtype=float)).copy()]

    @abstractmethod
    def advance(self, problem: OdeProblem, y_k: np.ndarray, t_k: float, h: float, k: int) -> np.ndarray:
        """Return ``y_{k+1}``."""


class BaselineStepper(Stepper):
    def advance(self, problem, y_k, t_k, h, k):
        return step_baseline(self.spec.kind, problem, y_k, t_k, h, k)


class EulerAnsfdStepper(Stepper):
    def __init__(self, spec: SchemeSpec):
        super().__init__(spec)
        self._coeffs: dict[float, EstimatorCoefficients] = {}
        self.window = HistoryWindow(spec.eta + 1)

    def prime(self, problem, times, steps):
        count = min(self.spec.eta - 1, len(steps))
        samples = _bootstrap(problem, times, steps, count, self.spec.bootstrap)
        for sample in samples:
            self.window.push(sample)
        return samples

    def coefficients(self, h: float) -> EstimatorCoefficients:
        if h not in self._coeffs:
            self._coeffs[h] = make_coefficients(self.spec.eta, h, self.spec.gain)
        return self._coeffs[h]

    def advance(self, problem, y_k, t_k, h, k):
        rhs = eval_rhs(problem, y_k, t_k, k)
        ratio = self.spec.denominator(h) / h
        y_next = np.atleast_1d(step_euler_ansfd(self.coefficients(h), self.window, rhs, ratio))
        self.window.push(y_next)
        return y_next


class RkAnsfdStepper(Stepper):
    def __init__(self, spec: SchemeSpec):
        super().__init__(spec)
        self.rng = np.random.default_rng(spec.seed) if spec.needs_seed else None

    def advance(self, problem, y_k, t_k, h, k):
        return step_rk_ansfd(
            self.spec, problem, y_k, t_k, h, self.rng, sample_index=k, diagnostics=self.diagnostics
        )


def make_stepper(spec: SchemeSpec) -> Stepper:
    if spec.kind in BASELINE_KINDS:
        return BaselineStepper(spec)
    if spec.kind == "euler_ansfd":
        return EulerAnsfdStepper(spec)
    return RkAnsfdStepper(spec)


def integrate(problem: OdeProblem, spec: SchemeSpec, h: float) -> Trajectory:
    """
    March ``problem`` from ``0`` to ``t_final`` with fixed step ``h``.

    Raises
    ------
    InvalidParameterError
        If ``h <= 0`` or ``h > t_final``.
    DivergenceError
        As soon as a sample is non-finite or exceeds ``1e12`` in magnitude;
        carries the index of that sample.
    """
    times, steps = time_grid(problem.t_final, h)
    stepper = make_stepper(spec)
    history = stepper.prime(problem, times, steps)
    for k in range(len(history) - 1, len(steps)):
        y_next = stepper.advance(problem, history[k], float(times[k]), float(steps[k]), k)
        history.append(_guard(np.atleast_1d(y_next), k + 1))

    seed = spec.seed
    if seed is None and isinstance(problem.input, NoisyInput):
        seed = problem.input.seed
    logger.debug("integrated %s with %s, h=%g, %d steps", problem.name, format_scheme(spec), h, len(steps))
    return Trajectory(
        times=times,
        values=np.stack(history),
        meta=TrajectoryMeta(scheme=format_scheme(spec), h=float(h), seed=seed, problem=problem.name),
        diagnostics=stepper.diagnostics,
    )

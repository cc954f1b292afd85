"""Error norms, observed orders, stability thresholds and noise studies."""

from dataclasses import dataclass
from typing import Callable, Sequence
import logging
import math

import numpy as np

from ansfd.errors import BracketError, DivergenceError, InvalidParameterError, OrderStudyError
from ansfd.services.estimator import GainMode, calibrated_gain, make_coefficients, sign_split
from ansfd.services.problems import OdeProblem, dahlquist
from ansfd.services.scheme_spec import SchemeSpec
from ansfd.services.schemes import Trajectory, integrate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ErrorReport:
    linf: float
    l2: float
    final_error: float


@dataclass(frozen=True)
class OrderEstimate:
    """
    Observed convergence order from final errors on a refinement sequence.

    Attributes
    ----------
    h_values : tuple[float, ...]
        Decreasing step sizes.
    errors : tuple[float, ...]
        Final error for each step size.
    pairwise_orders : tuple[float, ...]
        ``log(e_i / e_{i+1}) / log(h_i / h_{i+1})``; ``nan`` where an error is zero.
    summary_order : float | None
        Median of the finite pairwise orders, ``None`` when no order is defined.
    """

    h_values: tuple[float, ...]
    errors: tuple[float, ...]
    pairwise_orders: tuple[float, ...]
    summary_order: float | None


@dataclass(frozen=True)
class NoiseRow:
    eta: int
    algebraic_std: float
    two_point_std: float
    analytic_std: float


@dataclass(frozen=True)
class GainRow:
    eta: int
    gain: float
    positive: int
    zero: int
    negative: int


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    eta: int
    h: float
    status: str
    final_value: float
    final_error: float
    linf: float
    l2: float


def error_norm(traj: Trajectory, reference: Callable[[float], np.ndarray]) -> ErrorReport:
    """Max, grid-weighted L2 (``sqrt(h * sum e_k**2)``) and final errors against ``reference``."""
    refs = np.stack([np.atleast_1d(np.asarray(reference(float(t)), dtype=float)) for t in traj.times])
    errors = np.linalg.norm(traj.values - refs, axis=1)
    return ErrorReport(
        linf=float(np.max(errors)),
        l2=float(math.sqrt(traj.meta.h * float(np.sum(errors**2)))),
        final_error=float(errors[-1]),
    )


def observed_order(problem: OdeProblem, spec: SchemeSpec, h_values: Sequence[float]) -> OrderEstimate:
    """
    Integrate at each step size and estimate the convergence order.

    Raises
    ------
    InvalidParameterError
        If the problem has no reference or fewer than three decreasing step sizes are given.
    OrderStudyError
        If a run diverges; names the offending ``h``.
    """
    if problem.reference is None:
        raise InvalidParameterError(f"{problem.name} has no analytic reference")
    hs = tuple(float(h) for h in h_values)
    if len(hs) < 3 or any(not b < a for a, b in zip(hs, hs[1:])):
        raise InvalidParameterError(f"need at least three decreasing step sizes, got {hs}")

    errors = []
    for h in hs:
        try:
            traj = integrate(problem, spec, h)
        except DivergenceError as e:
            raise OrderStudyError(h, e) from e
        errors.append(error_norm(traj, problem.reference).final_error)
        logger.info("order study %s h=%g final_error=%.3e", traj.meta.scheme, h, errors[-1])

    orders = []
    for (h1, e1), (h2, e2) in zip(zip(hs, errors), zip(hs[1:], errors[1:])):
        orders.append(math.log(e1 / e2) / math.log(h1 / h2) if e1 > 0 and e2 > 0 else math.nan)
    finite = [o for o in orders if math.isfinite(o)]
    summary = float(np.median(finite)) if finite else None
    return OrderEstimate(hs, tuple(errors), tuple(orders), summary)


def _is_stable(spec: SchemeSpec, lam: float, n_steps: int, h: float) -> bool:
    problem = dahlquist(lam, t_final=n_steps * h)
    try:
        traj = integrate(problem, spec, h)
    except DivergenceError:
        return False
    y0 = float(np.max(np.abs(problem.y0)))
    return float(np.max(np.abs(traj.final))) <= y0 * (1.0 + 1e-6)


def stability_threshold(
    spec: SchemeSpec,
    lam: float,
    n_steps: int = 1000,
    h_bracket: tuple[float, float] = (1e-4, 4.0),
    tol: float = 1e-4,
) -> float:
    """
    Bisect for the largest step keeping the Dahlquist solution bounded.

    A run is stable when ``|y_N| <= |y_0| (1 + 1e-6)`` after ``n_steps`` steps
    and nothing diverged on the way.

    Raises
    ------
    BracketError
        If the lower bound is unstable or the upper bound is stable.
    """
    if not lam < 0:
        raise InvalidParameterError(f"lambda must be negative, got {lam}")
    lo, hi = (float(v) for v in h_bracket)
    if not 0 < lo < hi:
        raise BracketError(f"bracket must satisfy 0 < lo < hi, got ({lo}, {hi})")
    if not _is_stable(spec, lam, n_steps, lo):
        raise BracketError(f"lower bound h={lo} is not stable for lambda={lam}")
    if _is_stable(spec, lam, n_steps, hi):
        raise BracketError(f"upper bound h={hi} is stable for lambda={lam}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _is_stable(spec, lam, n_steps, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def noise_variance_report(
    eta_values: Sequence[int],
    sigma: float,
    trials: int,
    seed: int,
    h: float = 0.1,
    gain_mode: GainMode | None = None,
) -> list[NoiseRow]:
    """
    Monte-Carlo spread of slope estimates on a noisy unit ramp.

    Parameters
    ----------
    eta_values : Sequence[int]
        Window lengths to study.
    sigma : float
        Standard deviation of the additive Gaussian noise.
    trials : int
        Number of noisy ramps per window length (at least 1000).
    seed : int
        Base seed; each window length draws from a generator keyed on ``(seed, eta)``.
    h : float, optional
        Sample spacing.
    gain_mode : GainMode | None, optional
        Gain rule, calibrated by default.

    Returns
    -------
    list[NoiseRow]
        One row per window length, in the order given.
    """
    if trials < 1000:
        raise InvalidParameterError(f"trials must be >= 1000, got {trials}")
    if sigma < 0:
        raise InvalidParameterError(f"sigma must be >= 0, got {sigma}")
    rows = []
    for eta in eta_values:
        coeffs = make_coefficients(eta, h, gain_mode)
        analytic = sigma * math.sqrt(float(np.sum(coeffs.weights**2)))
        if sigma == 0:
            rows.append(NoiseRow(eta, 0.0, 0.0, 0.0))
            continue
        rng = np.random.default_rng([int(seed), int(eta)])
        ramps = np.arange(eta + 1, dtype=float) * h + sigma * rng.standard_normal((trials, eta + 1))
        algebraic = coeffs.apply(ramps.T)
        two_point = (ramps[:, -1] - ramps[:, -2]) / h
        rows.append(
            NoiseRow(eta, float(np.std(algebraic, ddof=1)), float(np.std(two_point, ddof=1)), analytic)
        )
    return rows


def gain_report(eta_values: Sequence[int]) -> list[GainRow]:
    """Calibrated gain and weight sign split for each window length."""
    rows = []
    for eta in eta_values:
        positive, zero, negative = sign_split(make_coefficients(eta, 1.0, GainMode("unit")))
        rows.append(GainRow(eta, calibrated_gain(eta), positive, zero, negative))
    return rows


def sweep_point(problem: OdeProblem, spec: SchemeSpec, h: float) -> SweepRow:
    """One (scheme, h) run of a sweep; divergence is recorded, not raised."""
    try:
        traj = integrate(problem, spec, h)
    except DivergenceError as e:
        logger.info("sweep %s h=%g diverged at step %d", spec, h, e.step_index)
        return SweepRow(str(spec), spec.eta, h, "diverged", math.nan, math.nan, math.nan, math.nan)
    final_value = float(traj.final[0])
    if problem.reference is None:
        return SweepRow(traj.meta.scheme, spec.eta, h, "ok", final_value, math.nan, math.nan, math.nan)
    report = error_norm(traj, problem.reference)
    return SweepRow(traj.meta.scheme, spec.eta, h, "ok", final_value, report.final_error, report.linf, report.l2)

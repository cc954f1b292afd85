"""Algebraic derivative estimator on a sliding window of equally spaced samples.

The estimator is the trapezoidal discretization of the first-order algebraic
differentiator (filtering degree two). For a window of ``eta`` steps of size
``h`` (``T = eta * h``) the slope at the newest sample reads::

    a1 = scale * sum_j w_j * y_j,    scale = -3 K h / T**3

with ``w_0 = T``, ``w_j = 2 (T - 2 j h)`` for ``0 < j < eta`` and
``w_eta = T - 2 eta h = -T``, the oldest sample first.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Literal
import logging

import numpy as np

from ansfd.errors import InvalidParameterError, WindowUnderflowError

logger = logging.getLogger(__name__)

GainKind = Literal["calibrated", "unit", "manual"]


@dataclass(frozen=True)
class GainMode:
    """
    Selection rule for the gain ``K`` multiplying the raw estimate.

    Attributes
    ----------
    kind : {"calibrated", "unit", "manual"}
        ``calibrated`` makes the estimator exact on linear ramps, ``unit`` uses
        ``K = 1`` and ``manual`` uses ``value``.
    value : float | None
        Gain for the manual mode.
    """

    kind: GainKind = "calibrated"
    value: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("calibrated", "unit", "manual"):
            raise InvalidParameterError(f"unknown gain mode {self.kind!r}")
        if self.kind == "manual" and (self.value is None or not self.value > 0):
            raise InvalidParameterError(f"manual gain must be positive, got {self.value!r}")

    @classmethod
    def parse(cls, text: str) -> "GainMode":
        """Read ``calibrated``/``auto``, ``unit`` or a positive number."""
        token = (text or "").strip().lower()
        if token in ("calibrated", "auto", ""):
            return cls("calibrated")
        if token == "unit":
            return cls("unit")
        try:
            value = float(token)
        except ValueError as e:
            raise InvalidParameterError(f"unparsable gain {text!r}") from e
        return cls("manual", value)

    def resolve(self, eta: int) -> float:
        if self.kind == "calibrated":
            return calibrated_gain(eta)
        if self.kind == "unit":
            return 1.0
        return float(self.value)  # type: ignore[arg-type]

    def __str__(self) -> str:
        return repr(self.value) if self.kind == "manual" else self.kind


@dataclass(frozen=True, eq=False)
class EstimatorCoefficients:
    """
    Window weights, gain and scale of one estimator.

    Attributes
    ----------
    eta : int
        Window length in steps.
    h : float
        Sample spacing.
    gain : float
        Calibration constant ``K``.
    raw_weights : numpy.ndarray
        ``eta + 1`` trapezoidal weights, oldest sample first.
    scale : float
        ``-3 K h / T**3``.
    """

    eta: int
    h: float
    gain: float
    raw_weights: np.ndarray = field(repr=False)
    scale: float

    @property
    def window(self) -> float:
        """Estimation horizon ``T = eta * h``."""
        return self.eta * self.h

    @property
    def pattern(self) -> np.ndarray:
        """Integer weight pattern ``raw_weights / h``."""
        return np.rint(self.raw_weights / self.h)

    @property
    def weights(self) -> np.ndarray:
        """Effective weights ``scale * raw_weights``."""
        return self.scale * self.raw_weights

    def apply(self, samples: np.ndarray) -> np.ndarray | float:
        """Weighted sum along the first axis of ``samples`` (no fullness check)."""
        return self.scale * np.tensordot(self.raw_weights, np.asarray(samples, dtype=float), axes=1)


def calibrated_gain(eta: int) -> float:
    """Gain making the estimator exact on linear ramps: ``eta**2 / (eta**2 + 2)``."""
    if eta < 1:
        raise InvalidParameterError(f"eta must be >= 1, got {eta}")
    e2 = float(eta) * float(eta)
    return e2 / (e2 + 2.0)


def make_coefficients(eta: int, h: float, gain_mode: GainMode | None = None) -> EstimatorCoefficients:
    """
    Build the estimator weights for a window of ``eta`` steps of size ``h``.

    Parameters
    ----------
    eta : int
        Number of steps in the window (``eta + 1`` samples).
    h : float
        Positive sample spacing.
    gain_mode : GainMode | None, optional
        Gain rule, calibrated by default.

    Returns
    -------
    EstimatorCoefficients
        Immutable coefficient set; safe to share between runs.
    """
    if isinstance(eta, bool) or int(eta) != eta or eta < 1:
        raise InvalidParameterError(f"eta must be a positive integer, got {eta!r}")
    if not h > 0 or not np.isfinite(h):
        raise InvalidParameterError(f"h must be positive, got {h!r}")
    eta = int(eta)
    h = float(h)
    gain = (gain_mode or GainMode()).resolve(eta)

    # integer pattern times h keeps w_j = -w_{eta-j} exact
    j = np.arange(eta + 1)
    pattern = 2.0 * (eta - 2 * j)
    pattern[0] = eta
    pattern[-1] = -eta
    raw = pattern * h
    raw.flags.writeable = False

    t_window = eta * h
    scale = -3.0 * gain * h / t_window**3
    logger.debug("coefficients eta=%d h=%g K=%.17g scale=%.17g", eta, h, gain, scale)
    return EstimatorCoefficients(eta=eta, h=h, gain=gain, raw_weights=raw, scale=scale)


class HistoryWindow:
    """Bounded buffer of the most recent samples, oldest first."""

    def __init__(self, capacity: int, samples: Iterable | None = None):
        if capacity < 1:
            raise InvalidParameterError(f"window capacity must be >= 1, got {capacity}")
        self.capacity = int(capacity)
        self._buffer: deque = deque(maxlen=self.capacity)
        if samples is not None:
            for sample in samples:
                self.push(sample)

    def __len__(self) -> int:
        return len(self._buffer)

    def push(self, sample) -> None:
        """Append the newest sample, dropping the oldest when at capacity."""
        self._buffer.append(np.array(sample, dtype=float))

    def is_full(self) -> bool:
        return len(self._buffer) == self.capacity

    @property
    def samples(self) -> np.ndarray:
        if not self._buffer:
            return np.empty(0)
        return np.stack(tuple(self._buffer))

    def latest(self, count: int) -> np.ndarray:
        """The ``count`` newest samples, oldest first."""
        if count > len(self._buffer):
            raise WindowUnderflowError(len(self._buffer), count)
        return self.samples[len(self._buffer) - count:]


def estimate_slope(coeffs: EstimatorCoefficients, window: HistoryWindow) -> np.ndarray | float:
    """
    Estimate the first derivative at the newest sample of a full window.

    Raises
    ------
    WindowUnderflowError
        If the window holds fewer than ``eta + 1`` samples.
    """
    need = coeffs.eta + 1
    if len(window) < need:
        raise WindowUnderflowError(len(window), need)
    value = coeffs.apply(window.latest(need))
    return float(value) if np.ndim(value) == 0 else value


def sign_split(coeffs: EstimatorCoefficients) -> tuple[int, int, int]:
    """Count (positive, zero, negative) raw weights; ``w_j > 0`` iff ``j < eta / 2``."""
    w = coeffs.raw_weights
    return int(np.count_nonzero(w > 0)), int(np.count_nonzero(w == 0)), int(np.count_nonzero(w < 0))

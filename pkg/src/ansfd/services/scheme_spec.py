"""Scheme selectors and their compact text form.

Grammar::

    kind[:key=value[,key=value]...]

    kind      explicit_euler | rk2_midpoint | rk4_classic | euler_ansfd | rk_ansfd
    eta       positive integer window length                 (A-NSFD kinds)
    gain      calibrated | auto | unit | <positive float>      (A-NSFD kinds)
    phi       identity | exp:<lambda>                          (A-NSFD kinds)
    bootstrap euler | rk4                                      (euler_ansfd)
    delta     grid|random[:<min>[:<max>|auto]]                 (rk_ansfd)
    seed      non-negative integer, ignored with grid deltas  (rk_ansfd)
    literal   true | false, build slope weights on h           (rk_ansfd)

Examples: ``euler_ansfd:eta=3,gain=calibrated``,
``rk_ansfd:eta=5,delta=grid:0:auto``, ``rk_ansfd:eta=3,seed=7``.
"""

from dataclasses import dataclass, field, replace
from typing import Literal
import logging
import math

from ansfd.errors import InvalidParameterError, SchemeParseError
from ansfd.services.estimator import GainMode

logger = logging.getLogger(__name__)

SchemeKind = Literal["explicit_euler", "rk2_midpoint", "rk4_classic", "euler_ansfd", "rk_ansfd"]
BASELINE_KINDS = ("explicit_euler", "rk2_midpoint", "rk4_classic")
ANSFD_KINDS = ("euler_ansfd", "rk_ansfd")
SCHEME_KINDS = BASELINE_KINDS + ANSFD_KINDS


@dataclass(frozen=True)
class Denominator:
    """
    Step denominator ``phi(h)`` with ``phi(h) = h + O(h**2)``.

    ``identity`` is ``phi(h) = h``; ``exp_fitted`` is ``(exp(lam h) - 1) / lam``.
    """

    kind: Literal["identity", "exp_fitted"] = "identity"
    lambda_hint: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "exp_fitted"):
            raise InvalidParameterError(f"unknown denominator {self.kind!r}")

    def __call__(self, h: float) -> float:
        if self.kind == "identity" or self.lambda_hint == 0.0:
            return h
        return math.expm1(self.lambda_hint * h) / self.lambda_hint

    def __str__(self) -> str:
        return "identity" if self.kind == "identity" else f"exp:{self.lambda_hint!r}"


@dataclass(frozen=True)
class DeltaMode:
    """Placement of the ``eta + 1`` perturbations ``delta_j`` of the RK-like slope estimate.

    ``delta_max=None`` selects the automatic span ``max(h |f_k|, eps)``.
    """

    kind: Literal["regular_grid", "random_uniform"] = "regular_grid"
    delta_min: float = 0.0
    delta_max: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("regular_grid", "random_uniform"):
            raise InvalidParameterError(f"unknown delta mode {self.kind!r}")
        if self.delta_max is not None and not self.delta_min < self.delta_max:
            raise InvalidParameterError(
                f"delta span must satisfy min < max, got [{self.delta_min}, {self.delta_max}]"
            )

    def __str__(self) -> str:
        tag = "grid" if self.kind == "regular_grid" else "random"
        upper = "auto" if self.delta_max is None else repr(self.delta_max)
        return f"{tag}:{self.delta_min!r}:{upper}"


@dataclass(frozen=True)
class SchemeSpec:
    """Selector and parameters of one stepper."""

    kind: SchemeKind
    eta: int = 1
    gain: GainMode = field(default_factory=GainMode)
    denominator: Denominator = field(default_factory=Denominator)
    delta: DeltaMode = field(default_factory=DeltaMode)
    seed: int | None = None
    weights_on_h: bool = False
    bootstrap: Literal["euler", "rk4"] = "euler"

    def __post_init__(self) -> None:
        if self.kind not in SCHEME_KINDS:
            raise InvalidParameterError(f"unknown scheme kind {self.kind!r}")
        if isinstance(self.eta, bool) or int(self.eta) != self.eta or self.eta < 1:
            raise InvalidParameterError(f"eta must be a positive integer, got {self.eta!r}")
        if self.bootstrap not in ("euler", "rk4"):
            raise InvalidParameterError(f"unknown bootstrap {self.bootstrap!r}")
        if self.seed is not None and self.seed < 0:
            raise InvalidParameterError(f"seed must be >= 0, got {self.seed}")
        if self.kind == "rk_ansfd":
            random = self.delta.kind == "random_uniform"
            if random and self.seed is None:
                raise InvalidParameterError("random_uniform deltas require a seed")
            if not random and self.seed is not None:
                raise InvalidParameterError("a seed is only meaningful with random_uniform deltas")

    @property
    def is_ansfd(self) -> bool:
        return self.kind in ANSFD_KINDS

    @property
    def needs_seed(self) -> bool:
        return self.kind == "rk_ansfd" and self.delta.kind == "random_uniform"

    def with_eta(self, eta: int) -> "SchemeSpec":
        return replace(self, eta=eta) if self.is_ansfd else self

    def __str__(self) -> str:
        return format_scheme(self)


def format_scheme(spec: SchemeSpec) -> str:
    """Canonical text form; ``parse_scheme(format_scheme(s)) == s``."""
    if spec.kind in BASELINE_KINDS:
        return spec.kind
    parts = [f"eta={spec.eta}", f"gain={spec.gain}", f"phi={spec.denominator}"]
    if spec.kind == "euler_ansfd":
        parts.append(f"bootstrap={spec.bootstrap}")
    else:
        parts.append(f"delta={spec.delta}")
        if spec.seed is not None:
            parts.append(f"seed={spec.seed}")
        if spec.weights_on_h:
            parts.append("literal=true")
    return f"{spec.kind}:{','.join(parts)}"


def _parse_float(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError as e:
        raise SchemeParseError(f"{key}: expected a number, got {text!r}") from e


def _parse_delta(text: str) -> DeltaMode:
    tag, *bounds = text.split(":")
    kinds = {"grid": "regular_grid", "random": "random_uniform"}
    if tag not in kinds or len(bounds) > 2:
        raise SchemeParseError(f"delta: expected grid|random[:min[:max|auto]], got {text!r}")
    delta_min = _parse_float("delta", bounds[0]) if bounds else 0.0
    upper = bounds[1] if len(bounds) == 2 else "auto"
    delta_max = None if upper == "auto" else _parse_float("delta", upper)
    return DeltaMode(kinds[tag], delta_min, delta_max)  # type: ignore[arg-type]


def _parse_phi(text: str) -> Denominator:
    if text == "identity":
        return Denominator()
    tag, _, lam = text.partition(":")
    if tag not in ("exp", "exp_fitted") or not lam:
        raise SchemeParseError(f"phi: expected identity or exp:<lambda>, got {text!r}")
    return Denominator("exp_fitted", _parse_float("phi", lam))


def _parse_bool(key: str, text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise SchemeParseError(f"{key}: expected true|false, got {text!r}")


_ALLOWED_KEYS = {
    "euler_ansfd": {"eta", "gain", "phi", "bootstrap"},
    "rk_ansfd": {"eta", "gain", "phi", "delta", "seed", "literal"},
}


def parse_scheme(text: str, default_seed: int | None = None) -> SchemeSpec:
    """
    Parse the compact scheme form.

    Parameters
    ----------
    text : str
        Scheme string, see the module docstring.
    default_seed : int | None, optional
        Seed used when random deltas are selected without an explicit seed.

    Raises
    ------
    SchemeParseError
        On unknown kinds, keys or malformed values.
    """
    raw = (text or "").strip()
    kind, _, params = raw.partition(":")
    kind = kind.strip()
    if kind not in SCHEME_KINDS:
        raise SchemeParseError(f"unknown scheme {kind!r}; expected one of {', '.join(SCHEME_KINDS)}")
    if kind in BASELINE_KINDS:
        if params.strip():
            raise SchemeParseError(f"{kind} takes no parameters")
        return SchemeSpec(kind)  # type: ignore[arg-type]

    values: dict[str, str] = {}
    for item in filter(None, (p.strip() for p in params.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in _ALLOWED_KEYS[kind]:
            raise SchemeParseError(f"{kind}: unexpected parameter {item!r}")
        values[key] = value.strip()

    try:
        eta = int(values.get("eta", "1"))
    except ValueError as e:
        raise SchemeParseError(f"eta: expected an integer, got {values['eta']!r}") from e
    seed = None
    if "seed" in values:
        try:
            seed = int(values["seed"])
        except ValueError as e:
            raise SchemeParseError(f"seed: expected an integer, got {values['seed']!r}") from e

    try:
        if "delta" in values:
            delta = _parse_delta(values["delta"])
        elif seed is not None:
            delta = DeltaMode("random_uniform")
        else:
            delta = DeltaMode()
        if delta.kind == "random_uniform" and seed is None:
            seed = default_seed
        elif delta.kind == "regular_grid" and seed is not None:
            logger.debug("%s: grid deltas are deterministic; seed %d dropped", raw, seed)
            seed = None
        return SchemeSpec(
            kind=kind,  # type: ignore[arg-type]
            eta=eta,
            gain=GainMode.parse(values.get("gain", "calibrated")),
            denominator=_parse_phi(values.get("phi", "identity")),
            delta=delta,
            seed=seed,
            weights_on_h=_parse_bool("literal", values.get("literal", "false")),
            bootstrap=values.get("bootstrap", "euler"),  # type: ignore[arg-type]
        )
    except InvalidParameterError as e:
        raise SchemeParseError(f"{raw}: {e}") from e

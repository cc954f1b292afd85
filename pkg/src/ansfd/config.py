"""Run configuration resolved from flags, a JSON config file and the environment.

Precedence: explicit flag > config file > environment > built-in default.
"""

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping, Optional
import json
import logging
import os

from dotenv import load_dotenv

from ansfd.errors import InvalidParameterError
from ansfd.output import FORMATS
from ansfd.services.problems import OdeProblem, resolve_problem
from ansfd.services.scheme_spec import SchemeSpec, parse_scheme


def _get_env(name: str, default: Optional[str] = None) -> Optional[str]:
    """Helper to read environment variables with a default value."""
    val = os.getenv(name)
    return val if val is not None and val != "" else default


def load_environment() -> None:
    """Load a ``.env`` file from the working directory, if any."""
    load_dotenv()


def env_seed() -> int | None:
    """Default seed from ``ANSFD_SEED``."""
    raw = _get_env("ANSFD_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as e:
        raise InvalidParameterError(f"ANSFD_SEED must be an integer, got {raw!r}") from e


def log_level() -> str:
    """Logging level name from ``ANSFD_LOG_LEVEL``; unknown names fall back to WARNING."""
    level = (_get_env("ANSFD_LOG_LEVEL", "WARNING") or "WARNING").upper()
    return level if isinstance(logging.getLevelName(level), int) else "WARNING"


def load_config_file(path: Path | str) -> dict[str, Any]:
    """Read a JSON config document; keys mirror the CLI flags (``t-final`` or ``t_final``)."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidParameterError(f"cannot read config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise InvalidParameterError(f"config file {path} must hold a JSON object")
    aliases = {"lambda": "lam", "output_path": "output"}
    out = {}
    for key, value in data.items():
        norm = str(key).replace("-", "_")
        out[aliases.get(norm, norm)] = value
    return out


def merge_options(flags: Mapping[str, Any], defaults: Mapping[str, Any]) -> dict[str, Any]:
    """
    Combine parsed flags with the optional config file and defaults.

    Parameters
    ----------
    flags : Mapping[str, Any]
        Parsed command-line values; ``None`` means "not given". A ``config``
        entry names the JSON file to read.
    defaults : Mapping[str, Any]
        Built-in defaults of the subcommand.

    Returns
    -------
    dict[str, Any]
        Resolved options, with ``seed`` falling back to ``ANSFD_SEED``.
    """
    options = dict(flags)
    if options.get("config"):
        for key, value in load_config_file(options["config"]).items():
            if options.get(key) is None:
                options[key] = value
    if options.get("seed") is None:
        options["seed"] = env_seed()
    for key, value in defaults.items():
        if options.get(key) is None:
            options[key] = value
    return options


@dataclass(frozen=True)
class RunConfig:
    """
    Validated settings of one ``solve`` run.

    Attributes
    ----------
    problem : str
        Catalog name.
    scheme : str
        Compact scheme string.
    h : float
        Step size.
    t_final : float | None
        Horizon override.
    seed : int | None
        Seed for random deltas and noisy inputs.
    output_path : Path | None
        Output file; stdout when ``None``.
    format : str
        ``csv`` or ``json``.
    """

    problem: str
    scheme: str
    h: float
    t_final: float | None = None
    seed: int | None = None
    output_path: Path | None = None
    format: str = "csv"

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise InvalidParameterError(f"h must be positive, got {self.h!r}")
        if self.t_final is not None and not self.t_final > 0:
            raise InvalidParameterError(f"t_final must be positive, got {self.t_final!r}")
        if self.format not in FORMATS:
            raise InvalidParameterError(f"format must be one of {FORMATS}, got {self.format!r}")
        # fail early on bad names or scheme strings
        self.resolved_problem()
        self.resolved_scheme()

    @classmethod
    def from_options(cls, options: Mapping[str, Any]) -> "RunConfig":
        try:
            return cls(
                problem=str(options["problem"]),
                scheme=str(options["scheme"]),
                h=float(options["h"]),
                t_final=None if options.get("t_final") is None else float(options["t_final"]),
                seed=None if options.get("seed") is None else int(options["seed"]),
                output_path=Path(options["output"]) if options.get("output") else None,
                format=str(options.get("format") or "csv"),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, InvalidParameterError):
                raise
            raise InvalidParameterError(f"invalid run configuration: {e}") from e

    def resolved_problem(self) -> OdeProblem:
        problem = resolve_problem(self.problem, self.seed)
        return replace(problem, t_final=self.t_final) if self.t_final is not None else problem

    def resolved_scheme(self) -> SchemeSpec:
        return parse_scheme(self.scheme, default_seed=self.seed)

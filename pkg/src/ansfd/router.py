"""
Subcommand registry for the command-line front end.

Handlers are registered by name with a small configuration dict (title and
built-in defaults). ``dispatch`` resolves options, runs the handler (awaiting
it when it is a coroutine), writes the resulting report and maps failures to
process exit codes:

- 0: success
- 2: configuration error (unknown problem or command, unparsable scheme,
  invalid parameter, bad stability bracket)
- 3: divergence during integration
"""

from typing import Any, Awaitable, Callable, Dict, List, Mapping
import asyncio
import logging
import sys

from ansfd.config import merge_options
from ansfd.errors import (
    AnsfdError,
    BracketError,
    DivergenceError,
    InvalidParameterError,
    InvalidStateError,
    OrderStudyError,
    SchemeParseError,
    UnknownProblemError,
    WindowUnderflowError,
)
from ansfd.output import FORMATS, Report, write_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3

_EXIT_CODES: Dict[type, int] = {
    UnknownProblemError: EXIT_CONFIG,
    SchemeParseError: EXIT_CONFIG,
    InvalidParameterError: EXIT_CONFIG,
    BracketError: EXIT_CONFIG,
    InvalidStateError: EXIT_CONFIG,
    WindowUnderflowError: EXIT_CONFIG,
    DivergenceError: EXIT_DIVERGED,
    OrderStudyError: EXIT_DIVERGED,
}

Handler = Callable[[Dict[str, Any]], "Report | Awaitable[Report]"]


def exit_code_for(error: AnsfdError) -> int:
    for kind, code in _EXIT_CODES.items():
        if isinstance(error, kind):
            return code
    return EXIT_CONFIG


class CommandRouter:
    """Registry of subcommands and their handlers."""

    def __init__(self, name: str, version: str):
        """Initialize the router.

        Args:
            name: Program name used in diagnostics
            version: Program version (informational)
        """
        self.name = name
        self.version = version
        self.commands: Dict[str, Dict[str, Any]] = {}

    def register(self, name: str, config: Mapping[str, Any], handler: Handler) -> None:
        """Register a subcommand handler.

        Args:
            name: Subcommand name
            config: ``title`` and ``defaults`` for the subcommand
            handler: Callable taking the resolved options, returning a report
        """
        self.commands[name] = {"config": dict(config), "handler": handler}

    def list_commands(self) -> List[Dict[str, str]]:
        return [
            {"name": name, "description": str(entry["config"].get("title") or name)}
            for name, entry in self.commands.items()
        ]

    def resolve(self, name: str, flags: Mapping[str, Any]) -> Dict[str, Any]:
        entry = self.commands[name]
        return merge_options(flags, entry["config"].get("defaults", {}))

    def dispatch(self, name: str, flags: Mapping[str, Any]) -> int:
        """Run subcommand ``name`` and return the process exit code."""
        entry = self.commands.get(name)
        if entry is None:
            print(f"{self.name}: command not found: {name}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            options = self.resolve(name, flags)
            fmt = str(options.get("format") or "csv")
            if fmt not in FORMATS:
                raise InvalidParameterError(f"format must be one of {FORMATS}, got {fmt!r}")
            result = entry["handler"](options)
            if hasattr(result, "__await__"):
                result = asyncio.run(result)  # type: ignore[arg-type]
            if fmt == "csv" and result.meta:
                summary = " ".join(f"{k}={v}" for k, v in result.meta.items())
                print(f"# {summary}", file=sys.stderr)
            write_report(result, options.get("output"), fmt)
        except AnsfdError as e:
            logger.debug("%s %s failed", self.name, name, exc_info=True)
            print(f"{self.name} {name}: {e}", file=sys.stderr)
            return exit_code_for(e)
        return EXIT_OK

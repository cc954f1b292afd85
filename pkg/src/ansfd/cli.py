"""Command-line front end.

Reads ``.env`` and the environment, builds the subcommand router and
dispatches. Every subcommand accepts ``--config FILE`` (a JSON object whose
keys mirror the flags; flags win), ``--output PATH`` and ``--format csv|json``.
"""

from typing import Optional, Sequence
import argparse
import logging

from ansfd import __version__
from ansfd.config import load_environment, log_level
from ansfd.handlers.coefficients import coeffs_handler
from ansfd.handlers.integration import solve_handler, sweep_handler
from ansfd.handlers.studies import gains_handler, noise_handler, order_handler, stability_handler
from ansfd.router import CommandRouter
from ansfd.services import scheme_spec

EPILOG = (
    scheme_spec.__doc__
    + """
Noise: noisy problems (noisy_dahlquist:<lambda>) draw their input noise from
(seed, sample index), not from time, so runs at different h use the same noise
sequence sample by sample. --seed or ANSFD_SEED sets the seed.

Problems: linear_gain5, dahlquist:<lambda>, noisy_dahlquist:<lambda>, logistic,
zero_rhs, constant_drift.
"""
)


def create_router() -> CommandRouter:
    """Register every subcommand with its built-in defaults."""
    router = CommandRouter("ansfd", __version__)
    router.register(
        "solve",
        {"title": "Integrate one problem", "defaults": {"problem": "dahlquist:-1", "scheme": "explicit_euler", "h": 0.1}},
        solve_handler,
    )
    router.register(
        "sweep",
        {
            "title": "Run a grid of step sizes and window lengths",
            "defaults": {"problem": "dahlquist:-1", "scheme": "euler_ansfd:eta=1", "grid": "h=0.1,0.05,0.025:eta=1,2,3"},
        },
        sweep_handler,
    )
    router.register(
        "order",
        {
            "title": "Observed convergence order",
            "defaults": {"problem": "dahlquist:-1", "scheme": "explicit_euler", "h_list": "0.1,0.05,0.025,0.0125"},
        },
        order_handler,
    )
    router.register(
        "stability",
        {
            "title": "Stability threshold on the Dahlquist equation",
            "defaults": {"scheme": "explicit_euler", "lam": -1.0, "bracket": "1e-4:4", "n_steps": 1000},
        },
        stability_handler,
    )
    router.register(
        "coeffs",
        {"title": "Estimator weights", "defaults": {"eta": 3, "h": 1.0, "gain": "auto"}},
        coeffs_handler,
    )
    router.register(
        "noise",
        {
            "title": "Slope-estimate spread on noisy ramps",
            "defaults": {"eta_list": "1,2,4,8", "sigma": 0.1, "trials": 10000, "h": 0.1, "gain": "auto"},
        },
        noise_handler,
    )
    router.register(
        "gains",
        {"title": "Calibrated gains and weight sign split", "defaults": {"eta_list": "1,2,3,4,5,8"}},
        gains_handler,
    )
    return router


def build_parser(router: CommandRouter) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ansfd",
        description="Algebraic-estimation NSFD time stepping toolkit.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    titles = {c["name"]: c["description"] for c in router.list_commands()}

    def command(name: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=titles.get(name), epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", help="JSON config file mirroring the flags")
        p.add_argument("-o", "--output", help="output file (stdout when omitted)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--seed", type=int, help="seed for random deltas and noise (default: ANSFD_SEED)")
        return p

    solve = command("solve")
    solve.add_argument("--problem")
    solve.add_argument("--scheme")
    solve.add_argument("--h", type=float)
    solve.add_argument("--t-final", dest="t_final", type=float)

    sweep = command("sweep")
    sweep.add_argument("--problem")
    sweep.add_argument("--scheme")
    sweep.add_argument("--grid", help="e.g. h=0.1,0.05:eta=1,2,3")

    order = command("order")
    order.add_argument("--problem")
    order.add_argument("--scheme")
    order.add_argument("--h-list", dest="h_list", help="decreasing step sizes, e.g. 0.1,0.05,0.025")

    stability = command("stability")
    stability.add_argument("--scheme")
    stability.add_argument("--lambda", dest="lam", type=float)
    stability.add_argument("--bracket", help="lo:hi step-size bracket")
    stability.add_argument("--n-steps", dest="n_steps", type=int)
    stability.add_argument("--eta-list", dest="eta_list", help="window lengths for A-NSFD schemes")

    coeffs = command("coeffs")
    coeffs.add_argument("--eta", type=int)
    coeffs.add_argument("--h", type=float)
    coeffs.add_argument("--gain", help="auto | unit | <K>")

    noise = command("noise")
    noise.add_argument("--eta-list", dest="eta_list")
    noise.add_argument("--sigma", type=float)
    noise.add_argument("--trials", type=int)
    noise.add_argument("--h", type=float)
    noise.add_argument("--gain", help="auto | unit | <K>")

    gains = command("gains")
    gains.add_argument("--eta-list", dest="eta_list")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entrypoint for the ``ansfd`` console script."""
    load_environment()
    logging.basicConfig(level=log_level(), format="%(levelname)s %(name)s: %(message)s")
    router = create_router()
    args = vars(build_parser(router).parse_args(argv))
    command = args.pop("command")
    return router.dispatch(command, args)


if __name__ == "__main__":
    raise SystemExit(main())

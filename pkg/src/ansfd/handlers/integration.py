from typing import Any, Dict
import asyncio

import numpy as np

from ansfd.config import RunConfig
from ansfd.errors import InvalidParameterError
from ansfd.handlers import options as opt
from ansfd.output import Report
from ansfd.services.analysis import SweepRow, sweep_point
from ansfd.services.problems import resolve_problem
from ansfd.services.scheme_spec import parse_scheme
from ansfd.services.schemes import integrate


def solve_handler(options: Dict[str, Any]) -> Report:
    """
    Integrate one problem with one scheme.

    Parameters
    ----------
    options : Dict[str, Any]
        Resolved options: ``problem``, ``scheme``, ``h``, optional ``t_final``,
        ``seed``, ``output`` and ``format``.

    Returns
    -------
    Report
        ``t,y`` rows, plus ``y_ref,abs_err`` when the problem has a reference.
    """
    config = RunConfig.from_options(options)
    problem = config.resolved_problem()
    spec = config.resolved_scheme()
    traj = integrate(problem, spec, config.h)

    dim = traj.values.shape[1]
    y_cols = ["y"] if dim == 1 else [f"y_{i}" for i in range(dim)]
    headers = ["t", *y_cols]
    if problem.reference is not None:
        headers += ["y_ref"] if dim == 1 else [f"y_ref_{i}" for i in range(dim)]
        headers.append("abs_err")

    rows = []
    for t, y in zip(traj.times, traj.values):
        row: list[Any] = [float(t), *(float(v) for v in y)]
        if problem.reference is not None:
            ref = np.atleast_1d(np.asarray(problem.reference(float(t)), dtype=float))
            row += [float(v) for v in ref]
            row.append(float(np.linalg.norm(y - ref)))
        rows.append(row)

    meta = {"problem": problem.name, "scheme": traj.meta.scheme, "h": config.h, "seed": traj.meta.seed}
    if spec.kind == "rk_ansfd":
        meta["flat_slopes"] = traj.diagnostics.flat_count
    return Report("trajectory", headers, rows, meta)


async def sweep_handler(options: Dict[str, Any]) -> Report:
    """
    Run one problem over a grid of step sizes and window lengths.

    Runs execute concurrently in worker threads; rows are sorted by
    ``(scheme, eta, h)`` whatever the completion order.
    """
    axes = opt.grid(options["grid"])
    seed = None if options.get("seed") is None else opt.as_int("seed", options["seed"])
    problem = resolve_problem(str(options["problem"]), seed)
    base = parse_scheme(str(options["scheme"]), default_seed=seed)
    if any(e != int(e) or e < 1 for e in axes.get("eta", [])):
        raise InvalidParameterError(f"grid: eta values must be positive integers, got {axes['eta']}")
    etas = [int(e) for e in axes.get("eta", [base.eta])] if base.is_ansfd else [base.eta]
    specs = {eta: base.with_eta(eta) for eta in etas}

    jobs = [asyncio.to_thread(sweep_point, problem, spec, h) for spec in specs.values() for h in axes["h"]]
    results: list[SweepRow] = list(await asyncio.gather(*jobs))
    results.sort(key=lambda r: (r.scheme, r.eta, r.h))

    headers = ["scheme", "eta", "h", "status", "final_value", "final_error", "linf", "l2"]
    rows = [[r.scheme, r.eta, r.h, r.status, r.final_value, r.final_error, r.linf, r.l2] for r in results]
    return Report("sweep", headers, rows, {"problem": problem.name, "runs": len(rows)})

from typing import Any, Dict
import logging

from ansfd.handlers import options as opt
from ansfd.output import Report
from ansfd.services.analysis import gain_report, noise_variance_report, observed_order, stability_threshold
from ansfd.services.estimator import GainMode
from ansfd.services.problems import resolve_problem
from ansfd.services.scheme_spec import parse_scheme

logger = logging.getLogger(__name__)


def _seed(options: Dict[str, Any]) -> int | None:
    return None if options.get("seed") is None else opt.as_int("seed", options["seed"])


def order_handler(options: Dict[str, Any]) -> Report:
    """Observed order of one scheme on a problem with a reference."""
    seed = _seed(options)
    problem = resolve_problem(str(options["problem"]), seed)
    spec = parse_scheme(str(options["scheme"]), default_seed=seed)
    estimate = observed_order(problem, spec, opt.float_list("h_list", options["h_list"]))
    rows = []
    for i, (h, err) in enumerate(zip(estimate.h_values, estimate.errors)):
        rows.append([h, err, estimate.pairwise_orders[i - 1] if i else None])
    logger.info("observed order of %s on %s: %s", spec, problem.name, estimate.summary_order)
    meta = {"problem": problem.name, "scheme": str(spec), "summary_order": estimate.summary_order}
    return Report("order", ["h", "final_error", "pairwise_order"], rows, meta)


def stability_handler(options: Dict[str, Any]) -> Report:
    """
    Stability threshold on the Dahlquist equation.

    With ``eta_list`` and an A-NSFD scheme, one threshold is measured per window length.
    """
    spec = parse_scheme(str(options["scheme"]), default_seed=_seed(options))
    lam = opt.as_float("lambda", options["lam"])
    lo_hi = opt.bracket(options["bracket"])
    n_steps = opt.as_int("n_steps", options["n_steps"])
    specs = [spec]
    if options.get("eta_list") and spec.is_ansfd:
        specs = [spec.with_eta(eta) for eta in opt.int_list("eta_list", options["eta_list"])]
    rows = []
    for s in specs:
        h_max = stability_threshold(s, lam, n_steps=n_steps, h_bracket=lo_hi)
        rows.append([str(s), s.eta if s.is_ansfd else None, lam, h_max])
    return Report("stability", ["scheme", "eta", "lambda", "h_max"], rows, {"n_steps": n_steps})


def noise_handler(options: Dict[str, Any]) -> Report:
    """Slope-estimate spread on noisy ramps, algebraic window against two-point difference."""
    seed = _seed(options)
    table = noise_variance_report(
        opt.int_list("eta_list", options["eta_list"]),
        opt.as_float("sigma", options["sigma"]),
        opt.as_int("trials", options["trials"]),
        0 if seed is None else seed,
        h=opt.as_float("h", options["h"]),
        gain_mode=GainMode.parse(str(options["gain"])),
    )
    rows = [[r.eta, r.algebraic_std, r.two_point_std, r.analytic_std] for r in table]
    meta = {"sigma": options["sigma"], "trials": options["trials"], "seed": 0 if seed is None else seed}
    return Report("noise", ["eta", "algebraic_std", "two_point_std", "analytic_std"], rows, meta)


def gains_handler(options: Dict[str, Any]) -> Report:
    rows = [[r.eta, r.gain, r.positive, r.zero, r.negative] for r in gain_report(opt.int_list("eta_list", options["eta_list"]))]
    return Report("gains", ["eta", "gain", "positive", "zero", "negative"], rows)

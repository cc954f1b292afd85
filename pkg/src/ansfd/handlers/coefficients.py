from typing import Any, Dict

from ansfd.handlers import options as opt
from ansfd.output import Report
from ansfd.services.estimator import GainMode, make_coefficients, sign_split


def coeffs_handler(options: Dict[str, Any]) -> Report:
    """
    Dump the raw weights of one estimator.

    Parameters
    ----------
    options : Dict[str, Any]
        ``eta``, ``h`` and ``gain`` (``auto``, ``unit`` or a positive number).

    Returns
    -------
    Report
        ``j,weight`` rows, oldest sample first; eta, gain, scale and the sign
        split travel in the metadata.
    """
    coeffs = make_coefficients(
        opt.as_int("eta", options["eta"]),
        opt.as_float("h", options["h"]),
        GainMode.parse(str(options["gain"])),
    )
    positive, zero, negative = sign_split(coeffs)
    rows = [[j, float(w)] for j, w in enumerate(coeffs.raw_weights)]
    meta = {
        "eta": coeffs.eta,
        "h": coeffs.h,
        "gain": coeffs.gain,
        "scale": coeffs.scale,
        "signs": [positive, zero, negative],
    }
    return Report("coeffs", ["j", "weight"], rows, meta)

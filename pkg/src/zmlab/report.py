"""One-stop comparison of every multiplicity bound at a fixed ordinate."""

from __future__ import annotations

import math
from typing import Sequence

from .bounds import (BoundReport, measure_max, thm1_bound, thm2_bound, thm2_optimize_c,
                     thm3_mult_bound, thm4_mult_ceiling)
from .config import RunConfig
from .zeros import ZeroRecord, scan_zeros, window_mult_bound

REPORT_BETAS = (0.6, 0.7, 0.8, 0.9, 0.95)
REPORT_COLUMNS = ("thm1", "thm2_opt", "thm3", "thm4", "classical", "window")
WINDOW_H = 1.0


def _value(rep: BoundReport) -> float | None:
    return rep.value if rep.valid else None


def zeros_for_window(gamma: float, H: float = WINDOW_H) -> list[ZeroRecord]:
    return scan_zeros(max(2.0, gamma - H - 1.0), gamma + H + 1.0)


def report_all(gamma: float, config: RunConfig | None = None,
               zeros: Sequence[ZeroRecord] | None = None,
               grid: int = 64, segment_grid: int = 512) -> dict:
    """Bound table for hypothetical real parts beta in REPORT_BETAS at ordinate gamma.

    Columns: the Jensen-type bound with a measured maximum of log|zeta|,
    the c-optimised three-circle bound, the (1 - beta)^{3/2} bound, the
    isolated-zero ceiling, log gamma, and the zero count in
    (gamma - 1, gamma + 1]. Invalid entries are None.
    """
    config = config or RunConfig()
    k = config.constants
    if gamma < 15.0:
        raise ValueError("gamma must be >= 15 so that log log gamma >= 1")
    if zeros is None:
        zeros = zeros_for_window(gamma)
    max_log_zeta = measure_max(gamma, 0.5, 0.5, grid)
    m_log = measure_max(gamma, 0.5, math.log(gamma) ** 2, segment_grid, sigma_max=0.5)
    window = window_mult_bound(gamma, WINDOW_H, zeros)
    rows, thm2_reference = [], []
    for beta in REPORT_BETAS:
        opt = thm2_optimize_c(beta, gamma, m_log, k)
        ref = thm2_bound(beta, gamma, 1.5 - beta, m_log, k)
        rows.append({
            "beta": beta,
            "thm1": _value(thm1_bound(beta, gamma, max_log_zeta, k)),
            "thm2_opt": _value(opt),
            "thm3": _value(thm3_mult_bound(beta, gamma, k)),
            "thm4": _value(thm4_mult_ceiling(beta, gamma, k)),
            "classical": math.log(gamma),
            "window": window,
        })
        thm2_reference.append({"beta": beta, "c": 1.5 - beta, "value": _value(ref),
                               "c_opt": opt.params.get("c") if opt.valid else None})
    return {
        "command": "report",
        "gamma": gamma,
        "inputs": {"max_log_zeta": max_log_zeta, "m_log": m_log, "window_H": WINDOW_H,
                   "grid": grid, "segment_grid": segment_grid},
        "constants": {name: getattr(k, name) for name in k.__dataclass_fields__},
        "columns": list(REPORT_COLUMNS),
        "rows": rows,
        "thm2_reference": thm2_reference,
    }

from __future__ import annotations

import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from rovtrack.controller import YAW, wrap_angles
from rovtrack.errors import EmptyLogError
from rovtrack.extra_types import Array
from rovtrack.simulation import DisturbanceModel, SimLog

logger = logging.getLogger(__name__)

FINAL_WINDOW = 10.0
DESCENT_SETTLE = 1.0
DESCENT_SLACK = 1e-6


class Metrics(BaseModel):
    """Summary of a closed-loop run.

    Window statistics cover the last `window` seconds of the log (the whole log when it is shorter).
    """

    model_config = ConfigDict(extra="forbid")

    rms_error: list[float]
    final_error: list[float]
    estimation_error: list[float]
    mean_estimate: list[float]
    final_xy_error: float
    z_amplitude: float
    theta_amplitude: float
    vc_violations: int
    cost: float
    window: float


def wrapped_errors(log: SimLog) -> Array:
    e = log.eta - log.eta_d
    e[:, YAW] = wrap_angles(e[:, YAW])
    return e


def final_window(log: SimLog, window: float = FINAL_WINDOW) -> Array:
    return log.t >= log.t[-1] - window - 1e-9


def descent_violations(
    values: Array, t: Array, settle: float = DESCENT_SETTLE, slack: float = DESCENT_SLACK
) -> int:
    """Count steps after `settle` seconds where a supposedly non-increasing signal rises by more than `slack`."""
    rises = np.diff(values) > slack
    return int(np.sum(rises & (t[:-1] >= settle)))


def metrics(log: SimLog, disturbance: Optional[DisturbanceModel] = None, window: float = FINAL_WINDOW) -> Metrics:
    if len(log) == 0:
        msg = "Cannot summarize an empty log"
        raise EmptyLogError(msg)
    tau_d = log.tau_d if disturbance is None else disturbance.values(log.t)
    e = wrapped_errors(log)
    mask = final_window(log, window)
    estimate_error = np.abs(log.tau_hat - tau_d)[mask]

    return Metrics(
        rms_error=np.sqrt(np.mean(e**2, axis=0)).tolist(),
        final_error=np.mean(np.abs(e[mask]), axis=0).tolist(),
        estimation_error=np.mean(estimate_error, axis=0).tolist(),
        mean_estimate=np.mean(log.tau_hat[mask], axis=0).tolist(),
        final_xy_error=float(np.mean(np.linalg.norm(e[mask, :2], axis=1))),
        z_amplitude=float(np.max(np.abs(e[mask, 2]))),
        theta_amplitude=float(np.max(np.abs(e[mask, 4]))),
        vc_violations=descent_violations(log.v_c, log.t),
        cost=float(log.j_run[-1]),
        window=min(window, float(log.t[-1] - log.t[0])),
    )

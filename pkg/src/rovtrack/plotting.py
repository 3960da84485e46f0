"""Static SVG figures of a simulation log."""

from __future__ import annotations

import logging
from pathlib import Path

import matplotlib as mpl
from matplotlib.figure import Figure

from rovtrack.simulation import SimLog

logger = logging.getLogger(__name__)

POSE_LABELS = ["X [m]", "Y [m]", "Z [m]", "phi [rad]", "theta [rad]", "psi [rad]"]
WRENCH_LABELS = ["X [N]", "Y [N]", "Z [N]", "K [N m]", "M [N m]", "N [N m]"]

SVG_PARAMS = {
    "svg.hashsalt": "rovtrack",
    "svg.fonttype": "none",
    "font.size": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def _save(figure: Figure, filepath: Path) -> None:
    with mpl.rc_context(SVG_PARAMS):
        figure.savefig(filepath, format="svg", metadata={"Date": None})
    logger.debug("Wrote %s", filepath)


def _grid(title: str) -> tuple[Figure, list]:
    with mpl.rc_context(SVG_PARAMS):
        figure = Figure(figsize=(9.0, 7.0), layout="constrained")
        axes = figure.subplots(3, 2, sharex=True).T.flatten().tolist()
    figure.suptitle(title)
    return figure, axes


def plot_tracking(log: SimLog, filepath: Path) -> None:
    figure, axes = _grid("Pose and reference")
    for i, ax in enumerate(axes):
        ax.plot(log.t, log.eta[:, i], label="actual", linewidth=1.0)
        ax.plot(log.t, log.eta_d[:, i], label="reference", linewidth=1.0, linestyle="--")
        ax.set_ylabel(POSE_LABELS[i])
    axes[2].set_xlabel("t [s]")
    axes[5].set_xlabel("t [s]")
    axes[0].legend(loc="best")
    _save(figure, filepath)


def plot_estimates(log: SimLog, filepath: Path) -> None:
    figure, axes = _grid("Disturbance estimate")
    for i, ax in enumerate(axes):
        ax.plot(log.t, log.tau_hat[:, i], label="estimate", linewidth=1.0)
        ax.plot(log.t, log.tau_d[:, i], label="disturbance", linewidth=1.0, linestyle="--")
        ax.set_ylabel(WRENCH_LABELS[i])
    axes[2].set_xlabel("t [s]")
    axes[5].set_xlabel("t [s]")
    axes[0].legend(loc="best")
    _save(figure, filepath)


def plot_path(log: SimLog, filepath: Path) -> None:
    with mpl.rc_context(SVG_PARAMS):
        figure = Figure(figsize=(9.0, 4.5), layout="constrained")
        xy, xz = figure.subplots(1, 2)
    for ax, (i, j), labels in ((xy, (0, 1), ("X [m]", "Y [m]")), (xz, (0, 2), ("X [m]", "Z [m]"))):
        ax.plot(log.eta[:, i], log.eta[:, j], label="actual", linewidth=1.0)
        ax.plot(log.eta_d[:, i], log.eta_d[:, j], label="reference", linewidth=1.0, linestyle="--")
        ax.set_xlabel(labels[0])
        ax.set_ylabel(labels[1])
    xy.set_aspect("equal", adjustable="datalim")
    xz.invert_yaxis()
    xy.legend(loc="best")
    _save(figure, filepath)


def save_figures(log: SimLog, dirpath: Path) -> list[Path]:
    filepaths = [dirpath / "tracking.svg", dirpath / "estimates.svg", dirpath / "path.svg"]
    plot_tracking(log, filepaths[0])
    plot_estimates(log, filepaths[1])
    plot_path(log, filepaths[2])
    return filepaths

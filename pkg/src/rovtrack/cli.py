from __future__ import annotations

import logging
import os
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Generator, Optional

import typer
from rich.logging import RichHandler
from typer import Typer

from rovtrack.controller import AdaptationMode
from rovtrack.errors import ConfigError, UserError
from rovtrack.workbench import Sweep, Workbench

logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "ROVTRACK_THREADS"
DEFAULT_OUT_DIRPATH = Path("out")
DEFAULT_CONTROLLERS = "baseline,constant,fuzzy"
DEFAULT_SWEEP = "0:0.01:8"

app = Typer(pretty_exceptions_enable=False)


@dataclass(kw_only=True)
class CliContext:
    workbench: Workbench
    workers: int

    @classmethod
    @contextmanager
    def context(cls, info: bool = False, debug: bool = False) -> Generator[CliContext, None, None]:
        cls.set_logger_config(info, debug)
        workbench = Workbench()
        try:
            yield cls(workbench=workbench, workers=cls.load_workers())
        except UserError as exc:
            workbench.printer.print_error(str(exc))
            for note in getattr(exc, "__notes__", []):
                workbench.printer.print_error(note)
            if debug:
                raise exc
            raise typer.Exit(code=exc.exit_code) from exc

    @staticmethod
    def set_logger_config(info: bool, debug: bool) -> None:
        handlers = [RichHandler(rich_tracebacks=True)]
        log_format = "%(message)s"

        if info:
            logging.basicConfig(level=logging.INFO, handlers=handlers, format=log_format)
        if debug:
            logging.basicConfig(level=logging.DEBUG, handlers=handlers, format=log_format)

    @staticmethod
    def load_workers() -> int:
        threads_str = os.getenv(THREADS_ENV_VAR)
        if threads_str is None:
            return os.cpu_count() or 1
        try:
            threads = int(threads_str)
        except ValueError as exc:
            msg = f"{THREADS_ENV_VAR} must be a positive integer, got {threads_str!r}"
            raise ConfigError(msg) from exc
        if threads < 1:
            msg = f"{THREADS_ENV_VAR} must be a positive integer, got {threads}"
            raise ConfigError(msg)
        return threads


def parse_controllers(controllers_str: str) -> list[AdaptationMode]:
    modes = []
    for name in controllers_str.split(","):
        try:
            modes.append(AdaptationMode(name.strip()))
        except ValueError as exc:
            msg = f"Unknown controller mode {name.strip()!r}, expected one of: {', '.join(AdaptationMode)}"
            raise ConfigError(msg) from exc
    return modes


@app.command(help="Run one closed-loop simulation")
def simulate(
    config_filepath: Annotated[Path, typer.Option("--config")],
    out_dirpath: Annotated[Path, typer.Option("--out")] = DEFAULT_OUT_DIRPATH,
    svg: Annotated[bool, typer.Option("--svg/--no-svg")] = False,
    seed: Annotated[Optional[int], typer.Option("--seed")] = None,
    info: Annotated[bool, typer.Option("--info/--no-info")] = False,
    debug: Annotated[bool, typer.Option("--debug/--no-debug")] = False,
) -> None:
    with CliContext.context(info=info, debug=debug) as context:
        cfg = context.workbench.load_sim_config(config_filepath)
        if seed is not None:
            cfg = cfg.model_copy(update={"seed": seed})
        context.workbench.simulate(cfg, out_dirpath, svg=svg)


@app.command(help="Tune the controller gains with a particle swarm")
def tune(
    config_filepath: Annotated[Path, typer.Option("--config")],
    out_dirpath: Annotated[Path, typer.Option("--out")] = DEFAULT_OUT_DIRPATH,
    seed: Annotated[Optional[int], typer.Option("--seed")] = None,
    info: Annotated[bool, typer.Option("--info/--no-info")] = False,
    debug: Annotated[bool, typer.Option("--debug/--no-debug")] = False,
) -> None:
    with CliContext.context(info=info, debug=debug) as context:
        cfg = context.workbench.load_tuning_config(config_filepath)
        if seed is not None:
            cfg = cfg.model_copy(update={"pso": cfg.pso.model_copy(update={"seed": seed})})
        context.workbench.tune(cfg, out_dirpath, workers=context.workers)


@app.command(help="Run the same scenario under several adaptation modes")
def compare(  # noqa: PLR0913
    config_filepath: Annotated[Path, typer.Option("--config")],
    out_dirpath: Annotated[Path, typer.Option("--out")] = DEFAULT_OUT_DIRPATH,
    controllers_str: Annotated[str, typer.Option("--controllers")] = DEFAULT_CONTROLLERS,
    seed: Annotated[Optional[int], typer.Option("--seed")] = None,
    info: Annotated[bool, typer.Option("--info/--no-info")] = False,
    debug: Annotated[bool, typer.Option("--debug/--no-debug")] = False,
) -> None:
    with CliContext.context(info=info, debug=debug) as context:
        modes = parse_controllers(controllers_str)
        cfg = context.workbench.load_sim_config(config_filepath)
        if seed is not None:
            cfg = cfg.model_copy(update={"seed": seed})
        context.workbench.compare(cfg, out_dirpath, modes, workers=context.workers)


@app.command(name="fis-surface", help="Sweep a fuzzy rule base and write its input-output curve")
def fis_surface(
    rulebase_str: Annotated[str, typer.Option("--rulebase")] = "translational",
    sweep_str: Annotated[str, typer.Option("--sweep")] = DEFAULT_SWEEP,
    out_filepath: Annotated[Path, typer.Option("--out")] = Path("fis_surface.csv"),
    info: Annotated[bool, typer.Option("--info/--no-info")] = False,
    debug: Annotated[bool, typer.Option("--debug/--no-debug")] = False,
) -> None:
    with CliContext.context(info=info, debug=debug) as context:
        sweep = Sweep.parse(sweep_str)
        rulebase = context.workbench.load_rulebase(rulebase_str)
        context.workbench.fis_surface(rulebase, sweep, out_filepath)

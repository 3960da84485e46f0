from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import inflect
import numpy as np
from pydantic import BaseModel, ConfigDict

from rovtrack.controller import AdaptationMode, Gains
from rovtrack.errors import ConfigError, SimulationError
from rovtrack.extra_types import Array, Pluralizer
from rovtrack.fuzzy import BUILTIN_RULEBASES, FuzzySystem, RuleBase
from rovtrack.metrics import Metrics, metrics
from rovtrack.plotting import save_figures
from rovtrack.printer import Printer
from rovtrack.pso import GainCost, PsoResult, TuningConfig, tune_gains
from rovtrack.simulation import SimConfig, SimLog, run

logger = logging.getLogger(__name__)

LOG_FILENAME = "log.csv"
METRICS_FILENAME = "metrics.json"
COMPARISON_FILENAME = "comparison.json"
GAINS_FILENAME = "gains.json"
HISTORY_FILENAME = "pso_history.csv"
ROTATIONAL = slice(3, 6)
MIN_COMPARE_MODES = 2


@dataclass(frozen=True, kw_only=True)
class Sweep:
    lo: float
    step: float
    hi: float

    @classmethod
    def parse(cls, sweep_str: str) -> Sweep:
        parts = sweep_str.split(":")
        if len(parts) != 3:  # noqa: PLR2004
            msg = f"Sweep must look like LO:STEP:HI, got {sweep_str!r}"
            raise ConfigError(msg)
        try:
            lo, step, hi = (float(part) for part in parts)
        except ValueError as exc:
            msg = f"Sweep bounds must be numbers, got {sweep_str!r}"
            raise ConfigError(msg) from exc
        if not all(math.isfinite(v) for v in (lo, step, hi)):
            msg = f"Sweep bounds must be finite, got {sweep_str!r}"
            raise ConfigError(msg)
        if step <= 0:
            msg = f"Sweep step must be positive, got {step:g}"
            raise ConfigError(msg)
        if hi < lo:
            msg = f"Sweep upper bound {hi:g} is below its lower bound {lo:g}"
            raise ConfigError(msg)
        return cls(lo=lo, step=step, hi=hi)

    def points(self) -> Array:
        n_points = math.floor((self.hi - self.lo) / self.step + 1e-9) + 1
        return np.round(self.lo + self.step * np.arange(n_points), 12)


class ModeResult(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode: AdaptationMode
    status: str
    note: Optional[str] = None
    final_xy_error: Optional[float] = None
    final_error: Optional[list[float]] = None
    estimation_error: Optional[list[float]] = None
    cost: Optional[float] = None


class Comparison(BaseModel):
    model_config = ConfigDict(extra="forbid")

    modes: list[ModeResult]
    baseline_xy_ratio: Optional[float] = None
    fuzzy_rotational_not_worse: Optional[bool] = None

    def get(self, mode: AdaptationMode) -> Optional[ModeResult]:
        for result in self.modes:
            if result.mode == mode and result.status == "ok":
                return result
        return None

    def assess(self) -> Comparison:
        baseline = self.get(AdaptationMode.BASELINE)
        constant = self.get(AdaptationMode.CONSTANT)
        fuzzy = self.get(AdaptationMode.FUZZY)
        ratio, not_worse = None, None
        if baseline is not None and fuzzy is not None and fuzzy.final_xy_error:
            ratio = baseline.final_xy_error / fuzzy.final_xy_error
        if constant is not None and fuzzy is not None:
            not_worse = float(np.mean(fuzzy.estimation_error[ROTATIONAL])) <= float(
                np.mean(constant.estimation_error[ROTATIONAL])
            )
        return self.model_copy(update={"baseline_xy_ratio": ratio, "fuzzy_rotational_not_worse": not_worse})


class TunedGains(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k1: list[float]
    k2: list[float]
    cost: float
    reference_cost: float
    iterations: int
    evaluations: int
    seed: int


def simulate_mode(cfg: SimConfig) -> tuple[Optional[SimLog], Optional[str]]:
    try:
        return run(cfg), None
    except SimulationError as exc:
        logger.debug("Mode %s failed", cfg.adaptation.mode, exc_info=True)
        return None, str(exc)


@dataclass(kw_only=True)
class Workbench:
    printer: Printer = field(default_factory=Printer)
    pluralizer: Pluralizer = field(default_factory=inflect.engine)

    def simulate(self, cfg: SimConfig, out_dirpath: Path, svg: bool = False) -> Metrics:
        self.printer.print_message(f"Simulating {cfg.integrator.tf:g} s with {cfg.adaptation.mode} adaptation...")
        log = run(cfg)
        summary = metrics(log, cfg.disturbance)

        out_dirpath.mkdir(parents=True, exist_ok=True)
        written = self.save_run(log, summary, out_dirpath)
        if svg:
            written += save_figures(log, out_dirpath)
        self.printer.print_metrics(summary)
        self.printer.print_written(written)
        return summary

    def compare(
        self, cfg: SimConfig, out_dirpath: Path, modes: list[AdaptationMode], workers: int = 1
    ) -> Comparison:
        if len(set(modes)) < MIN_COMPARE_MODES:
            msg = f"Comparison needs at least {MIN_COMPARE_MODES} distinct controller modes, got {len(set(modes))}"
            raise ConfigError(msg)
        modes = list(dict.fromkeys(modes))
        n_modes = len(modes)
        self.printer.print_message(
            f"Comparing {n_modes} controller {self.pluralizer.plural_noun('mode', n_modes)}: {', '.join(modes)}..."
        )
        configs = [cfg.with_adaptation(cfg.adaptation.model_copy(update={"mode": mode})) for mode in modes]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=min(workers, n_modes)) as executor:
                outcomes = list(executor.map(simulate_mode, configs))
        else:
            outcomes = [simulate_mode(mode_cfg) for mode_cfg in configs]

        out_dirpath.mkdir(parents=True, exist_ok=True)
        results, written = [], []
        for mode, mode_cfg, (log, note) in zip(modes, configs, outcomes, strict=True):
            if log is None:
                results.append(ModeResult(mode=mode, status="failed", note=note))
                continue
            summary = metrics(log, mode_cfg.disturbance)
            mode_dirpath = out_dirpath / mode
            mode_dirpath.mkdir(exist_ok=True)
            written += self.save_run(log, summary, mode_dirpath)
            results.append(
                ModeResult(
                    mode=mode,
                    status="ok",
                    final_xy_error=summary.final_xy_error,
                    final_error=summary.final_error,
                    estimation_error=summary.estimation_error,
                    cost=summary.cost,
                )
            )

        comparison = Comparison(modes=results).assess()
        comparison_filepath = out_dirpath / COMPARISON_FILENAME
        comparison_filepath.write_text(comparison.model_dump_json(indent=2))
        written.append(comparison_filepath)
        self.printer.print_comparison(comparison)
        self.printer.print_written(written)

        failed = [result.mode for result in results if result.status != "ok"]
        if failed:
            msg = f"Simulation failed for {', '.join(failed)}; partial results kept in {out_dirpath}"
            raise SimulationError(msg)
        return comparison

    def tune(self, cfg: TuningConfig, out_dirpath: Path, workers: int = 1) -> TunedGains:
        n, iters = cfg.pso.n, cfg.pso.iters
        self.printer.print_message(
            f"Tuning gains with {n} {self.pluralizer.plural_noun('particle', n)}"
            f" over {iters} {self.pluralizer.plural_noun('iteration', iters)}..."
        )
        gains, result = tune_gains(cfg.sim, cfg.pso, workers=workers)
        reference_cost = GainCost(template=cfg.sim)(Gains.published().as_vector())
        tuned = TunedGains(
            k1=gains.k1,
            k2=gains.k2,
            cost=result.best_cost,
            reference_cost=reference_cost,
            iterations=iters,
            evaluations=result.evaluations,
            seed=cfg.pso.seed,
        )

        out_dirpath.mkdir(parents=True, exist_ok=True)
        gains_filepath = out_dirpath / GAINS_FILENAME
        gains_filepath.write_text(tuned.model_dump_json(indent=2))
        history_filepath = out_dirpath / HISTORY_FILENAME
        self.save_history(result, history_filepath)

        self.printer.print_gains(gains, result.best_cost, reference_cost)
        self.printer.print_written([gains_filepath, history_filepath])
        return tuned

    def fis_surface(self, rulebase: RuleBase, sweep: Sweep, out_filepath: Path) -> Array:
        xs = sweep.points()
        gammas = FuzzySystem.from_rulebase(rulebase).infer_many(xs)
        out_filepath.parent.mkdir(parents=True, exist_ok=True)
        table = np.column_stack([xs, gammas])
        np.savetxt(out_filepath, table, delimiter=",", fmt=["%.12g", "%.17g"], header="x,gamma", comments="")
        n_rows = len(xs)
        self.printer.print_success(f"Wrote {n_rows} {self.pluralizer.plural_noun('row', n_rows)} to {out_filepath}")
        return table

    def save_run(self, log: SimLog, summary: Metrics, dirpath: Path) -> list[Path]:
        log_filepath = dirpath / LOG_FILENAME
        log.save_csv(log_filepath)
        metrics_filepath = dirpath / METRICS_FILENAME
        metrics_filepath.write_text(summary.model_dump_json(indent=2))
        return [log_filepath, metrics_filepath]

    def save_history(self, result: PsoResult, filepath: Path) -> None:
        iterations = np.arange(1, len(result.history) + 1)
        table = np.column_stack([iterations, result.history, result.gbest_history])
        header = ",".join(["iter", "best_cost"] + [f"k1_{i}" for i in range(1, 7)] + [f"k2_{i}" for i in range(1, 7)])
        fmt = ["%d"] + ["%.17g"] * (table.shape[1] - 1)
        np.savetxt(filepath, table, delimiter=",", fmt=fmt, header=header, comments="")

    def load_sim_config(self, filepath: Path) -> SimConfig:
        return SimConfig.load(filepath)

    def load_tuning_config(self, filepath: Path) -> TuningConfig:
        return TuningConfig.load(filepath)

    def load_rulebase(self, name_or_path: str) -> RuleBase:
        if name_or_path in BUILTIN_RULEBASES:
            return RuleBase.builtin(name_or_path)
        return RuleBase.load(Path(name_or_path))

"""Particle swarm minimization and gain tuning.

Random draws for an iteration are generated before its objective calls, so evaluating a swarm in parallel gives the
same result as evaluating it in order.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    FiniteFloat,
    NonNegativeFloat,
    PositiveInt,
    ValidationError,
    model_validator,
)

from rovtrack.controller import Gains
from rovtrack.errors import AllCandidatesFailedError, ConfigError, SimulationError, invalid_document, read_document
from rovtrack.extra_types import Array
from rovtrack.simulation import SimConfig, cost, run

logger = logging.getLogger(__name__)

N_GAINS = 12
TUNING_HORIZON = 20.0

Objective = Callable[[Array], float]
Bounds = tuple[FiniteFloat, FiniteFloat]


class PsoConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: PositiveInt = 100
    iters: PositiveInt = 100
    w: float = Field(default=0.729, ge=0.0, lt=1.0)
    c1: NonNegativeFloat = 1.49445
    c2: NonNegativeFloat = 1.49445
    bounds: Union[Bounds, list[Bounds]] = (0.1, 10.0)
    vclamp: float = Field(default=0.2, gt=0.0, le=1.0)
    seed: int = 0

    @model_validator(mode="after")
    def check_bounds(self) -> PsoConfig:
        pairs = self.bounds if isinstance(self.bounds, list) else [self.bounds]
        if not pairs or any(lo >= hi for lo, hi in pairs):
            msg = "every bound must satisfy lo < hi"
            raise ValueError(msg)
        return self

    def box(self, dim: int) -> tuple[Array, Array]:
        if isinstance(self.bounds, list):
            if len(self.bounds) != dim:
                msg = f"Expected {dim} bound pairs, got {len(self.bounds)}"
                raise ConfigError(msg)
            pairs = np.array(self.bounds, dtype=np.float64)
            return pairs[:, 0], pairs[:, 1]
        lo, hi = self.bounds
        return np.full(dim, lo), np.full(dim, hi)


@dataclass(frozen=True, kw_only=True)
class PsoResult:
    best_position: Array
    best_cost: float
    history: Array
    gbest_history: Array
    initial_best_cost: float
    evaluations: int


def _finite_or_inf(value: float) -> float:
    return value if math.isfinite(value) else math.inf


def _evaluate(objective: Objective, positions: Array, executor: Optional[Executor]) -> Array:
    if executor is None:
        costs = [objective(x) for x in positions]
    else:
        costs = list(executor.map(objective, positions))
    return np.array([_finite_or_inf(float(c)) for c in costs])


def pso_minimize(
    objective: Objective, cfg: PsoConfig, dim: int, workers: int = 1, require_finite_start: bool = False
) -> PsoResult:
    lo, hi = cfg.box(dim)
    v_max = cfg.vclamp * (hi - lo)
    rng = np.random.default_rng(cfg.seed)

    x = rng.uniform(lo, hi, size=(cfg.n, dim))
    v = np.zeros((cfg.n, dim))

    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        costs = _evaluate(objective, x, executor)
        evaluations = cfg.n
        p_best, p_cost = x.copy(), costs.copy()
        leader = int(np.argmin(p_cost))
        g_best, g_cost = p_best[leader].copy(), float(p_cost[leader])
        initial_best_cost = g_cost
        logger.info("Initial swarm of %d particles, best cost %.6g", cfg.n, g_cost)
        if require_finite_start and not math.isfinite(g_cost):
            msg = f"All {cfg.n} initial candidates failed to evaluate"
            raise AllCandidatesFailedError(msg)

        history = np.zeros(cfg.iters)
        gbest_history = np.zeros((cfg.iters, dim))
        for iteration in range(cfg.iters):
            r1 = rng.random((cfg.n, dim))
            r2 = rng.random((cfg.n, dim))
            v = cfg.w * v + cfg.c1 * r1 * (p_best - x) + cfg.c2 * r2 * (g_best - x)
            v = np.clip(v, -v_max, v_max)
            x = np.clip(x + v, lo, hi)

            costs = _evaluate(objective, x, executor)
            evaluations += cfg.n
            improved = costs < p_cost
            p_best[improved] = x[improved]
            p_cost[improved] = costs[improved]

            leader = int(np.argmin(p_cost))
            if p_cost[leader] < g_cost:
                g_best, g_cost = p_best[leader].copy(), float(p_cost[leader])
            history[iteration] = g_cost
            gbest_history[iteration] = g_best
            logger.info("Iteration %d/%d, best cost %.6g", iteration + 1, cfg.iters, g_cost)
    finally:
        if executor is not None:
            executor.shutdown()

    return PsoResult(
        best_position=g_best,
        best_cost=g_cost,
        history=history,
        gbest_history=gbest_history,
        initial_best_cost=initial_best_cost,
        evaluations=evaluations,
    )


@dataclass(frozen=True, kw_only=True)
class GainCost:
    template: SimConfig

    def __call__(self, x: Array) -> float:
        try:
            cfg = self.template.with_gains(Gains.from_vector(x))
            log = run(cfg)
        except (SimulationError, ValidationError) as exc:
            logger.debug("Candidate %s failed: %s", np.array2string(x, precision=4), exc)
            return math.inf
        return cost(log, np.array(cfg.cost.q), np.array(cfg.cost.r))


def tune_gains(template: SimConfig, cfg: PsoConfig, workers: int = 1) -> tuple[Gains, PsoResult]:
    result = pso_minimize(GainCost(template=template), cfg, N_GAINS, workers=workers, require_finite_start=True)
    return Gains.from_vector(result.best_position), result


def tuning_template() -> SimConfig:
    template = SimConfig()
    return template.model_copy(update={"integrator": template.integrator.model_copy(update={"tf": TUNING_HORIZON})})


class TuningConfig(BaseModel):
    """Swarm settings plus the simulation each candidate is scored on (20 s horizon unless `tf` is given)."""

    model_config = ConfigDict(extra="forbid")

    pso: PsoConfig = Field(default_factory=PsoConfig)
    sim: SimConfig = Field(default_factory=tuning_template)

    @model_validator(mode="before")
    @classmethod
    def default_horizon(cls, data: Any) -> Any:
        if isinstance(data, dict) and isinstance(data.get("sim"), dict):
            sim = dict(data["sim"])
            integrator = dict(sim.get("integrator") or {})
            integrator.setdefault("tf", TUNING_HORIZON)
            sim["integrator"] = integrator
            data = {**data, "sim": sim}
        return data

    @classmethod
    def load(cls, filepath: Path) -> TuningConfig:
        document = read_document(filepath, "tuning config")
        try:
            config = cls(**document)
        except ValidationError as exc:
            raise invalid_document(exc, filepath, "tuning config") from exc
        return config.model_copy(update={"sim": config.sim.resolved(filepath.parent)})

"""Mamdani inference for per-DOF adaptation rates.

Each rule maps one Gaussian antecedent over the error magnitude to one Gaussian consequent over the rate universe.
Implication clips the consequent at the firing strength (min), aggregation takes the pointwise max over rules and the
crisp output is the centre of gravity of the aggregate sampled on a uniform grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import skfuzzy as fuzz
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, ValidationError, model_validator

from rovtrack.errors import (
    ConfigError,
    DegenerateAggregateError,
    InvalidMembershipError,
    invalid_document,
    read_document,
)
from rovtrack.extra_types import Array

logger = logging.getLogger(__name__)

DATA_DIRPATH = Path(__file__).parent / "data"
BUILTIN_RULEBASES = {
    "translational": DATA_DIRPATH / "fis_translational.json",
    "rotational": DATA_DIRPATH / "fis_rotational.json",
}

DEGENERATE_PEAK = 1e-12
DEFAULT_GRID = 1201
MIN_GRID = 101
ANTECEDENT_WIDTH_DIVISOR = 4.0
CONSEQUENT_WIDTH_FRACTION = 0.05

TRANSLATIONAL_RULES = [(5.0, 100.0), (2.0, 50.0), (1.0, 20.0), (0.5, 10.0)]
ROTATIONAL_RULES = [(3.0, 1.0), (2.0, 0.5), (1.0, 0.2), (0.5, 0.1)]


class GaussianMf(BaseModel):
    model_config = ConfigDict(extra="forbid")

    center: FiniteFloat
    sigma: Optional[FiniteFloat] = None


class FuzzyRule(BaseModel):
    model_config = ConfigDict(extra="forbid")

    antecedent: GaussianMf
    consequent: GaussianMf

    @classmethod
    def new(cls, antecedent_center: float, consequent_center: float) -> FuzzyRule:
        return cls(antecedent=GaussianMf(center=antecedent_center), consequent=GaussianMf(center=consequent_center))


class RuleBase(BaseModel):
    """Ordered Mamdani rules with their output universe and grid resolution.

    Missing widths are filled in at construction: an antecedent gets a quarter of the distance to its nearest
    neighbouring antecedent centre, a consequent gets 5 % of its centre.
    """

    model_config = ConfigDict(extra="forbid")

    rules: list[FuzzyRule] = Field(min_length=1)
    output_universe: tuple[FiniteFloat, FiniteFloat]
    grid: int = Field(default=DEFAULT_GRID, ge=MIN_GRID)

    @model_validator(mode="after")
    def resolve_widths(self) -> RuleBase:
        lo, hi = self.output_universe
        if not lo < hi:
            msg = f"Output universe must be increasing, got [{lo}, {hi}]"
            raise ValueError(msg)
        centers = [rule.antecedent.center for rule in self.rules]
        resolved = []
        for i, rule in enumerate(self.rules):
            consequent_center = rule.consequent.center
            if consequent_center <= 0:
                msg = f"Rule {i} consequent centre must be positive, got {consequent_center}"
                raise ValueError(msg)
            if not lo <= consequent_center <= hi:
                msg = f"Rule {i} consequent centre {consequent_center} lies outside [{lo}, {hi}]"
                raise ValueError(msg)
            antecedent_sigma = rule.antecedent.sigma
            if antecedent_sigma is None:
                distances = [abs(c - rule.antecedent.center) for j, c in enumerate(centers) if j != i]
                spacing = min((d for d in distances if d > 0), default=max(abs(rule.antecedent.center), 1.0))
                antecedent_sigma = spacing / ANTECEDENT_WIDTH_DIVISOR
            consequent_sigma = rule.consequent.sigma
            if consequent_sigma is None:
                consequent_sigma = CONSEQUENT_WIDTH_FRACTION * consequent_center
            if antecedent_sigma <= 0 or consequent_sigma <= 0:
                msg = f"Rule {i} membership widths must be positive"
                raise ValueError(msg)
            resolved.append(
                FuzzyRule(
                    antecedent=GaussianMf(center=rule.antecedent.center, sigma=antecedent_sigma),
                    consequent=GaussianMf(center=consequent_center, sigma=consequent_sigma),
                )
            )
        self.rules = resolved
        return self

    def with_grid(self, grid: int) -> RuleBase:
        return RuleBase(rules=self.rules, output_universe=self.output_universe, grid=grid)

    @classmethod
    def new(cls, pairs: list[tuple[float, float]], output_universe: tuple[float, float]) -> RuleBase:
        rules = [FuzzyRule.new(antecedent, consequent) for antecedent, consequent in pairs]
        return cls(rules=rules, output_universe=output_universe)

    @classmethod
    def load(cls, filepath: Path) -> RuleBase:
        rulebase_dict = read_document(filepath, "rule base")
        try:
            return cls(**rulebase_dict)
        except ValidationError as exc:
            raise invalid_document(exc, filepath, "rule base") from exc

    @classmethod
    def builtin(cls, name: str) -> RuleBase:
        if filepath := BUILTIN_RULEBASES.get(name):
            return cls.load(filepath)
        msg = f"Unknown builtin rule base {name}, expected one of: {', '.join(BUILTIN_RULEBASES)}"
        raise ConfigError(msg)


@dataclass(frozen=True, kw_only=True, eq=False)
class FuzzySystem:
    rulebase: RuleBase
    grid_points: Array
    antecedent_centers: Array
    antecedent_sigmas: Array
    consequent_centers: Array
    consequent_table: Array

    @classmethod
    def from_rulebase(cls, rb: RuleBase) -> FuzzySystem:
        lo, hi = rb.output_universe
        grid_points = np.linspace(lo, hi, rb.grid)
        consequent_centers = np.array([rule.consequent.center for rule in rb.rules])
        consequent_sigmas = np.array([rule.consequent.sigma for rule in rb.rules])
        return cls(
            rulebase=rb,
            grid_points=grid_points,
            antecedent_centers=np.array([rule.antecedent.center for rule in rb.rules]),
            antecedent_sigmas=np.array([rule.antecedent.sigma for rule in rb.rules]),
            consequent_centers=consequent_centers,
            consequent_table=fuzz.gaussmf(
                grid_points[None, :], consequent_centers[:, None], consequent_sigmas[:, None]
            ),
        )

    def firing(self, x: float) -> Array:
        return fuzz.gaussmf(np.float64(x), self.antecedent_centers, self.antecedent_sigmas)

    def aggregate(self, x: float) -> Array:
        return np.max(np.minimum(self.firing(x)[:, None], self.consequent_table), axis=0)

    def fallback(self, x: float) -> float:
        nearest = int(np.argmin(np.abs(self.antecedent_centers - x)))
        return float(self.consequent_centers[nearest])

    def infer(self, x: float) -> float:
        try:
            return cog_defuzz(self.grid_points, self.aggregate(x))
        except DegenerateAggregateError:
            gamma = self.fallback(x)
            logger.debug("Degenerate aggregate at x=%g, falling back to nearest rule output %g", x, gamma)
            return gamma

    def infer_many(self, xs: Array) -> Array:
        xs = np.asarray(xs, dtype=np.float64)
        firing = fuzz.gaussmf(xs[:, None], self.antecedent_centers[None, :], self.antecedent_sigmas[None, :])
        aggregates = np.max(np.minimum(firing[:, :, None], self.consequent_table[None, :, :]), axis=1)
        degenerate = np.max(aggregates, axis=1) < DEGENERATE_PEAK
        moments = aggregates @ self.grid_points
        weights = np.sum(aggregates, axis=1)
        gammas = np.divide(moments, weights, out=np.zeros_like(moments), where=~degenerate)
        for i in np.flatnonzero(degenerate):
            gammas[i] = self.fallback(float(xs[i]))
        return gammas


def membership(mf: GaussianMf, x: float) -> float:
    if mf.sigma is None or mf.sigma <= 0:
        msg = f"Gaussian membership width must be positive, got {mf.sigma}"
        raise InvalidMembershipError(msg)
    return float(fuzz.gaussmf(np.float64(x), mf.center, mf.sigma))


def cog_defuzz(grid: Array, mu: Array) -> float:
    if mu.size == 0 or np.max(mu) < DEGENERATE_PEAK:
        msg = "Aggregated membership is zero everywhere on the output grid"
        raise DegenerateAggregateError(msg)
    return float(np.sum(grid * mu) / np.sum(mu))


def infer(rb: RuleBase, x: float) -> float:
    return FuzzySystem.from_rulebase(rb).infer(x)


def infer_many(rb: RuleBase, xs: Array) -> Array:
    return FuzzySystem.from_rulebase(rb).infer_many(xs)


def default_rulebases() -> tuple[RuleBase, RuleBase]:
    translational = RuleBase.new(TRANSLATIONAL_RULES, output_universe=(0.0, 120.0))
    rotational = RuleBase.new(ROTATIONAL_RULES, output_universe=(0.0, 1.2))
    return translational, rotational

from __future__ import annotations

import logging
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError, field_validator

from rovtrack.errors import ConfigError, invalid_document, read_document
from rovtrack.extra_types import Vector3, Vector6

logger = logging.getLogger(__name__)

DATA_DIRPATH = Path(__file__).parent / "data"
BUILTIN_VEHICLES = {"bluerov2_heavy": DATA_DIRPATH / "bluerov2_heavy.json"}


class VehicleParams(BaseModel):
    """Physical constants of a fully actuated vehicle.

    Keys mirror the usual hydrodynamic names: `Ix`, `Iy`, `Iz` are the principal inertias, `Ixy`, `Iyz`, `Izx` the
    inertia products, `added_mass` the diagonal (X_udot ... N_rdot), `d_lin` and `d_quad` the linear and quadratic
    damping diagonals. All added-mass and damping entries are magnitudes and must be non-negative.
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    m: PositiveFloat
    volume: PositiveFloat
    ix: PositiveFloat = Field(alias="Ix")
    iy: PositiveFloat = Field(alias="Iy")
    iz: PositiveFloat = Field(alias="Iz")
    ixy: float = Field(default=0.0, alias="Ixy")
    iyz: float = Field(default=0.0, alias="Iyz")
    izx: float = Field(default=0.0, alias="Izx")
    cog: Vector3 = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    cob: Vector3 = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    added_mass: Vector6
    d_lin: Vector6
    d_quad: Vector6
    rho: PositiveFloat = 1000.0
    g0: PositiveFloat = 9.81

    @field_validator("added_mass", "d_lin", "d_quad")
    @classmethod
    def check_non_negative(cls, values: list[float]) -> list[float]:
        if any(value < 0 for value in values):
            msg = "coefficients must be non-negative magnitudes"
            raise ValueError(msg)
        return values

    @property
    def weight(self) -> float:
        return self.m * self.g0

    @property
    def buoyancy(self) -> float:
        return self.rho * self.g0 * self.volume

    @classmethod
    def load(cls, filepath: Path) -> VehicleParams:
        params_dict = read_document(filepath, "vehicle parameter")
        try:
            return cls(**params_dict)
        except ValidationError as exc:
            raise invalid_document(exc, filepath, "vehicle parameters") from exc

    @classmethod
    def builtin(cls, name: str) -> VehicleParams:
        if filepath := BUILTIN_VEHICLES.get(name):
            return cls.load(filepath)
        msg = f"Unknown builtin vehicle {name}, expected one of: {', '.join(BUILTIN_VEHICLES)}"
        raise ConfigError(msg)

    @classmethod
    def bluerov2_heavy(cls) -> VehicleParams:
        return cls.builtin("bluerov2_heavy")

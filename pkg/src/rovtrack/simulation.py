"""Closed-loop simulation of vehicle, controller and disturbance estimate.

The integrated state is the 18-vector [eta, nu, tau_hat]. Each run is self-contained, so any number of runs can
execute concurrently in separate workers.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, PositiveFloat, ValidationError, model_validator
from scipy.integrate import cumulative_trapezoid, trapezoid

from rovtrack.controller import AdaptationConfig, ControlOutput, Controller, Gains, ReferencePoint
from rovtrack.dynamics import Vehicle, WrenchRole, check_wrench, kinematic_transform
from rovtrack.errors import (
    EmptyLogError,
    NonFiniteStateError,
    SimulationError,
    invalid_document,
    read_document,
)
from rovtrack.extra_types import Array, Vector6
from rovtrack.params import BUILTIN_VEHICLES, VehicleParams
from rovtrack.trajectory import ReferenceFn, StraightLine, Trajectory, check_horizon, compile_trajectory

logger = logging.getLogger(__name__)

DEFAULT_DISTURBANCE = [-1.0, 1.0, 2.0, 0.1, 0.1, 0.0]
STEP_TOLERANCE = 1e-9

DOF_SUFFIXES = range(1, 7)
LOG_COLUMNS = [
    "t",
    *(f"eta{i}" for i in DOF_SUFFIXES),
    *(f"nu{i}" for i in DOF_SUFFIXES),
    *(f"etad{i}" for i in DOF_SUFFIXES),
    *(f"tau{i}" for i in DOF_SUFFIXES),
    *(f"tauhat{i}" for i in DOF_SUFFIXES),
    *(f"taud{i}" for i in DOF_SUFFIXES),
    *(f"s{i}" for i in DOF_SUFFIXES),
    *(f"gamma{i}" for i in DOF_SUFFIXES),
    "Vc",
    "Jrun",
]

SIX_VECTOR_FIELDS = ("eta", "nu", "eta_d", "tau", "tau_hat", "tau_d", "s", "gamma")

State = tuple[Array, Array, Array]


class DisturbanceStep(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t: NonNegativeFloat
    wrench: Vector6


class DisturbanceModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    constant: Vector6 = Field(default_factory=lambda: list(DEFAULT_DISTURBANCE))
    schedule: list[DisturbanceStep] = Field(default_factory=list)
    bound: Optional[Vector6] = None

    @model_validator(mode="after")
    def check_schedule(self) -> DisturbanceModel:
        times = [step.t for step in self.schedule]
        if any(later <= earlier for earlier, later in zip(times, times[1:], strict=False)):
            msg = "disturbance schedule times must be strictly increasing"
            raise ValueError(msg)
        if self.bound is not None:
            bound = np.array(self.bound)
            if np.any(bound < 0):
                msg = "disturbance bound entries must be non-negative"
                raise ValueError(msg)
            candidates = [np.array(self.constant)] + [np.array(self.constant) + step.wrench for step in self.schedule]
            for wrench in candidates:
                check_wrench(wrench, WrenchRole.DISTURBANCE, bound)
        return self

    @classmethod
    def zero(cls) -> DisturbanceModel:
        return cls(constant=[0.0] * 6)

    def value_at(self, t: float) -> Array:
        value = np.array(self.constant)
        active = [step for step in self.schedule if step.t <= t]
        if active:
            value = value + np.array(active[-1].wrench)
        return value

    def values(self, times: Array) -> Array:
        return np.array([self.value_at(float(t)) for t in times])


class IntegratorConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dt: PositiveFloat = 0.01
    tf: NonNegativeFloat = 60.0
    control_rate: Optional[PositiveFloat] = None

    @model_validator(mode="after")
    def check_grid(self) -> IntegratorConfig:
        if 0 < self.tf < self.dt:
            msg = f"tf ({self.tf}) must be zero or at least one step dt ({self.dt})"
            raise ValueError(msg)
        if self.control_rate is not None:
            ratio = 1.0 / (self.control_rate * self.dt)
            if ratio < 1 - STEP_TOLERANCE or abs(ratio - round(ratio)) > STEP_TOLERANCE * max(ratio, 1.0):
                msg = f"control_rate {self.control_rate} Hz must divide the integration rate {1 / self.dt:g} Hz"
                raise ValueError(msg)
        return self

    @property
    def n_steps(self) -> int:
        return math.floor(self.tf / self.dt + STEP_TOLERANCE)

    @property
    def hold_steps(self) -> Optional[int]:
        if self.control_rate is None:
            return None
        return round(1.0 / (self.control_rate * self.dt))


class CostWeights(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    q: Vector6 = Field(default_factory=lambda: [1.0] * 6, alias="Q")
    r: Vector6 = Field(default_factory=lambda: [1.0] * 6, alias="R")

    @model_validator(mode="after")
    def check_non_negative(self) -> CostWeights:
        if any(w < 0 for w in self.q + self.r):
            msg = "cost weights must be non-negative"
            raise ValueError(msg)
        return self


class InitialState(BaseModel):
    model_config = ConfigDict(extra="forbid")

    eta: Vector6 = Field(default_factory=lambda: [0.0] * 6)
    nu: Vector6 = Field(default_factory=lambda: [0.0] * 6)
    tau_hat: Vector6 = Field(default_factory=lambda: [0.0] * 6)


class SimConfig(BaseModel):
    """A complete closed-loop experiment.

    `vehicle` is either an inline parameter set or the name of a builtin vehicle or parameter file; names are resolved
    when the config is loaded from disk.
    """

    model_config = ConfigDict(extra="forbid")

    vehicle: Union[VehicleParams, str] = "bluerov2_heavy"
    trajectory: Trajectory = Field(default_factory=StraightLine)
    disturbance: DisturbanceModel = Field(default_factory=DisturbanceModel)
    gains: Gains = Field(default_factory=Gains.published)
    adaptation: AdaptationConfig = Field(default_factory=AdaptationConfig)
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    cost: CostWeights = Field(default_factory=CostWeights)
    initial: InitialState = Field(default_factory=InitialState)
    seed: int = 0

    @classmethod
    def load(cls, filepath: Path) -> SimConfig:
        return cls.from_document(read_document(filepath, "simulation config"), filepath)

    @classmethod
    def from_document(cls, document: dict[str, Any], filepath: Path) -> SimConfig:
        try:
            config = cls(**document)
        except ValidationError as exc:
            raise invalid_document(exc, filepath, "simulation config") from exc
        return config.resolved(filepath.parent)

    def resolved(self, base_dirpath: Path) -> SimConfig:
        if isinstance(self.vehicle, VehicleParams):
            return self
        if self.vehicle in BUILTIN_VEHICLES:
            params = VehicleParams.builtin(self.vehicle)
        else:
            filepath = Path(self.vehicle)
            params = VehicleParams.load(filepath if filepath.is_absolute() else base_dirpath / filepath)
        return self.model_copy(update={"vehicle": params})

    def vehicle_params(self) -> VehicleParams:
        if isinstance(self.vehicle, VehicleParams):
            return self.vehicle
        if self.vehicle in BUILTIN_VEHICLES:
            return VehicleParams.builtin(self.vehicle)
        return VehicleParams.load(Path(self.vehicle))

    def with_gains(self, gains: Gains) -> SimConfig:
        return self.model_copy(update={"gains": gains})

    def with_adaptation(self, adaptation: AdaptationConfig) -> SimConfig:
        return self.model_copy(update={"adaptation": adaptation})

    def initial_state(self) -> State:
        return np.array(self.initial.eta), np.array(self.initial.nu), np.array(self.initial.tau_hat)


@dataclass(frozen=True, kw_only=True)
class SimLog:
    t: Array
    eta: Array
    nu: Array
    eta_d: Array
    tau: Array
    tau_hat: Array
    tau_d: Array
    s: Array
    gamma: Array
    v_c: Array
    j_run: Array

    def __len__(self) -> int:
        return len(self.t)

    def table(self) -> Array:
        return np.column_stack([
            self.t,
            self.eta,
            self.nu,
            self.eta_d,
            self.tau,
            self.tau_hat,
            self.tau_d,
            self.s,
            self.gamma,
            self.v_c,
            self.j_run,
        ])

    def save_csv(self, filepath: Path) -> None:
        np.savetxt(filepath, self.table(), delimiter=",", fmt="%.17g", header=",".join(LOG_COLUMNS), comments="")

    @classmethod
    def load_csv(cls, filepath: Path) -> SimLog:
        table = np.atleast_2d(np.loadtxt(filepath, delimiter=",", skiprows=1))
        blocks = [table[:, 1 + 6 * i : 7 + 6 * i] for i in range(8)]
        records = dict(zip(SIX_VECTOR_FIELDS, blocks, strict=True))
        return cls(t=table[:, 0], **records, v_c=table[:, -2], j_run=table[:, -1])


@dataclass(frozen=True, kw_only=True)
class Hold:
    tau: Array
    gamma: Array


@dataclass(frozen=True, kw_only=True)
class Sample:
    ref: ReferencePoint
    control: ControlOutput
    tau: Array
    gamma: Array
    tau_d: Array
    x_dot: Array


@dataclass(frozen=True, kw_only=True)
class ClosedLoop:
    controller: Controller
    reference: ReferenceFn
    disturbance: DisturbanceModel
    horizon: float

    @classmethod
    def from_config(cls, cfg: SimConfig) -> ClosedLoop:
        vehicle = Vehicle.from_params(cfg.vehicle_params())
        return cls(
            controller=Controller.new(vehicle, cfg.gains, cfg.adaptation),
            reference=compile_trajectory(cfg.trajectory),
            disturbance=cfg.disturbance,
            horizon=cfg.integrator.tf + cfg.integrator.dt,
        )

    def sample(self, t: float, x: Array, hold: Optional[Hold] = None) -> Sample:
        eta, nu, tau_hat = x[:6], x[6:12], x[12:]
        check_horizon(t, self.horizon)
        ref = self.reference(t)
        control = self.controller.evaluate(eta, nu, ref, tau_hat)
        if hold is None:
            tau, gamma = control.tau, self.controller.rates(control.fis_signal)
        else:
            tau, gamma = hold.tau, hold.gamma
        check_wrench(tau, WrenchRole.CONTROL)
        tau_d = self.disturbance.value_at(t)

        vehicle = self.controller.vehicle
        eta_dot = kinematic_transform(eta) @ nu
        nu_dot = vehicle.mass_inv @ (tau + tau_d - vehicle.hydrodynamic_forces(eta, nu))
        tau_hat_dot = self.controller.estimate_rate(gamma, control.b, tau_hat)
        x_dot = np.concatenate([eta_dot, nu_dot, tau_hat_dot])
        return Sample(ref=ref, control=control, tau=tau, gamma=gamma, tau_d=tau_d, x_dot=x_dot)

    def derivative(self, t: float, x: Array, hold: Optional[Hold] = None) -> Array:
        return self.sample(t, x, hold).x_dot

    def step(self, t: float, x: Array, dt: float, hold: Optional[Hold] = None, k1: Optional[Array] = None) -> Array:
        x_next = rk4(lambda t_, x_: self.derivative(t_, x_, hold), t, x, dt, k1=k1)
        x_next[12:] = self.controller.clamp(x_next[12:])
        if not np.all(np.isfinite(x_next)):
            msg = f"State left the finite range between t={t:g} s and t={t + dt:g} s"
            raise NonFiniteStateError(msg, time=t + dt)
        return x_next


def rk4(f: Callable[[float, Array], Array], t: float, x: Array, dt: float, k1: Optional[Array] = None) -> Array:
    """Classical fourth-order Runge-Kutta step; `k1` may be passed when f(t, x) is already known."""
    if k1 is None:
        k1 = f(t, x)
    k2 = f(t + dt / 2, x + dt / 2 * k1)
    k3 = f(t + dt / 2, x + dt / 2 * k2)
    k4 = f(t + dt, x + dt * k3)
    return x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_step(cfg: SimConfig, state: State, t: float) -> State:
    loop = ClosedLoop.from_config(cfg)
    x_next = loop.step(t, np.concatenate(state), cfg.integrator.dt)
    return x_next[:6], x_next[6:12], x_next[12:]


def run(cfg: SimConfig) -> SimLog:
    loop = ClosedLoop.from_config(cfg)
    dt = cfg.integrator.dt
    n_rows = cfg.integrator.n_steps + 1
    hold_steps = cfg.integrator.hold_steps
    logger.info("Simulating %d steps of %g s with %s adaptation", n_rows - 1, dt, cfg.adaptation.mode)

    records = {name: np.zeros((n_rows, 6)) for name in SIX_VECTOR_FIELDS}
    times = np.arange(n_rows) * dt
    x = np.concatenate(cfg.initial_state())
    hold: Optional[Hold] = None
    t = 0.0
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(n_rows):
                t = float(times[k])
                refresh = hold_steps is not None and k % hold_steps == 0
                sample = loop.sample(t, x, None if refresh else hold)
                if refresh:
                    hold = Hold(tau=sample.tau, gamma=sample.gamma)
                for name, value in (
                    ("eta", x[:6]),
                    ("nu", x[6:12]),
                    ("eta_d", sample.ref.eta),
                    ("tau", sample.tau),
                    ("tau_hat", x[12:]),
                    ("tau_d", sample.tau_d),
                    ("s", sample.control.s),
                    ("gamma", sample.gamma),
                ):
                    records[name][k] = value
                if k < n_rows - 1:
                    x = loop.step(t, x, dt, hold, k1=sample.x_dot)
    except SimulationError as exc:
        if exc.time is None:
            exc.time = t
        exc.add_note(f"Simulation failed at t={exc.time:.4f} s")
        raise

    q, r = np.array(cfg.cost.q), np.array(cfg.cost.r)
    integrand = stage_cost(records["s"], records["tau"], q, r)
    j_run = cumulative_trapezoid(integrand, times, initial=0.0) if n_rows > 1 else np.zeros(1)
    v_c = 0.5 * np.sum(records["s"] ** 2, axis=1)
    logger.info("Finished simulation, final cost %.6g", j_run[-1])
    return SimLog(t=times, **records, v_c=v_c, j_run=j_run)


def stage_cost(s: Array, tau: Array, q: Array, r: Array) -> Array:
    return np.sum(q * s**2, axis=1) + np.sum(r * tau**2, axis=1)


def cost(log: SimLog, q: Array, r: Array) -> float:
    if len(log) == 0:
        msg = "Cannot compute the cost of an empty log"
        raise EmptyLogError(msg)
    if len(log) == 1:
        return 0.0
    return float(trapezoid(stage_cost(log.s, log.tau, np.asarray(q), np.asarray(r)), log.t))


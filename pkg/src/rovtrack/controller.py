"""Backstepping tracking law with Lyapunov-based disturbance adaptation.

With s = e_dot + k1 e the wrench

    tau = M J^-1 (eta_dd_d - k1 e_dot - k2 s - J_dot nu) + (C + D) nu + g - tau_hat

turns the closed loop into s_dot = -k2 s + J M^-1 (tau_d - tau_hat). The estimate follows
tau_hat_dot = Gamma (J M^-1)^T s, which cancels the cross term of V = s's/2 + tau_tilde' Gamma^-1 tau_tilde/2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from rovtrack.dynamics import Vehicle, inverse_kinematic_transform, kinematic_transform, transform_rate
from rovtrack.extra_types import Array, Vector6
from rovtrack.fuzzy import FuzzySystem, RuleBase, default_rulebases

logger = logging.getLogger(__name__)

PUBLISHED_K1 = [10.0, 1.0, 5.9, 1.7, 5.8, 0.8]
PUBLISHED_K2 = [5.2, 10.0, 1.0, 5.8, 1.9, 5.5]
YAW = 5


class AdaptationMode(StrEnum):
    BASELINE = "baseline"
    CONSTANT = "constant"
    FUZZY = "fuzzy"


class FisInput(StrEnum):
    ADJOINT = "adjoint"
    FORWARD = "forward"


class Gains(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k1: Vector6 = Field(default_factory=lambda: list(PUBLISHED_K1))
    k2: Vector6 = Field(default_factory=lambda: list(PUBLISHED_K2))

    @model_validator(mode="after")
    def check_positive(self) -> Gains:
        if any(k <= 0 for k in self.k1 + self.k2):
            msg = "all controller gains must be positive"
            raise ValueError(msg)
        return self

    @classmethod
    def published(cls) -> Gains:
        return cls(k1=list(PUBLISHED_K1), k2=list(PUBLISHED_K2))

    @classmethod
    def from_vector(cls, x: Array) -> Gains:
        return cls(k1=[float(k) for k in x[:6]], k2=[float(k) for k in x[6:]])

    def as_vector(self) -> Array:
        return np.array(self.k1 + self.k2)


class AdaptationConfig(BaseModel):
    """How the disturbance estimate is adapted.

    `gamma` is used in constant mode, the rule bases in fuzzy mode (translational for DOFs 1-3, rotational for 4-6),
    and baseline mode freezes the estimate at its initial value. `d_max` clamps the estimate componentwise, 0 meaning
    unclamped. The disturbance-rate bound of the low-frequency assumption does not enter any computation.
    """

    model_config = ConfigDict(extra="forbid")

    mode: AdaptationMode = AdaptationMode.FUZZY
    gamma: Vector6 = Field(default_factory=lambda: [20.0, 20.0, 20.0, 0.2, 0.2, 0.2])
    translational: Optional[RuleBase] = None
    rotational: Optional[RuleBase] = None
    d_max: Vector6 = Field(default_factory=lambda: [10.0, 10.0, 10.0, 2.0, 2.0, 2.0])
    fis_input: FisInput = FisInput.ADJOINT

    @model_validator(mode="after")
    def check_rates(self) -> AdaptationConfig:
        if any(d < 0 for d in self.d_max):
            msg = "d_max entries must be non-negative"
            raise ValueError(msg)
        if any(g < 0 for g in self.gamma):
            msg = "adaptation rates must be non-negative"
            raise ValueError(msg)
        if self.mode == AdaptationMode.CONSTANT and any(g <= 0 for g in self.gamma):
            msg = "constant adaptation requires every rate in gamma to be positive"
            raise ValueError(msg)
        return self

    def rulebases(self) -> tuple[RuleBase, RuleBase]:
        default_translational, default_rotational = default_rulebases()
        return self.translational or default_translational, self.rotational or default_rotational


@dataclass(frozen=True, kw_only=True)
class ReferencePoint:
    eta: Array
    eta_dot: Array
    eta_ddot: Array

    @classmethod
    def hold(cls, eta: Array) -> ReferencePoint:
        return cls(eta=np.asarray(eta, dtype=np.float64), eta_dot=np.zeros(6), eta_ddot=np.zeros(6))


@dataclass(kw_only=True)
class ControllerState:
    tau_hat: Array = field(default_factory=lambda: np.zeros(6))
    s: Array = field(default_factory=lambda: np.zeros(6))
    gamma: Array = field(default_factory=lambda: np.zeros(6))

    def estimation_error(self, tau_d: Array) -> Array:
        return self.tau_hat - tau_d


@dataclass(frozen=True, kw_only=True)
class ControlOutput:
    tau: Array
    s: Array
    b: Array
    fis_signal: Array


def wrap_angles(angles: Array) -> Array:
    return np.pi - (np.pi - angles) % (2 * np.pi)


def wrap_angle(angle: float) -> float:
    return float(wrap_angles(np.asarray(angle)))


def tracking_error(eta: Array, nu: Array, ref: ReferencePoint, j: Optional[Array] = None) -> tuple[Array, Array]:
    if j is None:
        j = kinematic_transform(eta)
    e = eta - ref.eta
    e[YAW] = wrap_angle(e[YAW])
    e_dot = j @ nu - ref.eta_dot
    return e, e_dot


def sliding_surface(e: Array, e_dot: Array, k1: Array) -> Array:
    return e_dot + np.asarray(k1) * e


def control_wrench(vehicle: Vehicle, eta: Array, nu: Array, ref: ReferencePoint, gains: Gains, tau_hat: Array) -> Array:
    controller = Controller.new(vehicle, gains, AdaptationConfig(mode=AdaptationMode.BASELINE))
    return controller.evaluate(eta, nu, ref, tau_hat).tau


def adaptation_drive(vehicle: Vehicle, eta: Array, s: Array) -> Array:
    """Return b = (J M^-1)^T s = M^-1 J^T s."""
    return vehicle.mass_inv @ (kinematic_transform(eta).T @ s)


def adaptation_rates(cfg: AdaptationConfig, b: Array) -> Array:
    translational, rotational = cfg.rulebases()
    return rates_for(
        cfg,
        b,
        FuzzySystem.from_rulebase(translational),
        FuzzySystem.from_rulebase(rotational),
    )


def rates_for(cfg: AdaptationConfig, signal: Array, translational: FuzzySystem, rotational: FuzzySystem) -> Array:
    match cfg.mode:
        case AdaptationMode.BASELINE:
            return np.zeros(6)
        case AdaptationMode.CONSTANT:
            return np.array(cfg.gamma)
        case AdaptationMode.FUZZY:
            magnitudes = np.abs(signal)
            return np.concatenate([translational.infer_many(magnitudes[:3]), rotational.infer_many(magnitudes[3:])])


def adaptation_derivative(gamma: Array, b: Array, tau_hat: Array, d_max: Array) -> Array:
    rate = gamma * b
    clamped = d_max > 0
    at_upper = clamped & (tau_hat >= d_max) & (rate > 0)
    at_lower = clamped & (tau_hat <= -d_max) & (rate < 0)
    return np.where(at_upper | at_lower, 0.0, rate)


def pose_acceleration(vehicle: Vehicle, eta: Array, nu: Array, tau: Array, tau_d: Array) -> Array:
    _, nu_dot = vehicle.state_derivative(eta, nu, tau, tau_d)
    return transform_rate(eta, nu) @ nu + kinematic_transform(eta) @ nu_dot


def lyapunov(s: Array, tau_tilde: Array, gamma: Array) -> float:
    return float(0.5 * s @ s + 0.5 * tau_tilde @ (tau_tilde / gamma))


def lyapunov_rate(  # noqa: PLR0913
    vehicle: Vehicle,
    eta: Array,
    nu: Array,
    ref: ReferencePoint,
    gains: Gains,
    tau_hat: Array,
    tau_d: Array,
    gamma: Array,
) -> float:
    """Time derivative of V along the closed loop with a constant rate vector gamma."""
    k1 = np.asarray(gains.k1)
    e, e_dot = tracking_error(eta, nu, ref)
    s = sliding_surface(e, e_dot, k1)
    tau = control_wrench(vehicle, eta, nu, ref, gains, tau_hat)
    s_dot = pose_acceleration(vehicle, eta, nu, tau, tau_d) - ref.eta_ddot + k1 * e_dot
    tau_hat_dot = gamma * adaptation_drive(vehicle, eta, s)
    tau_tilde = tau_hat - tau_d
    return float(s @ s_dot + tau_tilde @ (tau_hat_dot / gamma))


@dataclass(frozen=True, kw_only=True)
class Controller:
    vehicle: Vehicle
    k1: Array
    k2: Array
    adaptation: AdaptationConfig
    d_max: Array
    translational: FuzzySystem
    rotational: FuzzySystem

    @classmethod
    def new(cls, vehicle: Vehicle, gains: Gains, adaptation: AdaptationConfig) -> Controller:
        translational, rotational = adaptation.rulebases()
        return cls(
            vehicle=vehicle,
            k1=np.array(gains.k1),
            k2=np.array(gains.k2),
            adaptation=adaptation,
            d_max=np.array(adaptation.d_max),
            translational=FuzzySystem.from_rulebase(translational),
            rotational=FuzzySystem.from_rulebase(rotational),
        )

    def evaluate(self, eta: Array, nu: Array, ref: ReferencePoint, tau_hat: Array) -> ControlOutput:
        j = kinematic_transform(eta)
        j_inv = inverse_kinematic_transform(eta)
        a = transform_rate(eta, nu) @ nu

        e, e_dot = tracking_error(eta, nu, ref, j=j)
        s = sliding_surface(e, e_dot, self.k1)

        vehicle = self.vehicle
        command = ref.eta_ddot - self.k1 * e_dot - self.k2 * s - a
        tau = vehicle.mass @ (j_inv @ command) + vehicle.hydrodynamic_forces(eta, nu) - tau_hat

        m_inv_s = vehicle.mass_inv @ s
        b = vehicle.mass_inv @ (j.T @ s)
        fis_signal = b if self.adaptation.fis_input == FisInput.ADJOINT else j @ m_inv_s
        return ControlOutput(tau=tau, s=s, b=b, fis_signal=fis_signal)

    def rates(self, fis_signal: Array) -> Array:
        return rates_for(self.adaptation, fis_signal, self.translational, self.rotational)

    def estimate_rate(self, gamma: Array, b: Array, tau_hat: Array) -> Array:
        return adaptation_derivative(gamma, b, tau_hat, self.d_max)

    def clamp(self, tau_hat: Array) -> Array:
        bound = np.where(self.d_max > 0, self.d_max, np.inf)
        return np.clip(tau_hat, -bound, bound)

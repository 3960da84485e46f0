"""Rigid-body model of a fully actuated underwater vehicle.

Poses are `eta = [X, Y, Z, phi, theta, psi]` in the global frame (ZYX Euler angles), body velocities are
`nu = [u, v, w, p, q, r]` and wrenches are body-frame forces and moments. All three are plain length-6 numpy arrays.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from rovtrack.errors import NonFiniteStateError, SingularAttitudeError
from rovtrack.extra_types import Array
from rovtrack.params import VehicleParams

logger = logging.getLogger(__name__)

ATTITUDE_MARGIN = 1e-3


class WrenchRole(StrEnum):
    CONTROL = "control"
    DISTURBANCE = "disturbance"


def check_attitude(eta: Array, margin: float = ATTITUDE_MARGIN) -> None:
    limit = np.pi / 2 - margin
    phi, theta = eta[3], eta[4]
    if not (abs(phi) <= limit and abs(theta) <= limit):
        msg = f"Attitude outside the Euler-angle margin: roll={phi:.6f} rad, pitch={theta:.6f} rad (limit {limit:.6f})"
        raise SingularAttitudeError(msg)


def check_wrench(tau: Array, role: WrenchRole, bound: Array | None = None) -> None:
    if not np.all(np.isfinite(tau)):
        msg = f"Non-finite {role} wrench: {tau}"
        raise NonFiniteStateError(msg)
    if bound is not None and np.any(np.abs(tau) > bound):
        msg = f"The {role} wrench {tau} exceeds its bound {bound}"
        raise ValueError(msg)


def skew(a: Array) -> Array:
    return np.array([
        [0.0, -a[2], a[1]],
        [a[2], 0.0, -a[0]],
        [-a[1], a[0], 0.0],
    ])


def rotation_matrix(phi: float, theta: float, psi: float) -> Array:
    cphi, sphi = np.cos(phi), np.sin(phi)
    cth, sth = np.cos(theta), np.sin(theta)
    cpsi, spsi = np.cos(psi), np.sin(psi)
    return np.array([
        [cpsi * cth, -spsi * cphi + cpsi * sth * sphi, spsi * sphi + cpsi * cphi * sth],
        [spsi * cth, cpsi * cphi + sphi * sth * spsi, -cpsi * sphi + sth * spsi * cphi],
        [-sth, cth * sphi, cth * cphi],
    ])


def euler_rate_matrix(phi: float, theta: float) -> Array:
    cphi, sphi = np.cos(phi), np.sin(phi)
    cth, tth = np.cos(theta), np.tan(theta)
    return np.array([
        [1.0, sphi * tth, cphi * tth],
        [0.0, cphi, -sphi],
        [0.0, sphi / cth, cphi / cth],
    ])


def _block_diag(top: Array, bottom: Array) -> Array:
    out = np.zeros((6, 6))
    out[:3, :3] = top
    out[3:, 3:] = bottom
    return out


def kinematic_transform(eta: Array, margin: float = ATTITUDE_MARGIN) -> Array:
    check_attitude(eta, margin)
    phi, theta, psi = eta[3], eta[4], eta[5]
    return _block_diag(rotation_matrix(phi, theta, psi), euler_rate_matrix(phi, theta))


def inverse_kinematic_transform(eta: Array, margin: float = ATTITUDE_MARGIN) -> Array:
    check_attitude(eta, margin)
    phi, theta, psi = eta[3], eta[4], eta[5]
    cphi, sphi = np.cos(phi), np.sin(phi)
    cth, sth = np.cos(theta), np.sin(theta)
    rate_inv = np.array([
        [1.0, 0.0, -sth],
        [0.0, cphi, cth * sphi],
        [0.0, -sphi, cth * cphi],
    ])
    return _block_diag(rotation_matrix(phi, theta, psi).T, rate_inv)


def transform_rate(eta: Array, nu: Array, margin: float = ATTITUDE_MARGIN) -> Array:
    """Return dJ/dt along the flow eta_dot = J(eta) nu.

    The rotation block uses R_dot = R S(omega); the Euler-rate block is differentiated entry by entry.
    """
    check_attitude(eta, margin)
    phi, theta, psi = eta[3], eta[4], eta[5]
    omega = nu[3:]
    rotation = rotation_matrix(phi, theta, psi)
    rate = euler_rate_matrix(phi, theta)
    phi_dot, theta_dot, _ = rate @ omega

    cphi, sphi = np.cos(phi), np.sin(phi)
    cth, sth, tth = np.cos(theta), np.sin(theta), np.tan(theta)
    sec2 = 1.0 / cth**2
    rate_dot = np.array([
        [
            0.0,
            cphi * tth * phi_dot + sphi * sec2 * theta_dot,
            -sphi * tth * phi_dot + cphi * sec2 * theta_dot,
        ],
        [0.0, -sphi * phi_dot, -cphi * phi_dot],
        [
            0.0,
            cphi / cth * phi_dot + sphi * sth * sec2 * theta_dot,
            -sphi / cth * phi_dot + cphi * sth * sec2 * theta_dot,
        ],
    ])
    return _block_diag(rotation @ skew(omega), rate_dot)


def mass_matrix(p: VehicleParams) -> Array:
    m = p.m
    xg, yg, zg = p.cog
    rigid = np.array([
        [m, 0.0, 0.0, 0.0, m * zg, -m * yg],
        [0.0, m, 0.0, -m * zg, 0.0, m * xg],
        [0.0, 0.0, m, m * yg, -m * xg, 0.0],
        [0.0, -m * zg, m * yg, p.ix, -p.ixy, -p.izx],
        [m * zg, 0.0, -m * xg, -p.ixy, p.iy, -p.iyz],
        [-m * yg, m * xg, 0.0, -p.izx, -p.iyz, p.iz],
    ])
    return rigid + np.diag(p.added_mass)


def coriolis_rigid_body(p: VehicleParams, nu: Array) -> Array:
    """Rigid-body Coriolis matrix; exact for a vehicle with its CoG at the origin and diagonal inertia."""
    linear = np.asarray(nu[:3])
    angular_momentum = np.array([p.ix, p.iy, p.iz]) * nu[3:]
    coupling = -p.m * skew(linear)
    out = np.zeros((6, 6))
    out[:3, 3:] = coupling
    out[3:, :3] = coupling
    out[3:, 3:] = -skew(angular_momentum)
    return out


def coriolis_added_mass(p: VehicleParams, nu: Array) -> Array:
    added = np.asarray(p.added_mass)
    linear = skew(added[:3] * nu[:3])
    out = np.zeros((6, 6))
    out[:3, 3:] = linear
    out[3:, :3] = linear
    out[3:, 3:] = skew(added[3:] * nu[3:])
    return out


def coriolis_matrix(p: VehicleParams, nu: Array) -> Array:
    return coriolis_rigid_body(p, nu) + coriolis_added_mass(p, nu)


def damping_matrix(p: VehicleParams, nu: Array) -> Array:
    return np.diag(np.asarray(p.d_lin) + np.asarray(p.d_quad) * np.abs(nu))


def restoring_vector(p: VehicleParams, eta: Array) -> Array:
    weight, buoyancy = p.weight, p.buoyancy
    xg, yg, zg = p.cog
    xb, yb, zb = p.cob
    phi, theta = eta[3], eta[4]
    cphi, sphi = np.cos(phi), np.sin(phi)
    cth, sth = np.cos(theta), np.sin(theta)
    net = weight - buoyancy
    mx = xg * weight - xb * buoyancy
    my = yg * weight - yb * buoyancy
    mz = zg * weight - zb * buoyancy
    return np.array([
        net * sth,
        -net * cth * sphi,
        -net * cth * cphi,
        -my * cth * cphi + mz * cth * sphi,
        mz * sth + mx * cth * cphi,
        -mx * cth * sphi - my * sth,
    ])


@dataclass(frozen=True, kw_only=True)
class Vehicle:
    params: VehicleParams
    mass: Array
    mass_inv: Array

    @classmethod
    def from_params(cls, params: VehicleParams) -> Vehicle:
        mass = mass_matrix(params)
        return cls(params=params, mass=mass, mass_inv=np.linalg.inv(mass))

    def coriolis(self, nu: Array) -> Array:
        return coriolis_matrix(self.params, nu)

    def damping(self, nu: Array) -> Array:
        return damping_matrix(self.params, nu)

    def restoring(self, eta: Array) -> Array:
        return restoring_vector(self.params, eta)

    def hydrodynamic_forces(self, eta: Array, nu: Array) -> Array:
        return (self.coriolis(nu) + self.damping(nu)) @ nu + self.restoring(eta)

    def state_derivative(self, eta: Array, nu: Array, tau: Array, tau_d: Array) -> tuple[Array, Array]:
        eta_dot = kinematic_transform(eta) @ nu
        nu_dot = self.mass_inv @ (tau + tau_d - self.hydrodynamic_forces(eta, nu))
        return eta_dot, nu_dot

    def kinetic_energy(self, nu: Array) -> float:
        return float(0.5 * nu @ self.mass @ nu)


def state_derivative(p: VehicleParams, eta: Array, nu: Array, tau: Array, tau_d: Array) -> tuple[Array, Array]:
    return Vehicle.from_params(p).state_derivative(eta, nu, tau, tau_d)

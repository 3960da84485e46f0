import numpy as np
import pytest
from pydantic import ValidationError

from rovtrack.controller import (
    PUBLISHED_K1,
    AdaptationConfig,
    AdaptationMode,
    Controller,
    ControllerState,
    FisInput,
    Gains,
    ReferencePoint,
    adaptation_derivative,
    adaptation_drive,
    adaptation_rates,
    control_wrench,
    lyapunov,
    lyapunov_rate,
    pose_acceleration,
    sliding_surface,
    tracking_error,
    wrap_angle,
    wrap_angles,
)
from rovtrack.dynamics import Vehicle, kinematic_transform

DEFAULT_DISTURBANCE = np.array([-1.0, 1.0, 2.0, 0.1, 0.1, 0.0])


def random_state(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, ReferencePoint]:
    eta = rng.uniform(-2.0, 2.0, size=6)
    eta[3:5] = rng.uniform(-1.0, 1.0, size=2)
    nu = rng.uniform(-1.0, 1.0, size=6)
    ref_eta = rng.uniform(-2.0, 2.0, size=6)
    ref_eta[3:5] = rng.uniform(-0.5, 0.5, size=2)
    ref = ReferencePoint(eta=ref_eta, eta_dot=rng.uniform(-0.5, 0.5, size=6), eta_ddot=rng.uniform(-0.2, 0.2, size=6))
    return eta, nu, ref


class TestTrackingError:
    def test_on_trajectory(self) -> None:
        eta = np.array([1.0, 2.0, 3.0, 0.1, 0.2, 0.3])
        nu = np.array([0.1, 0.0, 0.0, 0.0, 0.0, 0.0])
        ref = ReferencePoint(eta=eta.copy(), eta_dot=kinematic_transform(eta) @ nu, eta_ddot=np.zeros(6))
        e, e_dot = tracking_error(eta, nu, ref)
        np.testing.assert_allclose(e, np.zeros(6), atol=1e-15)
        np.testing.assert_allclose(e_dot, np.zeros(6), atol=1e-15)

    def test_yaw_error_is_wrapped(self) -> None:
        eta = np.array([0.0, 0.0, 0.0, 0.0, 0.0, 3.1])
        ref = ReferencePoint.hold(np.array([0.0, 0.0, 0.0, 0.0, 0.0, -3.1]))
        e, _ = tracking_error(eta, np.zeros(6), ref)
        assert e[5] == pytest.approx(-0.0832, abs=1e-4)

    @pytest.mark.parametrize(
        ("angle", "wrapped"),
        [(0.0, 0.0), (np.pi, np.pi), (-np.pi, np.pi), (3 * np.pi / 2, -np.pi / 2), (-7.0, -7.0 + 2 * np.pi)],
    )
    def test_wrap_angle(self, angle: float, wrapped: float) -> None:
        assert wrap_angle(angle) == pytest.approx(wrapped)

    def test_wrap_angles_matches_scalar_wrap(self, rng: np.random.Generator) -> None:
        angles = rng.uniform(-20.0, 20.0, size=50)
        np.testing.assert_array_equal(wrap_angles(angles), [wrap_angle(angle) for angle in angles])

    def test_controller_surface_matches_helpers(
        self, vehicle: Vehicle, published_gains: Gains, rng: np.random.Generator
    ) -> None:
        controller = Controller.new(vehicle, published_gains, AdaptationConfig())
        for _ in range(100):
            eta, nu, ref = random_state(rng)
            e, e_dot = tracking_error(eta, nu, ref)
            np.testing.assert_array_equal(
                controller.evaluate(eta, nu, ref, np.zeros(6)).s, sliding_surface(e, e_dot, np.array(PUBLISHED_K1))
            )


class TestSlidingSurface:
    def test_zero_error(self) -> None:
        np.testing.assert_array_equal(sliding_surface(np.zeros(6), np.zeros(6), np.array(PUBLISHED_K1)), np.zeros(6))

    def test_unit_error_gives_k1(self) -> None:
        np.testing.assert_allclose(sliding_surface(np.ones(6), np.zeros(6), np.array(PUBLISHED_K1)), PUBLISHED_K1)

    def test_surface_zero_on_first_order_decay(self, rng: np.random.Generator) -> None:
        k1 = np.array(PUBLISHED_K1)
        e_dot = rng.uniform(-1.0, 1.0, size=6)
        np.testing.assert_allclose(sliding_surface(-e_dot / k1, e_dot, k1), np.zeros(6), atol=1e-15)


class TestControlWrench:
    def test_rest_on_stationary_reference(self, vehicle: Vehicle, published_gains: Gains) -> None:
        ref = ReferencePoint.hold(np.zeros(6))
        tau = control_wrench(vehicle, np.zeros(6), np.zeros(6), ref, published_gains, np.zeros(6))
        np.testing.assert_allclose(tau, np.zeros(6), atol=1e-12)

    def test_cancels_the_estimated_disturbance(self, vehicle: Vehicle, published_gains: Gains) -> None:
        ref = ReferencePoint.hold(np.zeros(6))
        tau = control_wrench(vehicle, np.zeros(6), np.zeros(6), ref, published_gains, DEFAULT_DISTURBANCE)
        np.testing.assert_allclose(tau, -DEFAULT_DISTURBANCE, atol=1e-12)

    def test_estimate_enters_additively(
        self, vehicle: Vehicle, published_gains: Gains, rng: np.random.Generator
    ) -> None:
        eta, nu, ref = random_state(rng)
        tau_hat = rng.uniform(-3.0, 3.0, size=6)
        without = control_wrench(vehicle, eta, nu, ref, published_gains, np.zeros(6))
        with_estimate = control_wrench(vehicle, eta, nu, ref, published_gains, tau_hat)
        np.testing.assert_allclose(with_estimate, without - tau_hat, atol=1e-10)

    def test_exact_estimate_imposes_error_dynamics(
        self, vehicle: Vehicle, published_gains: Gains, rng: np.random.Generator
    ) -> None:
        k1, k2 = np.array(published_gains.k1), np.array(published_gains.k2)
        for _ in range(1000):
            eta, nu, ref = random_state(rng)
            tau_d = rng.uniform(-3.0, 3.0, size=6)
            tau = control_wrench(vehicle, eta, nu, ref, published_gains, tau_d)
            e, e_dot = tracking_error(eta, nu, ref)
            s = sliding_surface(e, e_dot, k1)
            eta_ddot = pose_acceleration(vehicle, eta, nu, tau, tau_d)
            np.testing.assert_allclose(eta_ddot, ref.eta_ddot - k1 * e_dot - k2 * s, atol=1e-8)


class TestLyapunov:
    def test_value(self) -> None:
        gamma = np.full(6, 2.0)
        assert lyapunov(np.ones(6), np.ones(6), gamma) == pytest.approx(3.0 + 1.5)

    def test_rate_is_negative_semidefinite(
        self, vehicle: Vehicle, published_gains: Gains, rng: np.random.Generator
    ) -> None:
        k2 = np.array(published_gains.k2)
        gamma = np.array([20.0, 20.0, 20.0, 0.2, 0.2, 0.2])
        for _ in range(1000):
            eta, nu, ref = random_state(rng)
            tau_hat = rng.uniform(-3.0, 3.0, size=6)
            tau_d = rng.uniform(-3.0, 3.0, size=6)
            e, e_dot = tracking_error(eta, nu, ref)
            s = sliding_surface(e, e_dot, np.array(published_gains.k1))
            rate = lyapunov_rate(vehicle, eta, nu, ref, published_gains, tau_hat, tau_d, gamma)
            expected = -float(s @ (k2 * s))
            assert rate == pytest.approx(expected, rel=1e-8, abs=1e-8)
            assert rate <= 1e-8


class TestAdaptation:
    def test_drive_vanishes_with_surface(self, vehicle: Vehicle, rng: np.random.Generator) -> None:
        eta, _, _ = random_state(rng)
        np.testing.assert_array_equal(adaptation_drive(vehicle, eta, np.zeros(6)), np.zeros(6))

    def test_drive_at_level_pose_divides_by_mass(self, vehicle: Vehicle) -> None:
        s = np.array([1.0, -2.0, 3.0, 0.1, -0.2, 0.3])
        np.testing.assert_allclose(adaptation_drive(vehicle, np.zeros(6), s), s / np.diag(vehicle.mass))

    def test_fuzzy_rates(self) -> None:
        b = np.array([0.0, 5.0, 0.0, 0.0, 0.5, 0.0])
        gamma = adaptation_rates(AdaptationConfig(mode=AdaptationMode.FUZZY), b)
        assert gamma[1] == pytest.approx(100.0, rel=0.05)
        assert gamma[4] == pytest.approx(0.1, rel=0.05)

    def test_fuzzy_rates_use_magnitudes(self) -> None:
        cfg = AdaptationConfig(mode=AdaptationMode.FUZZY)
        b = np.array([1.0, 2.0, 0.5, 1.0, 2.0, 3.0])
        np.testing.assert_array_equal(adaptation_rates(cfg, -b), adaptation_rates(cfg, b))

    def test_baseline_rates_are_zero(self) -> None:
        gamma = adaptation_rates(AdaptationConfig(mode=AdaptationMode.BASELINE), np.ones(6))
        np.testing.assert_array_equal(gamma, np.zeros(6))

    def test_constant_rates(self) -> None:
        cfg = AdaptationConfig(mode=AdaptationMode.CONSTANT, gamma=[1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        np.testing.assert_array_equal(adaptation_rates(cfg, np.ones(6)), [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])

    def test_derivative_vanishes_without_drive(self) -> None:
        derivative = adaptation_derivative(np.ones(6), np.zeros(6), np.zeros(6), np.full(6, 10.0))
        np.testing.assert_array_equal(derivative, np.zeros(6))

    def test_unit_rates_pass_drive_through(self, rng: np.random.Generator) -> None:
        b = rng.uniform(-1.0, 1.0, size=6)
        np.testing.assert_array_equal(adaptation_derivative(np.ones(6), b, np.zeros(6), np.zeros(6)), b)

    def test_projection_at_the_bound(self) -> None:
        d_max = np.full(6, 10.0)
        tau_hat = np.array([0.0, 0.0, 10.0, 0.0, -10.0, 10.0])
        b = np.array([1.0, 1.0, 1.0, 1.0, -1.0, -1.0])
        derivative = adaptation_derivative(np.ones(6), b, tau_hat, d_max)
        np.testing.assert_array_equal(derivative, [1.0, 1.0, 0.0, 1.0, 0.0, -1.0])

    def test_clamp(self, vehicle: Vehicle, published_gains: Gains) -> None:
        adaptation = AdaptationConfig(d_max=[1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
        controller = Controller.new(vehicle, published_gains, adaptation)
        clamped = controller.clamp(np.array([5.0, -5.0, 0.5, 50.0, -50.0, 0.0]))
        np.testing.assert_array_equal(clamped, [1.0, -1.0, 0.5, 50.0, -50.0, 0.0])

    def test_estimation_error(self) -> None:
        state = ControllerState(tau_hat=np.ones(6))
        np.testing.assert_array_equal(state.estimation_error(np.ones(6)), np.zeros(6))


class TestController:
    def test_fis_inputs_agree_at_level_pose(
        self, vehicle: Vehicle, published_gains: Gains, rng: np.random.Generator
    ) -> None:
        ref = ReferencePoint.hold(rng.uniform(-1.0, 1.0, size=6) * [1, 1, 1, 0, 0, 0])
        nu = rng.uniform(-1.0, 1.0, size=6)
        adjoint = Controller.new(vehicle, published_gains, AdaptationConfig(fis_input=FisInput.ADJOINT))
        forward = Controller.new(vehicle, published_gains, AdaptationConfig(fis_input=FisInput.FORWARD))
        out_adjoint = adjoint.evaluate(np.zeros(6), nu, ref, np.zeros(6))
        out_forward = forward.evaluate(np.zeros(6), nu, ref, np.zeros(6))
        np.testing.assert_allclose(out_adjoint.fis_signal, out_forward.fis_signal, atol=1e-12)
        np.testing.assert_allclose(out_adjoint.b, out_adjoint.fis_signal)

    def test_fis_inputs_differ_when_rotated(self, vehicle: Vehicle, published_gains: Gains) -> None:
        eta = np.array([0.0, 0.0, 0.0, 0.0, 0.0, np.pi / 2])
        ref = ReferencePoint.hold(np.array([1.0, 0.0, 0.0, 0.0, 0.0, np.pi / 2]))
        forward = Controller.new(vehicle, published_gains, AdaptationConfig(fis_input=FisInput.FORWARD))
        out = forward.evaluate(eta, np.zeros(6), ref, np.zeros(6))
        assert not np.allclose(np.abs(out.fis_signal), np.abs(out.b))

    def test_evaluate_matches_control_wrench(
        self, vehicle: Vehicle, published_gains: Gains, rng: np.random.Generator
    ) -> None:
        eta, nu, ref = random_state(rng)
        tau_hat = rng.uniform(-1.0, 1.0, size=6)
        controller = Controller.new(vehicle, published_gains, AdaptationConfig())
        out = controller.evaluate(eta, nu, ref, tau_hat)
        np.testing.assert_allclose(out.tau, control_wrench(vehicle, eta, nu, ref, published_gains, tau_hat))
        np.testing.assert_allclose(out.b, adaptation_drive(vehicle, eta, out.s))


class TestValidation:
    def test_non_positive_gain_raises(self) -> None:
        with pytest.raises(ValidationError, match="positive"):
            Gains(k1=[1.0, 1.0, 1.0, 1.0, 1.0, 0.0])

    def test_gain_vector_round_trip(self, published_gains: Gains) -> None:
        assert Gains.from_vector(published_gains.as_vector()) == published_gains

    def test_constant_mode_needs_positive_rates(self) -> None:
        with pytest.raises(ValidationError, match="constant adaptation"):
            AdaptationConfig(mode=AdaptationMode.CONSTANT, gamma=[1.0, 1.0, 1.0, 0.0, 1.0, 1.0])

    def test_zero_rates_allowed_outside_constant_mode(self) -> None:
        cfg = AdaptationConfig(mode=AdaptationMode.FUZZY, gamma=[0.0] * 6)
        assert cfg.gamma == [0.0] * 6

    def test_negative_clamp_raises(self) -> None:
        with pytest.raises(ValidationError, match="d_max"):
            AdaptationConfig(d_max=[-1.0, 1.0, 1.0, 1.0, 1.0, 1.0])

    def test_unknown_mode_raises(self) -> None:
        with pytest.raises(ValidationError):
            AdaptationConfig(mode="adaptive")

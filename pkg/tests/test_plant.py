"""Plant mechanics: bookkeeping identity, equilibria, transmission kinematics."""

import math

import numpy as np
import pytest

from tendonsim.errors import InvariantBreach, NonFiniteState
from tendonsim.plant import (
    AntagonisticJoint,
    AntagonisticPlant,
    ArmDisturbance,
    MotorState,
    SingleJointPlant,
    SpringReturnJoint,
    TendonChannel,
    fingertip_force,
    joint_equilibrium_tension,
)
from tendonsim.transmission import SheathPath, TendonSpec

DT = 1e-3


def make_plant(
    mu=0.1,
    axial_stiffness=5e4,
    angle=0.2,
    quasi_static=False,
    disturbance=None,
    preload=0.01,
    stiffness=0.05,
    stiction=0.0,
    transport_delay=0.0,
    bend=2.0,
    engage_tension=None,
):
    joint = SpringReturnJoint(
        spool_radius=0.01,
        spring_stiffness=stiffness,
        spring_preload=preload,
        damping=1e-4,
        inertia=1e-6,
        stiction_torque=stiction,
        angle=angle,
    )
    motor = MotorState(spool_radius=0.01, max_speed=6.0)
    spec = TendonSpec(0.001, 0.004, mu, axial_stiffness=axial_stiffness)
    path = SheathPath.uniform_bend(1.0, bend)
    channel = TendonChannel(spec, path, motor, joint.spool_radius, transport_delay=transport_delay)
    plant = SingleJointPlant(
        joint, motor, channel, disturbance or ArmDisturbance.constant(bend), quasi_static=quasi_static
    )
    if engage_tension is None:
        engage_tension = joint_equilibrium_tension(joint, angle) if axial_stiffness else 0.0
    if axial_stiffness:
        plant.engage(joint_tension=engage_tension, dt=DT)
    else:
        plant.engage(dt=DT)
    return plant


class TestEquilibrium:
    def test_fixed_point_dynamic(self):
        plant = make_plant()
        q0 = plant.joint.angle
        for i in range(500):
            plant.step(0.0, i * DT, DT)
        assert plant.joint.angle == pytest.approx(q0, abs=1e-12)
        assert plant.joint.velocity == 0.0

    def test_fixed_point_quasi_static(self):
        plant = make_plant(quasi_static=True)
        q0 = plant.joint.angle
        for i in range(500):
            plant.step(0.0, i * DT, DT)
        assert plant.joint.angle == pytest.approx(q0, abs=1e-9)

    def test_settle_static_matches_engaged_equilibrium(self):
        plant = make_plant(angle=0.3)
        q0 = plant.joint.angle
        plant.settle_static()
        assert plant.joint.angle == pytest.approx(q0, abs=1e-12)


class TestIdealTransmission:
    def test_inextensible_ratio_once_taut(self):
        # frictionless, constant bend, rigid tendon: joint tracks the motor
        # through the exact spool ratio
        plant = make_plant(mu=0.0, axial_stiffness=None, angle=0.2, quasi_static=True)
        q0 = plant.joint.angle
        theta0 = plant.motor.spool_angle
        for i in range(400):
            plant.step(0.5, i * DT, DT)
        dq = plant.joint.angle - q0
        dtheta = plant.motor.spool_angle - theta0
        ratio = plant.motor.spool_radius / plant.joint.spool_radius
        assert dq == pytest.approx(ratio * dtheta, rel=1e-12)

    def test_bend_step_drift_quasi_static(self):
        # motor held fixed, bend +0.5 rad: drift is -offset/radius * dphi
        disturbance = ArmDisturbance.step(2.0, 0.5, at_time=0.25)
        plant = make_plant(axial_stiffness=None, angle=0.3, quasi_static=True, disturbance=disturbance)
        q0 = plant.joint.angle
        for i in range(1000):
            plant.step(0.0, i * DT, DT)
        assert plant.joint.angle - q0 == pytest.approx(-0.075, abs=1e-9)

    def test_elastic_drift_matches_when_tension_constant(self):
        # with the elastic model the steady drift is identical because the
        # equilibrium tension (hence stretch) returns to the same value
        disturbance = ArmDisturbance.step(2.0, 0.5, at_time=0.25)
        plant = make_plant(angle=0.3, quasi_static=True, disturbance=disturbance, mu=0.0)
        q0 = plant.joint.angle
        for i in range(2000):
            plant.step(0.0, i * DT, DT)
        drift = plant.joint.angle - q0
        # spring re-balance shifts tension slightly; tolerance reflects the
        # series-stiffness correction, not the geometric term
        assert drift == pytest.approx(-0.075, abs=1e-3)


class TestBookkeeping:
    def test_identity_and_slack_over_random_commands(self):
        plant = make_plant()
        rng = np.random.default_rng(42)
        u = 0.0
        for i in range(5000):
            if i % 100 == 0:
                u = rng.uniform(-2.0, 2.0)
            plant.step(u, i * DT, DT)
            ch = plant.channel
            assert ch.slack >= 0.0
            assert abs(ch.length_residual(plant.joint.angle, plant.phi)) <= 1e-9
            if ch.slack > 0.0:
                assert ch.joint_tension == 0.0

    def test_slack_appears_on_fast_release(self):
        # wind in, then pay out far faster than the spring can follow by
        # making the spring recovery slow (heavy damping)
        joint = SpringReturnJoint(
            spool_radius=0.01,
            spring_stiffness=0.05,
            spring_preload=0.01,
            damping=0.5,
            inertia=1e-6,
            angle=0.4,
        )
        motor = MotorState(spool_radius=0.01, max_speed=6.0)
        spec = TendonSpec(0.001, 0.004, 0.1, axial_stiffness=5e4)
        channel = TendonChannel(spec, SheathPath.uniform_bend(1.0, 2.0), motor, 0.01)
        plant = SingleJointPlant(joint, motor, channel, ArmDisturbance.constant(2.0))
        plant.engage(joint_tension=joint_equilibrium_tension(joint, 0.4), dt=DT)
        saw_slack = False
        for i in range(300):
            plant.step(-5.0, i * DT, DT)
            if channel.slack > 0.0:
                saw_slack = True
                assert channel.joint_tension == 0.0
        assert saw_slack

    def test_engage_rejects_tension_and_slack_together(self):
        plant = make_plant()
        with pytest.raises(ValueError):
            plant.channel.engage(q=0.1, phi=2.0, dt=DT, joint_tension=1.0, slack=0.001)

    def test_inextensible_overwound_raises(self):
        plant = make_plant(axial_stiffness=None, angle=0.2, quasi_static=True)
        with pytest.raises(InvariantBreach):
            # wind far past the joint's upper stop
            for i in range(5000):
                plant.step(5.0, i * DT, DT)


class TestEnergy:
    def test_quasi_static_frictionless_work_balance(self):
        plant = make_plant(mu=0.0, angle=0.1, quasi_static=True)
        e0 = plant.spring_energy() + plant.tendon_energy()
        t = 0.0
        for _ in range(2000):
            plant.step(0.5, t, DT)
            t += DT
        w_up = plant.motor_work
        de = plant.spring_energy() + plant.tendon_energy() - e0
        assert w_up == pytest.approx(de, rel=1e-6)
        for _ in range(2000):
            plant.step(-0.5, t, DT)
            t += DT
        assert abs(plant.motor_work) <= 1e-6 * w_up


class TestConvergence:
    def test_first_order_in_dt(self):
        def simulate(dt):
            plant = make_plant(angle=0.2)
            n = int(round(1.0 / dt))
            for i in range(n):
                t = i * dt
                plant.step(0.8 * math.sin(2 * math.pi * t), t, dt)
            return plant.joint.angle

        ref = simulate(1e-5)
        e1 = abs(simulate(1e-3) - ref)
        e2 = abs(simulate(5e-4) - ref)
        e3 = abs(simulate(2.5e-4) - ref)
        assert 1.5 < e1 / e2 < 2.8
        assert 1.5 < e2 / e3 < 2.8


class TestLimits:
    def test_upper_stop_clamps_and_zeroes_velocity(self):
        plant = make_plant(angle=1.2)
        for i in range(3000):
            plant.step(3.0, i * DT, DT)
        assert plant.joint.angle == plant.joint.angle_max
        assert plant.joint.velocity == 0.0

    def test_lower_stop(self):
        plant = make_plant(angle=0.05, quasi_static=True)
        for i in range(2000):
            plant.step(-1.0, i * DT, DT)
        assert plant.joint.angle == plant.joint.angle_min


class TestTransportDelay:
    def test_joint_response_lags_by_delay(self):
        delay = 0.05
        plant = make_plant(transport_delay=delay, angle=0.2, quasi_static=True)
        q0 = plant.joint.angle
        moved_at = None
        for i in range(200):
            plant.step(1.0, i * DT, DT)
            if moved_at is None and abs(plant.joint.angle - q0) > 1e-9:
                moved_at = (i + 1) * DT
        assert moved_at == pytest.approx(delay + DT, abs=DT)

    def test_delay_requires_elastic(self):
        spec = TendonSpec(0.001, 0.004, 0.1, axial_stiffness=None)
        motor = MotorState(spool_radius=0.01, max_speed=6.0)
        with pytest.raises(ValueError):
            TendonChannel(spec, SheathPath.uniform_bend(1.0, 2.0), motor, 0.01, transport_delay=0.1)


class TestStiction:
    def test_small_imbalance_holds(self):
        plant = make_plant(stiction=0.01, quasi_static=True)
        q0 = plant.joint.angle
        # a motor nudge too small to break away
        plant.step(0.001, 0.0, DT)
        assert plant.joint.angle == q0

    def test_breakaway_moves(self):
        plant = make_plant(stiction=0.01, quasi_static=True)
        q0 = plant.joint.angle
        for i in range(500):
            plant.step(1.0, i * DT, DT)
        assert plant.joint.angle > q0 + 0.1


class TestEquilibriumTension:
    def test_reference_value(self):
        joint = SpringReturnJoint(spool_radius=0.01, spring_stiffness=0.05, spring_preload=0.01)
        assert joint_equilibrium_tension(joint, 0.0) == pytest.approx(1.0, rel=1e-12)

    def test_strictly_increasing(self):
        joint = SpringReturnJoint(spool_radius=0.01, spring_stiffness=0.05, spring_preload=0.01)
        values = [joint_equilibrium_tension(joint, q) for q in np.linspace(0, 1.5, 10)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_unloaded_spring(self):
        joint = SpringReturnJoint(spool_radius=0.01, spring_stiffness=0.05, spring_preload=0.0)
        assert joint_equilibrium_tension(joint, 0.0) == 0.0

    def test_out_of_range_rejected(self):
        joint = SpringReturnJoint(spool_radius=0.01, spring_stiffness=0.05)
        with pytest.raises(ValueError):
            joint_equilibrium_tension(joint, -0.5)


class TestFingertipForce:
    def test_frictionless_sheaths_equal(self):
        joint = SpringReturnJoint(spool_radius=0.01, spring_stiffness=0.05, spring_preload=0.0)
        spec = TendonSpec(0.001, 0.004, 0.0)
        short = SheathPath.uniform_bend(0.1, 0.1)
        long = SheathPath.uniform_bend(1.0, 1.5)
        f_short = fingertip_force(joint, 30.0, short, spec, 0.01, contact_angle=0.0)
        f_long = fingertip_force(joint, 30.0, long, spec, 0.01, contact_angle=0.0)
        assert f_short == f_long

    def test_force_ratio_is_capstan_quotient(self):
        joint = SpringReturnJoint(spool_radius=0.01, spring_stiffness=0.05, spring_preload=0.0)
        spec = TendonSpec(0.001, 0.004, 0.2)
        phi1, phi2 = 0.3, 1.7
        f1 = fingertip_force(joint, 30.0, SheathPath.uniform_bend(0.5, phi1), spec, 0.01, 0.0)
        f2 = fingertip_force(joint, 30.0, SheathPath.uniform_bend(1.0, phi2), spec, 0.01, 0.0)
        assert f2 / f1 == pytest.approx(math.exp(-0.2 * (phi2 - phi1)), rel=1e-12)

    def test_reported_force_pair_implies_bend_product(self):
        # 33 N near vs 25 N far implies mu * delta_phi = ln(33/25)
        assert math.log(33.0 / 25.0) == pytest.approx(0.2776, abs=1e-4)

    def test_spring_reaction_subtracts(self):
        joint = SpringReturnJoint(spool_radius=0.01, spring_stiffness=0.05, spring_preload=0.01)
        spec = TendonSpec(0.001, 0.004, 0.0)
        path = SheathPath.straight(0.5)
        f = fingertip_force(joint, 10.0, path, spec, 0.01, contact_angle=0.0)
        assert f == pytest.approx((10.0 * 0.01 - 0.01) / 0.01, rel=1e-12)


class TestArmDisturbance:
    def test_constant(self):
        assert ArmDisturbance.constant(2.0).phi(13.0) == 2.0

    def test_step_profile(self):
        d = ArmDisturbance.step(1.0, 0.5, at_time=2.0)
        assert d.phi(1.99) == 1.0
        assert d.phi(2.0) == 1.5

    def test_sinusoid_validates_floor(self):
        with pytest.raises(ValueError):
            ArmDisturbance.sinusoid(0.4, 0.5, 0.2)

    def test_piecewise_linear(self):
        d = ArmDisturbance.piecewise_linear([0.0, 1.0, 2.0], [1.0, 2.0, 1.5])
        assert d.phi(0.5) == pytest.approx(1.5)
        assert d.phi(5.0) == pytest.approx(1.5)

    def test_negative_profile_rejected_at_eval(self):
        d = ArmDisturbance(lambda t: 1.0 - t)
        with pytest.raises(ValueError):
            d.phi(2.0)


class TestNonFinite:
    def test_nan_state_detected(self):
        plant = make_plant()
        plant.joint.angle = math.nan
        with pytest.raises((NonFiniteState, InvariantBreach)):
            for i in range(3):
                plant.step(0.1, i * DT, DT)


class TestAntagonistic:
    def _make(self, cocontraction=2.0):
        joint = AntagonisticJoint(spool_radius=0.01, damping=1e-4, inertia=1e-6, angle=0.4)
        spec = TendonSpec(0.001, 0.004, 0.1, axial_stiffness=5e4)
        path = SheathPath.uniform_bend(1.0, 2.0)
        agonist = TendonChannel(
            spec, path, MotorState(spool_radius=0.01, max_speed=6.0), 0.01, sense=1
        )
        antagonist = TendonChannel(
            spec, path, MotorState(spool_radius=0.01, max_speed=6.0), 0.01, sense=-1
        )
        plant = AntagonisticPlant(joint, agonist, antagonist, ArmDisturbance.constant(2.0))
        plant.engage(cocontraction=cocontraction, dt=DT)
        return plant

    def test_cocontraction_holds_angle(self):
        plant = self._make()
        q0 = plant.joint.angle
        for i in range(1000):
            plant.step(0.0, 0.0, i * DT, DT)
        assert plant.joint.angle == pytest.approx(q0, abs=1e-6)
        assert plant.agonist.joint_tension > 0.0
        assert plant.antagonist.joint_tension > 0.0

    def test_agonist_pull_flexes(self):
        plant = self._make()
        q0 = plant.joint.angle
        for i in range(500):
            plant.step(0.5, -0.5, i * DT, DT)  # agonist winds, antagonist pays out
        assert plant.joint.angle > q0

    def test_tensions_never_negative(self):
        plant = self._make(cocontraction=0.5)
        rng = np.random.default_rng(5)
        for i in range(2000):
            if i % 250 == 0:
                u1, u2 = rng.uniform(-1.0, 1.0, 2)
            plant.step(u1, u2, i * DT, DT)
            assert plant.agonist.joint_tension >= 0.0
            assert plant.antagonist.joint_tension >= 0.0

    def test_requires_opposed_senses(self):
        joint = AntagonisticJoint(spool_radius=0.01)
        spec = TendonSpec(0.001, 0.004, 0.1, axial_stiffness=5e4)
        path = SheathPath.uniform_bend(1.0, 2.0)
        ch1 = TendonChannel(spec, path, MotorState(spool_radius=0.01, max_speed=6.0), 0.01, sense=1)
        ch2 = TendonChannel(spec, path, MotorState(spool_radius=0.01, max_speed=6.0), 0.01, sense=1)
        with pytest.raises(ValueError):
            AntagonisticPlant(joint, ch1, ch2)


class TestCreep:
    def test_sustained_load_decays_tension(self):
        motor = MotorState(spool_radius=0.01, max_speed=6.0)
        spec = TendonSpec(0.001, 0.004, 0.1, axial_stiffness=5e4)
        channel = TendonChannel(
            spec,
            SheathPath.uniform_bend(1.0, 1.0),
            motor,
            0.01,
            creep_compliance=5e-6,
            creep_time_constant=2.0,
        )
        channel.engage(q=0.0, phi=1.0, dt=DT)
        channel.update_direction(1.0)
        theta = channel.theta_for_motor_tension(30.0, 0.0, 1.0)
        tensions = []
        for _ in range(4000):
            channel.refresh(theta, 0.0, 1.0, DT)
            tensions.append(channel.joint_tension)
        arr = np.array(tensions)
        assert np.all(np.diff(arr) <= 1e-12)
        assert arr[-1] < arr[0] * 0.9

"""Joint-side mechanics: spring-return joints, tendon channels, motor spools.

The plant tracks one scalar identity per tendon channel: the material length
of the tendon is constant, so motor spool wrap, the tendon's path through
the sheath, joint-side take-up, elastic stretch and slack must always sum
to it. Slack and stretch are derived from that identity every step, which
is what keeps them consistent by construction.

Tension follows the capstan law across the sheath with a direction memory:
whichever end drags the tendon carries the higher tension, and at rest the
last sliding direction is kept. An optional transport delay models the
stick-slip propagation lag along a long sheath: the whole channel responds
to the motor position from `transport_delay` seconds ago, the difference
being material in transit behind the stick-slip front. The bookkeeping
identity is therefore stated against that effective motor angle; with zero
delay (the default) it is the literal spool angle.

Integration is first-order fixed-step. The velocity update is implicit in
the linear elastic, spring and damping terms (a plain symplectic update is
unstable at the default 1 ms step for stiff tendons); position then follows
the new velocity. A quasi-static mode solves the torque balance directly
each step and is the right tool for static experiments.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvariantBreach, NonFiniteState, NonPositiveLength
from .transmission import (
    DriveDirection,
    SheathPath,
    TendonSpec,
    tendon_path_length,
    tension_transfer,
)

__all__ = [
    "SpringReturnJoint",
    "AntagonisticJoint",
    "MotorState",
    "TendonChannel",
    "ArmDisturbance",
    "SingleJointPlant",
    "AntagonisticPlant",
    "joint_equilibrium_tension",
    "fingertip_force",
]

_BOOKKEEPING_TOL = 1e-9
_REST_VELOCITY = 1e-7  # below this the joint counts as at rest for stiction


@dataclass
class SpringReturnJoint:
    """Single-tendon joint: the tendon flexes it, a passive spring extends it.

    The spring torque is -(preload + stiffness * angle): always toward
    extension, strictly negative for non-negative angles.
    """

    spool_radius: float
    spring_stiffness: float
    spring_preload: float = 0.0
    damping: float = 1e-4
    inertia: float = 1e-6
    stiction_torque: float = 0.0
    angle_min: float = 0.0
    angle_max: float = math.pi / 2
    angle: float = 0.0
    velocity: float = 0.0

    def __post_init__(self) -> None:
        if not self.spool_radius > 0.0:
            raise ValueError("spool radius must be > 0")
        if not self.spring_stiffness > 0.0:
            raise ValueError("spring stiffness must be > 0")
        if self.damping < 0.0 or self.inertia <= 0.0 or self.stiction_torque < 0.0:
            raise ValueError("damping/stiction must be >= 0, inertia > 0")
        if not self.angle_min < self.angle_max:
            raise ValueError("angle_min must be < angle_max")
        self.angle = min(max(self.angle, self.angle_min), self.angle_max)

    def spring_torque(self, angle: float) -> float:
        return -(self.spring_preload + self.spring_stiffness * angle)

    @property
    def rest_angle(self) -> float:
        """Where the unloaded joint settles (preload pushes it to the lower stop)."""
        return max(self.angle_min, -self.spring_preload / self.spring_stiffness)


@dataclass
class AntagonisticJoint:
    """Joint driven by two opposing tendons, each able only to pull."""

    spool_radius: float
    damping: float = 1e-4
    inertia: float = 1e-6
    angle_min: float = 0.0
    angle_max: float = math.pi / 2
    angle: float = 0.0
    velocity: float = 0.0

    def __post_init__(self) -> None:
        if not self.spool_radius > 0.0:
            raise ValueError("spool radius must be > 0")
        if self.damping < 0.0 or self.inertia <= 0.0:
            raise ValueError("damping must be >= 0 and inertia > 0")
        if not self.angle_min < self.angle_max:
            raise ValueError("angle_min must be < angle_max")


@dataclass
class MotorState:
    """Velocity-commanded spool; position integrates the clamped command."""

    spool_radius: float
    max_speed: float
    spool_angle: float = 0.0
    torque_estimate: float = 0.0  # motor-side tension times spool radius
    command: float = 0.0

    def __post_init__(self) -> None:
        if not (self.spool_radius > 0.0 and self.max_speed > 0.0):
            raise ValueError("spool radius and max speed must be > 0")


@dataclass(frozen=True)
class ArmDisturbance:
    """Accumulated sheath bend as a function of time, injected by arm motion."""

    phi_fn: Callable[[float], float]

    def phi(self, t: float) -> float:
        value = float(self.phi_fn(t))
        if value < 0.0:
            raise ValueError(f"bend profile went negative at t={t}: {value}")
        return value

    @classmethod
    def constant(cls, phi0: float) -> "ArmDisturbance":
        if phi0 < 0.0:
            raise ValueError("bend must be >= 0")
        return cls(lambda t: phi0)

    @classmethod
    def step(cls, phi0: float, delta: float, at_time: float) -> "ArmDisturbance":
        if phi0 < 0.0 or phi0 + delta < 0.0:
            raise ValueError("bend must stay >= 0")
        return cls(lambda t: phi0 + (delta if t >= at_time else 0.0))

    @classmethod
    def sinusoid(cls, phi0: float, amplitude: float, frequency: float) -> "ArmDisturbance":
        if phi0 - abs(amplitude) < 0.0:
            raise ValueError("bend profile would go negative")
        omega = 2.0 * math.pi * frequency
        return cls(lambda t: phi0 + amplitude * math.sin(omega * t))

    @classmethod
    def piecewise_linear(cls, times: list[float], values: list[float]) -> "ArmDisturbance":
        t = np.asarray(times, dtype=float)
        v = np.asarray(values, dtype=float)
        if t.size != v.size or t.size < 2:
            raise ValueError("need matching times/values with at least 2 points")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("times must be strictly increasing")
        if np.any(v < 0.0):
            raise ValueError("bend values must be >= 0")
        return cls(lambda x: float(np.interp(x, t, v)))


class TendonChannel:
    """One tendon: motor spool at one end, joint spool at the other, sheath between.

    `sense` is +1 for a tendon whose pull increases the joint angle (agonist,
    the only kind on spring-return joints) and -1 for an antagonist.
    Construction validates the sheath geometry against the tendon offset;
    call `engage` to fix the material length from an initial state before
    stepping.
    """

    def __init__(
        self,
        spec: TendonSpec,
        path: SheathPath,
        motor: MotorState,
        joint_radius: float,
        sense: int = 1,
        transport_delay: float = 0.0,
        creep_compliance: float = 0.0,
        creep_time_constant: float = 5.0,
        joint_allowance: float = 0.1,
    ) -> None:
        if sense not in (1, -1):
            raise ValueError("sense must be +1 or -1")
        if transport_delay < 0.0:
            raise ValueError("transport delay must be >= 0")
        if transport_delay > 0.0 and spec.axial_stiffness is None:
            raise ValueError("transport delay requires an elastic tendon")
        if creep_compliance < 0.0 or creep_time_constant <= 0.0:
            raise ValueError("creep compliance >= 0 and time constant > 0 required")
        tendon_path_length(path, spec)  # validates the offset curve exists
        self.spec = spec
        self.path = path
        self.motor = motor
        self.joint_radius = joint_radius
        self.sense = sense
        self.transport_delay = transport_delay
        self.creep_compliance = creep_compliance
        self.creep_time_constant = creep_time_constant
        self.base_length = path.total_length
        self.static_bend = path.accumulated_bend
        self.joint_allowance = joint_allowance

        self.rest_length = 0.0
        self.anchor = 0.0
        self.elastic = spec.axial_stiffness is not None
        self.linear_stiffness = 0.0  # N per meter of stretch, set at engage
        self.slack = 0.0
        self.stretch = 0.0
        self.motor_tension = 0.0  # at the delay-effective hub state
        self.joint_tension = 0.0
        self.direction = DriveDirection.MOTOR_PULLING
        self.creep_shortening = 0.0
        self.effective_motor_angle = 0.0
        self._theta_history: deque[float] | None = None
        self._engaged = False

    # --- geometry ---

    def sheath_tendon_length(self, phi: float) -> float:
        """Tendon length inside the sheath at bend phi, with creep applied."""
        length = (self.base_length - self.creep_shortening) - self.spec.offset * phi
        if length <= 0.0:
            raise NonPositiveLength(f"tendon path length {length:.6g} m is not positive")
        return length

    def span(self, theta: float, q: float, phi: float) -> float:
        """Geometric length the route demands from anchor to anchor."""
        return (
            self.anchor
            + self.motor.spool_radius * theta
            + self.sheath_tendon_length(phi)
            - self.sense * self.joint_radius * q
        )

    def taut_angle(self, theta: float, phi: float) -> float:
        """Joint angle implied by a taut, unstretched tendon (ideal ratio map)."""
        return (
            self.sense
            * (self.anchor + self.motor.spool_radius * theta + self.sheath_tendon_length(phi) - self.rest_length)
            / self.joint_radius
        )

    def theta_for_motor_tension(self, motor_tension: float, q: float, phi: float) -> float:
        """Motor angle that puts the channel at a given motor-side tension (elastic only)."""
        if not self.elastic:
            raise ValueError("tension-servoing requires an elastic tendon")
        stretch = motor_tension / self.linear_stiffness
        return (
            self.rest_length
            + stretch
            - self.anchor
            - self.sheath_tendon_length(phi)
            + self.sense * self.joint_radius * q
        ) / self.motor.spool_radius

    def engage(
        self,
        q: float,
        phi: float,
        dt: float,
        joint_tension: float = 0.0,
        slack: float = 0.0,
        theta: float | None = None,
    ) -> None:
        """Fix the tendon material length from a known initial state.

        Exactly one of joint_tension / slack may be positive. The delay
        history is primed with the initial motor angle so startup sees a
        steady past.
        """
        if joint_tension < 0.0 or slack < 0.0:
            raise ValueError("joint_tension and slack must be >= 0")
        if joint_tension > 0.0 and slack > 0.0:
            raise ValueError("cannot engage with both tension and slack")
        if theta is not None:
            self.motor.spool_angle = theta
        theta0 = self.motor.spool_angle
        l_t0 = self.sheath_tendon_length(phi)
        self.rest_length = l_t0 + self.joint_allowance
        if self.elastic:
            self.linear_stiffness = self.spec.axial_stiffness / self.rest_length
            motor_side = self._motor_side_from_joint(joint_tension, phi)
            stretch0 = motor_side / self.linear_stiffness
        else:
            if joint_tension > 0.0:
                raise ValueError("an inextensible channel cannot be engaged under tension")
            stretch0 = 0.0
        self.anchor = (
            self.rest_length
            - slack
            + stretch0
            - (self.motor.spool_radius * theta0 + l_t0 - self.sense * self.joint_radius * q)
        )
        self.slack = slack
        self.stretch = stretch0
        self.motor_tension = self.linear_stiffness * stretch0 if self.elastic else 0.0
        self.joint_tension = joint_tension
        self.effective_motor_angle = theta0
        n_delay = int(round(self.transport_delay / dt)) if self.transport_delay > 0.0 else 0
        self._theta_history = deque([theta0] * (n_delay + 1), maxlen=n_delay + 1)
        self._engaged = True

    # --- tension bookkeeping ---

    def direction_factor(self, phi: float) -> float:
        """Joint-side tension per unit motor-side tension for the current direction."""
        mu = self.spec.friction_coefficient
        if self.direction is DriveDirection.MOTOR_PULLING:
            return math.exp(-mu * phi)
        return math.exp(mu * phi)

    def _motor_side_from_joint(self, joint_tension: float, phi: float) -> float:
        if joint_tension == 0.0:
            return 0.0
        return joint_tension / self.direction_factor(phi)

    def update_direction(self, motor_velocity: float) -> None:
        """Sliding direction from motor motion; held when the motor is still."""
        if motor_velocity > 1e-12:
            self.direction = DriveDirection.MOTOR_PULLING
        elif motor_velocity < -1e-12:
            self.direction = DriveDirection.SPRING_RETURNING

    def refresh(
        self, theta: float, q: float, phi: float, dt: float, required_joint_tension: float | None = None
    ) -> None:
        """Recompute slack, stretch and tensions at the new state.

        All channel physics runs against the delay-effective motor angle.
        For inextensible channels the plant supplies the joint tension it
        solved for (`required_joint_tension`); elastic channels derive it
        from stretch and the capstan factor. Raises InvariantBreach when the
        material-length identity fails.
        """
        if not self._engaged:
            raise InvariantBreach("channel used before engage()")
        self._theta_history.append(theta)
        theta_eff = self._theta_history[0]
        self.effective_motor_angle = theta_eff
        span = self.span(theta_eff, q, phi)
        excess = span - self.rest_length
        if self.elastic:
            self.stretch = excess if excess > 0.0 else 0.0
            self.slack = -excess if excess < 0.0 else 0.0
            self.motor_tension = self.linear_stiffness * self.stretch
            if self.slack > 0.0:
                self.joint_tension = 0.0
            else:
                self.joint_tension = self.motor_tension * self.direction_factor(phi)
        else:
            if excess > _BOOKKEEPING_TOL:
                raise InvariantBreach(
                    f"inextensible tendon overwound by {excess:.3e} m (joint at a hard stop?)"
                )
            self.stretch = 0.0
            self.slack = -excess if excess < 0.0 else 0.0
            t_joint = required_joint_tension if required_joint_tension is not None else 0.0
            self.joint_tension = 0.0 if self.slack > 0.0 else max(0.0, t_joint)
            self.motor_tension = self._motor_side_from_joint(self.joint_tension, phi)
        if self.creep_compliance > 0.0:
            target = self.creep_compliance * self.joint_tension
            self.creep_shortening += dt * (target - self.creep_shortening) / self.creep_time_constant
        residual = self.rest_length - (span - self.stretch + self.slack)
        if abs(residual) > _BOOKKEEPING_TOL:
            raise InvariantBreach(f"tendon length identity off by {residual:.3e} m")

    def length_residual(self, q: float, phi: float) -> float:
        """Current value of the material-length identity (should be ~0)."""
        span = self.span(self.effective_motor_angle, q, phi)
        return self.rest_length - (span - self.stretch + self.slack)

    def wave_theta(self, theta_new: float) -> float:
        """Effective motor angle once this step lands (pre-append preview).

        Mirrors what `refresh` will read from the history after appending
        theta_new, so the integrator and the bookkeeping agree.
        """
        hist = self._theta_history
        if hist is None:
            raise InvariantBreach("channel used before engage()")
        if hist.maxlen == 1:
            return theta_new
        return hist[1] if len(hist) == hist.maxlen else hist[0]


def joint_equilibrium_tension(joint: SpringReturnJoint, q: float) -> float:
    """Joint-side tendon tension that holds angle q statically."""
    if not (joint.angle_min <= q <= joint.angle_max):
        raise ValueError(f"angle {q} outside [{joint.angle_min}, {joint.angle_max}]")
    return (joint.spring_preload + joint.spring_stiffness * q) / joint.spool_radius


def fingertip_force(
    joint: SpringReturnJoint,
    motor_tension: float,
    path: SheathPath,
    spec: TendonSpec,
    contact_lever: float,
    contact_angle: float | None = None,
) -> float:
    """Static normal force at a blocked fingertip pressing on a gauge.

    Delivered joint-side tension times the joint spool radius, minus the
    spring-return reaction at the contact pose, divided by the contact lever
    arm. Negative values mean the finger is not actually pressing.
    """
    if motor_tension < 0.0:
        raise ValueError("motor tension must be >= 0")
    if not contact_lever > 0.0:
        raise ValueError("contact lever must be > 0")
    q = joint.angle if contact_angle is None else contact_angle
    delivered = tension_transfer(
        motor_tension, path.accumulated_bend, spec.friction_coefficient, DriveDirection.MOTOR_PULLING
    )
    reaction = joint.spring_preload + joint.spring_stiffness * q
    return (delivered * joint.spool_radius - reaction) / contact_lever


class SingleJointPlant:
    """One spring-return joint driven through one tendon channel.

    A plant instance is a single-owner state machine: `step` must be called
    sequentially. Independent instances share nothing and may run in
    parallel.
    """

    def __init__(
        self,
        joint: SpringReturnJoint,
        motor: MotorState,
        channel: TendonChannel,
        disturbance: ArmDisturbance | None = None,
        quasi_static: bool = False,
    ) -> None:
        if channel.sense != 1:
            raise ValueError("a spring-return joint takes an agonist (+1) channel")
        self.joint = joint
        self.motor = motor
        self.channel = channel
        self.disturbance = disturbance or ArmDisturbance.constant(channel.static_bend)
        self.quasi_static = quasi_static
        self.phi = self.disturbance.phi(0.0)
        self.motor_work = 0.0

    def engage(self, joint_tension: float = 0.0, slack: float = 0.0, dt: float = 1e-3) -> None:
        """Fix the tendon material length at the current joint/motor state."""
        self.channel.engage(
            q=self.joint.angle, phi=self.phi, dt=dt, joint_tension=joint_tension, slack=slack
        )
        self.motor.torque_estimate = self.channel.motor_tension * self.motor.spool_radius

    def settle_static(self, motor_angle: float | None = None) -> None:
        """Place the joint at the static balance point for the current geometry.

        Elastic channels solve the taut linear balance; inextensible channels
        take the taut kinematic angle when it holds positive tension. Used to
        start scenarios from a true fixed point.
        """
        ch, j = self.channel, self.joint
        if motor_angle is not None:
            self.motor.spool_angle = motor_angle
        theta = self.motor.spool_angle
        phi = self.phi
        if ch.elastic:
            a = ch.direction_factor(phi)
            k_lin = ch.linear_stiffness
            r = j.spool_radius
            g0 = ch.span(theta, 0.0, phi) - ch.rest_length
            q = (a * k_lin * r * g0 - j.spring_preload) / (a * k_lin * r * r + j.spring_stiffness)
            q = min(max(q, j.rest_angle, j.angle_min), j.angle_max)
        else:
            q_taut = ch.taut_angle(theta, phi)
            q = q_taut if q_taut >= j.rest_angle else j.rest_angle
            q = min(max(q, j.angle_min), j.angle_max)
        j.angle = q
        j.velocity = 0.0
        if ch.elastic:
            ch.refresh(theta, q, phi, dt=1e-3)
        else:
            t_req = max(0.0, (j.spring_preload + j.spring_stiffness * q) / j.spool_radius)
            ch.refresh(theta, q, phi, dt=1e-3, required_joint_tension=t_req)
        self.motor.torque_estimate = ch.motor_tension * self.motor.spool_radius

    def expected_angle(self, motor_angle: float, t: float) -> float:
        """Joint angle the ideal (taut, rigid) transmission predicts; for slack recovery.

        Evaluated at the delay-effective motor angle, which is the position
        the transmission is actually responding to.
        """
        q = self.channel.taut_angle(self.channel.effective_motor_angle, self.disturbance.phi(t))
        return min(max(q, self.joint.angle_min), self.joint.angle_max)

    def step(self, motor_velocity_cmd: float, t: float, dt: float) -> None:
        """Advance the plant from t to t + dt under a motor velocity command."""
        if not dt > 0.0:
            raise ValueError("dt must be > 0")
        j, m, ch = self.joint, self.motor, self.channel
        u = min(max(motor_velocity_cmd, -m.max_speed), m.max_speed)
        m.command = motor_velocity_cmd
        theta_new = m.spool_angle + dt * u
        ch.update_direction(u)
        phi_new = self.disturbance.phi(t + dt)
        tension_before = ch.motor_tension

        if ch.elastic:
            q_new, v_new = self._step_elastic(theta_new, phi_new, dt)
            ch.refresh(theta_new, q_new, phi_new, dt)
        else:
            q_new, v_new, t_req = self._step_inextensible(theta_new, phi_new, dt)
            ch.refresh(theta_new, q_new, phi_new, dt, required_joint_tension=t_req)

        j.angle = q_new
        j.velocity = v_new
        m.spool_angle = theta_new
        m.torque_estimate = ch.motor_tension * m.spool_radius
        self.phi = phi_new
        self.motor_work += (
            0.5 * (tension_before + ch.motor_tension) * m.spool_radius * dt * u
        )
        if not (
            math.isfinite(j.angle)
            and math.isfinite(j.velocity)
            and math.isfinite(ch.motor_tension)
        ):
            raise NonFiniteState(f"plant state non-finite at t={t + dt}: q={j.angle}, v={j.velocity}")

    # --- elastic branch ---

    def _step_elastic(self, theta_new: float, phi_new: float, dt: float) -> tuple[float, float]:
        j, ch = self.joint, self.channel
        a = ch.direction_factor(phi_new)
        k_lin = ch.linear_stiffness
        r = j.spool_radius
        g0 = ch.span(ch.wave_theta(theta_new), 0.0, phi_new) - ch.rest_length
        q, v = j.angle, j.velocity

        # static net torque at the current angle, tension clamped at zero
        tension_excess = g0 - r * q
        joint_tension = a * k_lin * tension_excess if tension_excess > 0.0 else 0.0
        net_static = joint_tension * r - j.spring_preload - j.spring_stiffness * q
        if abs(v) < _REST_VELOCITY and abs(net_static) <= j.stiction_torque:
            return self._apply_limits(q, 0.0)

        if self.quasi_static:
            # the torque balance is monotone in q and its crossing always
            # carries non-negative tension when above the rest angle, so the
            # taut-line solve covers every case
            s = j.stiction_torque * (1.0 if net_static > 0.0 else -1.0) if j.stiction_torque > 0.0 else 0.0
            big_a = a * k_lin * r * g0 - j.spring_preload
            big_k = a * k_lin * r * r + j.spring_stiffness
            q_new = max((big_a - s) / big_k, j.rest_angle)
            q_new, _ = self._apply_limits(q_new, 0.0)
            return q_new, (q_new - q) / dt

        if tension_excess > 0.0:
            big_a = a * k_lin * r * g0 - j.spring_preload
            big_k = a * k_lin * r * r + j.spring_stiffness
        else:
            big_a = -j.spring_preload
            big_k = j.spring_stiffness
        inv_i = dt / j.inertia
        v_new = (v + inv_i * (big_a - big_k * q)) / (1.0 + inv_i * (j.damping + dt * big_k))
        q_new = q + dt * v_new
        return self._apply_limits(q_new, v_new)

    # --- inextensible branch ---

    def _step_inextensible(
        self, theta_new: float, phi_new: float, dt: float
    ) -> tuple[float, float, float]:
        j, ch = self.joint, self.channel
        q, v = j.angle, j.velocity
        q_taut = ch.taut_angle(theta_new, phi_new)
        if q_taut >= j.rest_angle:
            # taut: the joint is kinematically locked to the tendon
            q_new = min(max(q_taut, j.angle_min), j.angle_max)
            v_new = (q_new - q) / dt
            accel = (v_new - v) / dt
            t_req = (
                j.spring_preload
                + j.spring_stiffness * q_new
                + j.damping * v_new
                + (0.0 if self.quasi_static else j.inertia * accel)
            ) / j.spool_radius
            return q_new, v_new, max(0.0, t_req)
        # slack: free spring return, with the taut angle as a one-sided floor
        if self.quasi_static:
            q_new = max(j.rest_angle, q_taut)
            q_new = min(max(q_new, j.angle_min), j.angle_max)
            return q_new, (q_new - q) / dt, 0.0
        big_a, big_k = -j.spring_preload, j.spring_stiffness
        if abs(v) < _REST_VELOCITY and abs(big_a - big_k * q) <= j.stiction_torque:
            q_new, v_new = self._apply_limits(q, 0.0)
            return q_new, v_new, 0.0
        inv_i = dt / j.inertia
        v_new = (v + inv_i * (big_a - big_k * q)) / (1.0 + inv_i * (j.damping + dt * big_k))
        q_new = q + dt * v_new
        if q_new < q_taut:  # the tendon catches
            q_new, v_new = q_taut, 0.0
        q_new, v_new = self._apply_limits(q_new, v_new)
        return q_new, v_new, 0.0

    def _apply_limits(self, q: float, v: float) -> tuple[float, float]:
        j = self.joint
        if q <= j.angle_min:
            return j.angle_min, 0.0 if v < 0.0 else v
        if q >= j.angle_max:
            return j.angle_max, 0.0 if v > 0.0 else v
        return q, v

    # --- energy accounting (for sanity tests) ---

    def spring_energy(self) -> float:
        q = self.joint.angle
        return self.joint.spring_preload * q + 0.5 * self.joint.spring_stiffness * q * q

    def tendon_energy(self) -> float:
        ch = self.channel
        if not ch.elastic:
            return 0.0
        return 0.5 * ch.linear_stiffness * ch.stretch * ch.stretch


class AntagonisticPlant:
    """One joint driven by an opposing tendon pair (both can only pull)."""

    def __init__(
        self,
        joint: AntagonisticJoint,
        agonist: TendonChannel,
        antagonist: TendonChannel,
        disturbance: ArmDisturbance | None = None,
    ) -> None:
        if agonist.sense != 1 or antagonist.sense != -1:
            raise ValueError("agonist must have sense +1 and antagonist sense -1")
        if not (agonist.elastic and antagonist.elastic):
            raise ValueError("antagonistic channels must be elastic")
        self.joint = joint
        self.agonist = agonist
        self.antagonist = antagonist
        self.disturbance = disturbance or ArmDisturbance.constant(agonist.static_bend)
        self.phi = self.disturbance.phi(0.0)

    def engage(self, cocontraction: float = 0.0, dt: float = 1e-3) -> None:
        """Engage both channels, optionally holding an idle co-contraction tension."""
        q = self.joint.angle
        self.agonist.engage(q=q, phi=self.phi, dt=dt, joint_tension=cocontraction)
        self.antagonist.engage(q=q, phi=self.phi, dt=dt, joint_tension=cocontraction)

    def step(self, cmd_agonist: float, cmd_antagonist: float, t: float, dt: float) -> None:
        if not dt > 0.0:
            raise ValueError("dt must be > 0")
        j = self.joint
        phi_new = self.disturbance.phi(t + dt)
        thetas = []
        for ch, cmd in ((self.agonist, cmd_agonist), (self.antagonist, cmd_antagonist)):
            u = min(max(cmd, -ch.motor.max_speed), ch.motor.max_speed)
            ch.motor.command = cmd
            ch.update_direction(u)
            thetas.append(ch.motor.spool_angle + dt * u)

        big_a, big_k = 0.0, 0.0
        r = j.spool_radius
        for ch, theta_new in zip((self.agonist, self.antagonist), thetas):
            a = ch.direction_factor(phi_new)
            g0 = ch.span(ch.wave_theta(theta_new), 0.0, phi_new) - ch.rest_length
            # taut iff positive tension at the current angle
            if g0 - ch.sense * r * j.angle > 0.0:
                big_a += ch.sense * a * ch.linear_stiffness * r * g0
                big_k += a * ch.linear_stiffness * r * r
        inv_i = dt / j.inertia
        v_new = (j.velocity + inv_i * (big_a - big_k * j.angle)) / (
            1.0 + inv_i * (j.damping + dt * big_k)
        )
        q_new = j.angle + dt * v_new
        if q_new <= j.angle_min:
            q_new, v_new = j.angle_min, max(v_new, 0.0)
        elif q_new >= j.angle_max:
            q_new, v_new = j.angle_max, min(v_new, 0.0)

        for ch, theta_new in zip((self.agonist, self.antagonist), thetas):
            ch.refresh(theta_new, q_new, phi_new, dt)
            ch.motor.spool_angle = theta_new
            ch.motor.torque_estimate = ch.motor_tension * ch.motor.spool_radius
        j.angle, j.velocity = q_new, v_new
        self.phi = phi_new
        if not (math.isfinite(q_new) and math.isfinite(v_new)):
            raise NonFiniteState(f"antagonistic plant non-finite at t={t + dt}")

    @property
    def net_torque_static(self) -> float:
        return (self.agonist.joint_tension - self.antagonist.joint_tension) * self.joint.spool_radius

"""Joint-space closed-loop control of one tendon-driven joint.

The controller runs PID on the joint encoder error and outputs a motor
velocity command. Long-transmission quirks get dedicated handling:

* software pretensioning winds the motor by a preset angle at startup so
  the tendon engages without tensioning hardware;
* a release-rate limit keeps the motor from paying out faster than the
  spring can recover, which is what prevents slack during rapid release;
* a slack-recovery term reels the tendon back in whenever the measured
  joint angle lags what the ideal transmission predicts;
* a safety monitor stops everything when the motor-side torque spikes
  without matching encoder motion (a jammed or snagged tendon).

One controller instance per joint, stepped in lockstep with its plant.
Output is a deterministic function of the input sequence, so replaying
logged inputs reproduces commands bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import FaultedController, PretensionTimeout

__all__ = [
    "PidGains",
    "ControllerMode",
    "PidController",
    "AnomalyConfig",
    "AnomalyVerdict",
    "AnomalyDetector",
    "SlackRecoveryConfig",
    "JointController",
    "default_release_speed_limit",
    "pretension_init",
]


@dataclass(frozen=True)
class PidGains:
    """Velocity-output PID gains: motor rad/s per rad of joint error."""

    kp: float = 8.0
    ki: float = 2.0
    kd: float = 0.05
    integral_clamp: float = 0.02  # rad * s
    output_clamp: float = 6.0  # rad / s
    derivative_filter_steps: float = 10.0  # first-order filter time constant, in units of dt

    def __post_init__(self) -> None:
        if self.kp < 0.0 or self.ki < 0.0 or self.kd < 0.0:
            raise ValueError("gains must be >= 0")
        if not (self.integral_clamp > 0.0 and self.output_clamp > 0.0):
            raise ValueError("clamps must be > 0")


class ControllerMode(Enum):
    INITIALIZING = "initializing"
    TRACKING = "tracking"
    FAULTED = "faulted"


class PidController:
    """PID with clamped conditional-integration anti-windup and filtered derivative.

    The integral freezes while the raw output is saturated and the error
    pushes further into saturation; it is additionally magnitude-clamped.
    The derivative term runs through a first-order low-pass so encoder
    quantization does not get amplified.
    """

    def __init__(
        self,
        gains: PidGains,
        release_speed_limit: float | None = None,
        pretension_angle: float = 0.0,
    ) -> None:
        self.gains = gains
        self.release_speed_limit = release_speed_limit
        self.pretension_angle = pretension_angle  # motor wind-in applied at init
        self.integral = 0.0
        self.previous_error = 0.0
        self.derivative_filtered = 0.0
        self.mode = ControllerMode.INITIALIZING
        self._primed = False

    def reset(self) -> None:
        self.integral = 0.0
        self.previous_error = 0.0
        self.derivative_filtered = 0.0
        self.mode = ControllerMode.INITIALIZING
        self._primed = False

    def step(self, q_ref: float, q_meas: float, dt: float) -> float:
        """One PID update; returns the motor velocity command in rad/s."""
        if self.mode is ControllerMode.FAULTED:
            raise FaultedController("pid_step called on a faulted controller")
        if not dt > 0.0:
            raise ValueError("dt must be > 0")
        g = self.gains
        error = q_ref - q_meas

        raw_derivative = 0.0 if not self._primed else (error - self.previous_error) / dt
        tau = g.derivative_filter_steps * dt
        alpha = dt / (tau + dt)
        self.derivative_filtered += alpha * (raw_derivative - self.derivative_filtered)

        candidate = self.integral + error * dt
        candidate = min(max(candidate, -g.integral_clamp), g.integral_clamp)
        unsaturated = g.kp * error + g.ki * candidate + g.kd * self.derivative_filtered
        if -g.output_clamp <= unsaturated <= g.output_clamp:
            self.integral = candidate
            output = unsaturated
        else:
            # saturated: freeze the integral unless the error pulls back inward
            if unsaturated * error < 0.0:
                self.integral = candidate
            output = g.kp * error + g.ki * self.integral + g.kd * self.derivative_filtered
            output = min(max(output, -g.output_clamp), g.output_clamp)

        if self.release_speed_limit is not None and output < -self.release_speed_limit:
            output = -self.release_speed_limit

        self.previous_error = error
        self._primed = True
        return output


@dataclass(frozen=True)
class AnomalyConfig:
    """Thresholds for the current-spike safety stop."""

    current_spike_threshold: float = 0.5  # N * m of motor-side torque
    encoder_motion_floor: float = 0.01  # rad / s
    window: float = 0.1  # s

    def __post_init__(self) -> None:
        if not (
            self.current_spike_threshold > 0.0
            and self.encoder_motion_floor > 0.0
            and self.window > 0.0
        ):
            raise ValueError("all anomaly thresholds must be > 0")


class AnomalyVerdict(Enum):
    NORMAL = "normal"
    STOP = "stop"


class AnomalyDetector:
    """Flags a stop when torque stays above threshold for a full window
    while the encoder shows no motion throughout that window."""

    def __init__(self, cfg: AnomalyConfig, dt: float) -> None:
        self.cfg = cfg
        self.window_steps = max(1, int(round(cfg.window / dt)))
        self._suspect_streak = 0

    def reset(self) -> None:
        self._suspect_streak = 0

    def update(self, torque_estimate: float, encoder_velocity: float) -> AnomalyVerdict:
        suspect = (
            torque_estimate > self.cfg.current_spike_threshold
            and abs(encoder_velocity) < self.cfg.encoder_motion_floor
        )
        self._suspect_streak = self._suspect_streak + 1 if suspect else 0
        if self._suspect_streak >= self.window_steps:
            return AnomalyVerdict.STOP
        return AnomalyVerdict.NORMAL


@dataclass(frozen=True)
class SlackRecoveryConfig:
    """Reel-in correction when the joint lags the ideal transmission map."""

    threshold: float = math.radians(2.0)  # joint angle lag that counts as slack
    reel_in_speed: float = 0.5  # motor rad/s superimposed on the PID output

    def __post_init__(self) -> None:
        if not (self.threshold > 0.0 and self.reel_in_speed > 0.0):
            raise ValueError("slack recovery parameters must be > 0")


def slack_recovery_command(
    expected_angle: float, measured_angle: float, cfg: SlackRecoveryConfig
) -> float:
    """Bounded reel-in velocity, or 0 when the tendon is not lagging.

    One-sided: a joint ahead of the ideal map (externally loaded, taut)
    never triggers reel-in.
    """
    if expected_angle - measured_angle > cfg.threshold:
        return cfg.reel_in_speed
    return 0.0


def default_release_speed_limit(
    spring_stiffness: float,
    spring_preload: float,
    damping: float,
    mid_angle: float,
    joint_radius: float,
    motor_radius: float,
) -> float:
    """Motor-side cap on release speed: the spring's free-return rate at mid-range.

    The unloaded joint returns at spring torque over damping; the motor must
    not pay out faster than the equivalent spool rate or the line goes slack.
    """
    joint_rate = (spring_preload + spring_stiffness * mid_angle) / damping
    return joint_rate * joint_radius / motor_radius


class JointController:
    """Full per-joint stack: PID, release limit, slack recovery, safety stop.

    Once faulted, every subsequent step returns a zero command until an
    explicit reset; the underlying PID refuses stepping in that state, and
    this wrapper enforces the zero-command contract.
    """

    def __init__(
        self,
        gains: PidGains,
        dt: float,
        release_speed_limit: float | None = None,
        slack_recovery: SlackRecoveryConfig | None = None,
        anomaly: AnomalyConfig | None = None,
        expected_angle_fn=None,
    ) -> None:
        self.pid = PidController(gains, release_speed_limit)
        self.slack_recovery = slack_recovery
        self.anomaly = AnomalyDetector(anomaly, dt) if anomaly is not None else None
        self.expected_angle_fn = expected_angle_fn
        self.pid.mode = ControllerMode.TRACKING

    @property
    def mode(self) -> ControllerMode:
        return self.pid.mode

    def fault(self) -> None:
        self.pid.mode = ControllerMode.FAULTED

    def reset(self) -> None:
        self.pid.reset()
        self.pid.mode = ControllerMode.TRACKING
        if self.anomaly is not None:
            self.anomaly.reset()

    def step(
        self,
        q_ref: float,
        q_meas: float,
        dt: float,
        motor_angle: float = 0.0,
        torque_estimate: float = 0.0,
        encoder_velocity: float = 0.0,
        t: float = 0.0,
    ) -> float:
        if self.pid.mode is ControllerMode.FAULTED:
            return 0.0
        if self.anomaly is not None:
            if self.anomaly.update(torque_estimate, encoder_velocity) is AnomalyVerdict.STOP:
                self.fault()
                return 0.0
        command = self.pid.step(q_ref, q_meas, dt)
        if self.slack_recovery is not None and self.expected_angle_fn is not None:
            expected = self.expected_angle_fn(motor_angle, t)
            command += slack_recovery_command(expected, q_meas, self.slack_recovery)
        clamp = self.pid.gains.output_clamp
        command = min(max(command, -clamp), clamp)
        if self.pid.release_speed_limit is not None and command < -self.pid.release_speed_limit:
            command = -self.pid.release_speed_limit
        return command


def pretension_init(
    plant,
    pretension_angle: float,
    dt: float,
    wind_speed: float = 0.5,
    slack_tolerance: float = 1e-6,
    timeout: float = 10.0,
) -> PidController:
    """Wind the motor in by a preset angle at limited speed, then verify engagement.

    Returns a fresh controller in tracking mode once the channel slack is
    within tolerance. Raises PretensionTimeout when the wind-in completes
    (or the horizon expires) with the tendon still slack, which is what a
    broken or far-too-long tendon looks like from the hub.
    """
    if pretension_angle < 0.0:
        raise ValueError("pretension angle must be >= 0")
    controller = PidController(PidGains(), pretension_angle=pretension_angle)
    controller.mode = ControllerMode.INITIALIZING
    target = plant.motor.spool_angle + pretension_angle
    t = 0.0
    while plant.motor.spool_angle < target - 1e-12:
        if t > timeout:
            raise PretensionTimeout(
                f"pretension horizon {timeout} s expired with slack {plant.channel.slack:.3e} m"
            )
        remaining = (target - plant.motor.spool_angle) / dt
        plant.step(min(wind_speed, remaining), t, dt)
        t += dt
    if plant.channel.slack > slack_tolerance:
        raise PretensionTimeout(
            f"pretension wound {pretension_angle} rad but slack is still "
            f"{plant.channel.slack:.3e} m; tendon not engaging"
        )
    controller.mode = ControllerMode.TRACKING
    return controller

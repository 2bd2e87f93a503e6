"""Declarative experiment runner: four scenario families on the simulated plant.

Each runner takes a validated ScenarioConfig and produces a RunRecord: the
full time series (or sweep table), summary metrics recomputable from that
series, and a snapshot of the configuration. Runs are deterministic: the
same config and seed give bit-identical records, and rewriting them as CSV
gives byte-identical files.

Scenario families:

* friction_sweep: evaluates capstan loss over a grid of wrap angles and
  disk diameters per sheath type, optionally with seeded multiplicative
  noise, shaped to feed the friction-fit estimator back.
* fingertip_force: a blocked finger pressing a gauge while the motor ramps
  tension through sheaths of different lengths.
* step_response: closed-loop step on one joint; reports steady-state error
  and the motion onset delay.
* sine_tracking: closed-loop sinusoidal reference run twice, once with the
  arm still and once with the arm moving, reporting RMS error per variant.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
import numpy as np

from .config import ScenarioConfig, SheathChoice, serialize_config
from .control import (
    AnomalyConfig,
    ControllerMode,
    JointController,
    PidGains,
    SlackRecoveryConfig,
    default_release_speed_limit,
)
from .errors import ScenarioError
from .estimation import FRICTION_CSV_COLUMNS, FrictionSample
from .hand import default_hand
from .plant import (
    ArmDisturbance,
    MotorState,
    SingleJointPlant,
    SpringReturnJoint,
    TendonChannel,
    joint_equilibrium_tension,
)
from .transmission import SheathPath, TendonSpec

__all__ = [
    "RunRecord",
    "run_scenario",
    "run_friction_sweep",
    "run_fingertip_force",
    "run_step_response",
    "run_sine_tracking",
    "recompute_summary",
    "sine_reference",
    "step_reference",
    "ONSET_MOTION_FLOOR",
    "STEADY_STATE_WINDOW",
]

ONSET_MOTION_FLOOR = math.radians(0.05)  # rad/s; motion below this is "not started"
STEADY_STATE_WINDOW = 0.2  # fraction of the horizon used for the steady-state error


@dataclass
class RunRecord:
    """One scenario's persisted output: series, summary, config snapshot."""

    kind: str
    columns: tuple[str, ...]
    rows: list[tuple]
    summary: dict
    config_doc: str  # canonical serialized configuration

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([row[j] for row in self.rows], dtype=float)

    def text_column(self, name: str) -> list[str]:
        j = self.columns.index(name)
        return [str(row[j]) for row in self.rows]

    def to_csv(self, path: str | Path) -> None:
        """Comma-separated, header row, LF endings, 9 significant digits."""
        with open(path, "w", newline="") as f:
            f.write(",".join(self.columns) + "\n")
            for row in self.rows:
                f.write(",".join(_format_cell(v) for v in row) + "\n")

    def write_summary(self, path: str | Path) -> None:
        with open(path, "w") as f:
            json.dump(self.summary, f, indent=2, sort_keys=True)
            f.write("\n")


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.9g}"


# --- reference signals ---


def step_reference(n_steps: int, dt: float, step_time: float, initial: float, target: float) -> np.ndarray:
    """Held value switching to the target at the first sample >= step_time."""
    ref = np.full(n_steps, initial, dtype=float)
    k = int(math.ceil(step_time / dt - 1e-9))
    ref[k:] = target
    return ref


def sine_reference(n_steps: int, dt: float, frequency: float, lo: float, hi: float) -> np.ndarray:
    """Raised-cosine sweep between lo and hi, starting at lo.

    When a cycle spans an integer number of steps the phase is computed from
    the step index, so the extrema land exactly on lo and hi; otherwise the
    continuous-time phase is used and extrema are approximate.
    """
    steps_per_cycle = 1.0 / (frequency * dt)
    rounded = round(steps_per_cycle)
    i = np.arange(n_steps)
    if abs(steps_per_cycle - rounded) < 1e-9 and rounded >= 2:
        phase = 2.0 * math.pi * ((i % rounded) / rounded)
    else:
        phase = 2.0 * math.pi * frequency * (i * dt)
    w = 0.5 * (1.0 - np.cos(phase))
    return lo * (1.0 - w) + hi * w


# --- plant / controller assembly ---


def _joint_limits(cfg: ScenarioConfig) -> float:
    if cfg.joint.angle_max is not None:
        return cfg.joint.angle_max
    return default_hand().joint(cfg.joint_index).max_angle


def _build_disturbance(cfg: ScenarioConfig) -> ArmDisturbance:
    d = cfg.disturbance
    if d.kind == "constant":
        return ArmDisturbance.constant(d.phi0)
    if d.kind == "step":
        return ArmDisturbance.step(d.phi0, d.delta, d.at_time)
    if d.kind == "sinusoid":
        return ArmDisturbance.sinusoid(d.phi0, d.amplitude, d.frequency)
    return ArmDisturbance.piecewise_linear(list(d.times), list(d.values))


def build_single_joint_plant(
    cfg: ScenarioConfig,
    initial_angle: float,
    disturbance: ArmDisturbance | None = None,
) -> SingleJointPlant:
    """Assemble the configured joint/motor/channel stack at a static fixed point."""
    joint = SpringReturnJoint(
        spool_radius=cfg.joint.spool_radius,
        spring_stiffness=cfg.joint.spring_stiffness,
        spring_preload=cfg.joint.spring_preload,
        damping=cfg.joint.damping,
        inertia=cfg.joint.inertia,
        stiction_torque=cfg.joint.stiction_torque,
        angle_min=0.0,
        angle_max=_joint_limits(cfg),
        angle=initial_angle,
    )
    motor = MotorState(spool_radius=cfg.motor.spool_radius, max_speed=cfg.motor.max_speed)
    spec = TendonSpec(
        tendon_diameter=cfg.tendon.tendon_diameter,
        sheath_inner_diameter=cfg.tendon.sheath_inner_diameter,
        friction_coefficient=cfg.tendon.friction_coefficient,
        axial_stiffness=cfg.tendon.axial_stiffness,
    )
    path = SheathPath.uniform_bend(cfg.tendon.sheath_length, cfg.tendon.sheath_bend)
    channel = TendonChannel(
        spec,
        path,
        motor,
        joint.spool_radius,
        transport_delay=cfg.tendon.transport_delay,
        creep_compliance=cfg.tendon.creep_compliance,
        creep_time_constant=cfg.tendon.creep_time_constant,
    )
    plant = SingleJointPlant(
        joint,
        motor,
        channel,
        disturbance=disturbance or _build_disturbance(cfg),
        quasi_static=cfg.mode == "quasi_static",
    )
    plant.engage(joint_tension=joint_equilibrium_tension(joint, initial_angle), dt=cfg.dt)
    return plant


def build_controller(cfg: ScenarioConfig, plant: SingleJointPlant) -> JointController:
    gains = PidGains(
        kp=cfg.controller.kp,
        ki=cfg.controller.ki,
        kd=cfg.controller.kd,
        integral_clamp=cfg.controller.integral_clamp,
        output_clamp=cfg.controller.output_clamp,
    )
    release = cfg.controller.release_speed_limit
    if release is None:
        j = plant.joint
        release = default_release_speed_limit(
            j.spring_stiffness,
            j.spring_preload,
            j.damping,
            0.5 * (j.angle_min + j.angle_max),
            j.spool_radius,
            plant.motor.spool_radius,
        )
    return JointController(
        gains,
        cfg.dt,
        release_speed_limit=release,
        slack_recovery=SlackRecoveryConfig(
            threshold=cfg.controller.slack_threshold,
            reel_in_speed=cfg.controller.slack_recovery_speed,
        ),
        anomaly=AnomalyConfig(
            current_spike_threshold=cfg.controller.anomaly.current_spike_threshold,
            encoder_motion_floor=cfg.controller.anomaly.encoder_motion_floor,
            window=cfg.controller.anomaly.window,
        ),
        expected_angle_fn=plant.expected_angle,
    )


# --- closed-loop runner core ---

_SERIES_FIELDS = ("q_meas", "motor_angle", "motor_command", "torque_estimate", "slack", "phi")


def _run_closed_loop(
    cfg: ScenarioConfig,
    reference: np.ndarray,
    plant: SingleJointPlant,
    controller: JointController,
    rng: np.random.Generator,
) -> dict[str, np.ndarray]:
    n = reference.size
    dt = cfg.dt
    quantum = cfg.noise.encoder_quantum
    tension_noise = cfg.noise.tension_noise
    out = {name: np.empty(n) for name in _SERIES_FIELDS}
    joint, motor, channel = plant.joint, plant.motor, plant.channel
    for i in range(n):
        t = i * dt
        q = joint.angle
        q_enc = math.floor(q / quantum + 0.5) * quantum if quantum > 0.0 else q
        torque = motor.torque_estimate
        if tension_noise > 0.0:
            torque *= 1.0 + rng.uniform(-tension_noise, tension_noise)
        u = controller.step(
            reference[i],
            q_enc,
            dt,
            motor_angle=motor.spool_angle,
            torque_estimate=torque,
            encoder_velocity=joint.velocity,
            t=t,
        )
        if controller.mode is ControllerMode.FAULTED:
            raise ScenarioError(f"controller faulted (anomaly stop) at t={t:.3f} s")
        out["q_meas"][i] = q_enc
        out["motor_angle"][i] = motor.spool_angle
        out["motor_command"][i] = u
        out["torque_estimate"][i] = torque
        out["slack"][i] = channel.slack
        out["phi"][i] = plant.phi
        plant.step(u, t, dt)
    return out


# --- metrics (pure functions of the stored series) ---


def steady_state_error(t: np.ndarray, q_ref: np.ndarray, q_meas: np.ndarray) -> float:
    """Mean absolute error over the final window of the horizon."""
    start = int(math.floor(t.size * (1.0 - STEADY_STATE_WINDOW)))
    return float(np.mean(np.abs(q_ref[start:] - q_meas[start:])))


def onset_delay(t: np.ndarray, q_meas: np.ndarray, command_time: float, dt: float) -> float:
    """Time from the command to the joint speed first exceeding the motion floor."""
    speed = np.abs(np.diff(q_meas)) / dt
    moving = np.flatnonzero((t[1:] > command_time) & (speed > ONSET_MOTION_FLOOR))
    if moving.size == 0:
        return float("nan")
    return float(t[moving[0] + 1] - command_time)


def rms_error(q_ref: np.ndarray, q_meas: np.ndarray) -> float:
    err = q_ref - q_meas
    return float(np.sqrt(np.mean(err * err)))


def recompute_summary(record: RunRecord) -> dict:
    """Re-derive the summary metrics from the stored series; must match exactly."""
    if record.kind == "step_response":
        meta = record.summary
        t = record.column("t")
        return {
            "command_time": meta["command_time"],
            "steady_state_error": steady_state_error(
                t, record.column("q_ref"), record.column("q_meas")
            ),
            "onset_delay": onset_delay(
                t, record.column("q_meas"), meta["command_time"], meta["dt"]
            ),
            "dt": meta["dt"],
        }
    if record.kind == "sine_tracking":
        q_ref = record.column("q_ref")
        rms_static = rms_error(q_ref, record.column("q_meas_static"))
        rms_moving = rms_error(q_ref, record.column("q_meas_moving"))
        return {
            "rms_error_static": rms_static,
            "rms_error_moving": rms_moving,
            "rms_difference": rms_moving - rms_static,
            "reference_min": float(np.min(q_ref)),
            "reference_max": float(np.max(q_ref)),
        }
    if record.kind == "fingertip_force":
        names = [c[len("force_"):] for c in record.columns if c.startswith("force_")]
        peaks = {f"peak_force_{n}": float(np.max(record.column(f"force_{n}"))) for n in names}
        first, last = names[0], names[-1]
        peaks["peak_force_ratio"] = peaks[f"peak_force_{last}"] / peaks[f"peak_force_{first}"]
        return peaks
    if record.kind == "friction_sweep":
        mean = record.column("mean_tension_N")
        load = record.column("load_N")
        return {
            "n_rows": len(record.rows),
            "max_friction": float(np.max(mean - load)),
        }
    raise ScenarioError(f"unknown record kind {record.kind!r}")


# --- scenario runners ---


def run_friction_sweep(cfg: ScenarioConfig, jobs: int = 1) -> RunRecord:
    """Capstan loss over the (sheath, angle, diameter) grid against a fixed load.

    Grid points are independent; with jobs > 1 they evaluate in a thread
    pool and are reassembled in grid order, so the output is identical
    either way. Noise draws are made upfront in grid order for the same
    reason.
    """
    if cfg.sweep is None:
        raise ScenarioError("friction_sweep config lacks a sweep section")
    sweep = cfg.sweep
    rng = np.random.default_rng(cfg.seed)
    grid = [
        (sheath, angle, diameter)
        for sheath in sweep.sheaths
        for angle in sweep.angles
        for diameter in sweep.diameters
    ]
    factors = (
        1.0 + rng.uniform(-sweep.noise, sweep.noise, size=len(grid))
        if sweep.noise > 0.0
        else np.ones(len(grid))
    )

    def evaluate(item: tuple[int, tuple]) -> tuple[int, tuple]:
        idx, (sheath, angle, diameter) = item
        mean_tension = sweep.load * math.exp(sheath.mu * angle) * factors[idx]
        row = (
            sheath.name,
            math.degrees(angle),
            diameter * 1e3,
            mean_tension,
            0.0,
            sweep.load,
        )
        return idx, row

    items = list(enumerate(grid))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(evaluate, items))
    else:
        results = dict(map(evaluate, items))
    rows = [results[i] for i in range(len(grid))]

    record = RunRecord(
        kind="friction_sweep",
        columns=FRICTION_CSV_COLUMNS,
        rows=rows,
        summary={},
        config_doc=serialize_config(cfg),
    )
    record.summary = recompute_summary(record)
    return record


def sweep_to_samples(record: RunRecord) -> dict[str, list[FrictionSample]]:
    """Regroup a sweep record into estimator-ready samples per sheath type."""
    out: dict[str, list[FrictionSample]] = {}
    for row in record.rows:
        name, angle_deg, diameter_mm, mean_tension, std_tension, load = row
        out.setdefault(name, []).append(
            FrictionSample(
                wrap_angle=math.radians(angle_deg),
                disk_diameter=diameter_mm * 1e-3,
                mean_tension=mean_tension,
                std_tension=std_tension,
                load_tension=load,
            )
        )
    return out


def run_fingertip_force(cfg: ScenarioConfig) -> RunRecord:
    """Blocked-finger press: motor ramps tension and holds, per sheath choice."""
    if cfg.fingertip is None:
        raise ScenarioError("fingertip_force config lacks a fingertip section")
    ft = cfg.fingertip
    dt = cfg.dt
    n = int(round(cfg.duration / dt))
    t_axis = np.arange(n) * dt
    forces: dict[str, np.ndarray] = {}
    tensions: dict[str, np.ndarray] = {}

    for sheath in ft.sheaths:
        forces[sheath.name], tensions[sheath.name] = _press_once(cfg, sheath, n)

    columns = ["t"]
    for sheath in ft.sheaths:
        columns.extend([f"force_{sheath.name}", f"joint_tension_{sheath.name}"])
    rows = []
    for i in range(n):
        row: list = [t_axis[i]]
        for sheath in ft.sheaths:
            row.extend([forces[sheath.name][i], tensions[sheath.name][i]])
        rows.append(tuple(row))
    record = RunRecord(
        kind="fingertip_force",
        columns=tuple(columns),
        rows=rows,
        summary={},
        config_doc=serialize_config(cfg),
    )
    record.summary = recompute_summary(record)
    return record


def _press_once(cfg: ScenarioConfig, sheath: SheathChoice, n: int) -> tuple[np.ndarray, np.ndarray]:
    """One blocked-finger press: tension-servoed ramp, then a frozen motor.

    During the ramp the motor-side tension follows the prescribed profile
    and the spool angle is solved from it; after the ramp the spool holds
    position, so any creep of the sheath shows up as force decay.
    """
    ft = cfg.fingertip
    dt = cfg.dt
    joint = SpringReturnJoint(
        spool_radius=cfg.joint.spool_radius,
        spring_stiffness=cfg.joint.spring_stiffness,
        spring_preload=cfg.joint.spring_preload,
        damping=cfg.joint.damping,
        inertia=cfg.joint.inertia,
        angle_max=_joint_limits(cfg),
        angle=ft.contact_angle,
    )
    motor = MotorState(spool_radius=cfg.motor.spool_radius, max_speed=cfg.motor.max_speed)
    spec = TendonSpec(
        tendon_diameter=cfg.tendon.tendon_diameter,
        sheath_inner_diameter=cfg.tendon.sheath_inner_diameter,
        friction_coefficient=cfg.tendon.friction_coefficient,
        axial_stiffness=cfg.tendon.axial_stiffness,
    )
    if spec.axial_stiffness is None:
        raise ScenarioError("fingertip_force needs an elastic tendon (axial_stiffness)")
    path = SheathPath.uniform_bend(sheath.length, sheath.bend)
    channel = TendonChannel(
        spec,
        path,
        motor,
        joint.spool_radius,
        transport_delay=cfg.tendon.transport_delay,
        creep_compliance=cfg.tendon.creep_compliance,
        creep_time_constant=cfg.tendon.creep_time_constant,
    )
    channel.engage(q=ft.contact_angle, phi=sheath.bend, dt=dt)
    reaction = joint.spring_preload + joint.spring_stiffness * ft.contact_angle
    i_ramp = max(1, int(round(ft.ramp_time / dt)))

    force = np.empty(n)
    tension = np.empty(n)
    theta = 0.0
    channel.update_direction(1.0)
    for i in range(n):
        if i <= i_ramp:
            target = ft.peak_tension * (i / i_ramp)
            theta = channel.theta_for_motor_tension(target, ft.contact_angle, sheath.bend)
        channel.refresh(theta, ft.contact_angle, sheath.bend, dt)
        tension[i] = channel.joint_tension
        force[i] = (channel.joint_tension * joint.spool_radius - reaction) / ft.contact_lever
    return force, tension


def run_step_response(cfg: ScenarioConfig) -> RunRecord:
    """Closed-loop step on one joint: steady-state error and onset delay."""
    if cfg.step is None:
        raise ScenarioError("step_response config lacks a step section")
    dt = cfg.dt
    n = int(round(cfg.duration / dt))
    reference = step_reference(n, dt, cfg.step.time, cfg.step.initial_angle, cfg.step.target)
    plant = build_single_joint_plant(cfg, initial_angle=cfg.step.initial_angle)
    controller = build_controller(cfg, plant)
    rng = np.random.default_rng(cfg.seed)
    series = _run_closed_loop(cfg, reference, plant, controller, rng)

    t_axis = np.arange(n) * dt
    columns = ("t", "q_ref", "q_meas", "motor_angle", "motor_command", "torque_estimate", "slack", "phi")
    rows = [
        (
            t_axis[i],
            reference[i],
            series["q_meas"][i],
            series["motor_angle"][i],
            series["motor_command"][i],
            series["torque_estimate"][i],
            series["slack"][i],
            series["phi"][i],
        )
        for i in range(n)
    ]
    record = RunRecord(
        kind="step_response",
        columns=columns,
        rows=rows,
        summary={"command_time": cfg.step.time, "dt": dt},
        config_doc=serialize_config(cfg),
    )
    record.summary = recompute_summary(record)
    return record


def run_sine_tracking(cfg: ScenarioConfig) -> RunRecord:
    """Sinusoidal tracking with a still arm and a moving arm, same seed and gains."""
    if cfg.sine is None:
        raise ScenarioError("sine_tracking config lacks a sine section")
    dt = cfg.dt
    n = int(round(cfg.duration / dt))
    reference = sine_reference(n, dt, cfg.sine.frequency, cfg.sine.min_angle, cfg.sine.max_angle)

    variants: dict[str, dict[str, np.ndarray]] = {}
    for label, disturbance in (
        ("static", ArmDisturbance.constant(cfg.disturbance.phi0)),
        ("moving", _build_disturbance(cfg)),
    ):
        plant = build_single_joint_plant(cfg, initial_angle=cfg.sine.min_angle, disturbance=disturbance)
        controller = build_controller(cfg, plant)
        rng = np.random.default_rng(cfg.seed)
        variants[label] = _run_closed_loop(cfg, reference, plant, controller, rng)

    t_axis = np.arange(n) * dt
    columns = ["t", "q_ref"]
    for label in ("static", "moving"):
        columns.extend(f"{name}_{label}" for name in _SERIES_FIELDS)
    rows = []
    for i in range(n):
        row: list = [t_axis[i], reference[i]]
        for label in ("static", "moving"):
            row.extend(variants[label][name][i] for name in _SERIES_FIELDS)
        rows.append(tuple(row))
    record = RunRecord(
        kind="sine_tracking",
        columns=tuple(columns),
        rows=rows,
        summary={},
        config_doc=serialize_config(cfg),
    )
    record.summary = recompute_summary(record)
    return record


def run_scenario(cfg: ScenarioConfig, jobs: int = 1) -> RunRecord:
    """Dispatch a validated configuration to its scenario family."""
    if cfg.kind == "friction_sweep":
        return run_friction_sweep(cfg, jobs=jobs)
    if cfg.kind == "fingertip_force":
        return run_fingertip_force(cfg)
    if cfg.kind == "step_response":
        return run_step_response(cfg)
    if cfg.kind == "sine_tracking":
        return run_sine_tracking(cfg)
    raise ScenarioError(f"unknown scenario kind {cfg.kind!r}")

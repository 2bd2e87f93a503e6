"""Scenario configuration: YAML documents with units, includes and validation.

A scenario is one structured document. Numeric fields accept explicit units
as string suffixes (90deg, 0.5 rad, 10 mm, 1.5 m, 2 s, 19.6 N) and are
normalized to strict SI at parse time; bare numbers are taken as SI already.
A top-level `include: other.yaml` pulls in shared defaults (resolved
relative to the including file) with the including document winning on
conflicts. Every document carries an explicit schema_version.

Parsing is a fixed point: parse -> serialize -> parse reproduces the same
configuration object.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError

__all__ = [
    "ScenarioKind",
    "JointConfig",
    "TendonConfig",
    "MotorConfig",
    "ControllerConfig",
    "AnomalySettings",
    "DisturbanceConfig",
    "NoiseConfig",
    "StepParams",
    "SineParams",
    "SheathChoice",
    "FingertipParams",
    "SweepSheath",
    "SweepParams",
    "ScenarioConfig",
    "load_config",
    "parse_config_dict",
    "serialize_config",
    "parse_quantity",
    "run_id",
]

SCHEMA_VERSION = 1

KINDS = ("friction_sweep", "fingertip_force", "step_response", "sine_tracking")
ScenarioKind = str

_UNIT_TABLES: dict[str, dict[str, float]] = {
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3},
    "time": {"s": 1.0, "ms": 1e-3},
    "force": {"n": 1.0},
    "frequency": {"hz": 1.0},
    "plain": {"": 1.0},
}

_QUANTITY_RE = re.compile(r"^\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*([a-zA-Z]*)\s*$")


def parse_quantity(value: Any, dimension: str, where: str = "value") -> float:
    """Normalize a config scalar to SI for the given dimension.

    Bare numbers pass through unchanged; strings must carry a unit suffix
    understood by the dimension (or none, meaning SI).
    """
    table = _UNIT_TABLES[dimension]
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _QUANTITY_RE.match(value)
        if not m:
            raise ConfigError(f"{where}: cannot parse quantity {value!r}")
        number, suffix = float(m.group(1)), m.group(2).lower()
        if suffix == "":
            return number
        if suffix not in table:
            allowed = ", ".join(sorted(k for k in table if k))
            raise ConfigError(
                f"{where}: unit {suffix!r} is not a {dimension} unit (allowed: {allowed})"
            )
        return number * table[suffix]
    raise ConfigError(f"{where}: expected a number or quantity string, got {type(value).__name__}")


class _Section:
    """Dict wrapper that tracks key consumption and builds dotted error paths."""

    def __init__(self, data: dict, path: str = "") -> None:
        if not isinstance(data, dict):
            raise ConfigError(f"{path or 'document'}: expected a mapping, got {type(data).__name__}")
        self.data = data
        self.path = path
        self._seen: set[str] = set()

    def _where(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def has(self, key: str) -> bool:
        return key in self.data

    def quantity(self, key: str, dimension: str, default: float | None = None) -> float:
        self._seen.add(key)
        if key not in self.data or self.data[key] is None:
            if default is None:
                raise ConfigError(f"{self._where(key)}: required field is missing")
            return default
        return parse_quantity(self.data[key], dimension, self._where(key))

    def optional_quantity(self, key: str, dimension: str) -> float | None:
        self._seen.add(key)
        if key not in self.data or self.data[key] is None:
            return None
        return parse_quantity(self.data[key], dimension, self._where(key))

    def integer(self, key: str, default: int | None = None) -> int:
        self._seen.add(key)
        if key not in self.data or self.data[key] is None:
            if default is None:
                raise ConfigError(f"{self._where(key)}: required field is missing")
            return default
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{self._where(key)}: expected an integer, got {value!r}")
        return value

    def string(self, key: str, default: str | None = None, choices: tuple[str, ...] | None = None) -> str:
        self._seen.add(key)
        if key not in self.data or self.data[key] is None:
            if default is None:
                raise ConfigError(f"{self._where(key)}: required field is missing")
            value = default
        else:
            value = self.data[key]
        if not isinstance(value, str):
            raise ConfigError(f"{self._where(key)}: expected a string, got {value!r}")
        if choices is not None and value not in choices:
            raise ConfigError(f"{self._where(key)}: {value!r} is not one of {choices}")
        return value

    def quantity_list(self, key: str, dimension: str) -> tuple[float, ...]:
        self._seen.add(key)
        if key not in self.data or self.data[key] is None:
            raise ConfigError(f"{self._where(key)}: required field is missing")
        raw = self.data[key]
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{self._where(key)}: expected a non-empty list")
        return tuple(
            parse_quantity(item, dimension, f"{self._where(key)}[{i}]") for i, item in enumerate(raw)
        )

    def optional_quantity_list(self, key: str, dimension: str) -> tuple[float, ...]:
        self._seen.add(key)
        raw = self.data.get(key)
        if raw is None:
            return ()
        if not isinstance(raw, list):
            raise ConfigError(f"{self._where(key)}: expected a list")
        return tuple(
            parse_quantity(item, dimension, f"{self._where(key)}[{i}]") for i, item in enumerate(raw)
        )

    def section(self, key: str, required: bool = True) -> "_Section | None":
        self._seen.add(key)
        if key not in self.data or self.data[key] is None:
            if required:
                raise ConfigError(f"{self._where(key)}: required section is missing")
            return None
        return _Section(self.data[key], self._where(key))

    def mapping_list(self, key: str) -> list["_Section"]:
        self._seen.add(key)
        if key not in self.data or self.data[key] is None:
            raise ConfigError(f"{self._where(key)}: required field is missing")
        raw = self.data[key]
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{self._where(key)}: expected a non-empty list")
        return [_Section(item, f"{self._where(key)}[{i}]") for i, item in enumerate(raw)]

    def reject_unknown(self) -> None:
        unknown = set(self.data) - self._seen
        if unknown:
            name = sorted(unknown)[0]
            raise ConfigError(f"{self._where(name)}: unknown field")


# --- typed configuration blocks ---


@dataclass(frozen=True)
class JointConfig:
    spool_radius: float = 0.01
    spring_stiffness: float = 0.05
    spring_preload: float = 0.01
    damping: float = 1e-4
    inertia: float = 1e-6
    stiction_torque: float = 0.0
    angle_max: float | None = None  # None: from the hand model


@dataclass(frozen=True)
class TendonConfig:
    tendon_diameter: float = 1e-3
    sheath_inner_diameter: float = 4e-3
    friction_coefficient: float = 0.12
    axial_stiffness: float | None = 5e4
    sheath_length: float = 1.0
    sheath_bend: float = 2.0
    transport_delay: float = 0.0
    creep_compliance: float = 0.0
    creep_time_constant: float = 5.0


@dataclass(frozen=True)
class MotorConfig:
    spool_radius: float = 0.01
    max_speed: float = 6.0


@dataclass(frozen=True)
class AnomalySettings:
    current_spike_threshold: float = 0.5
    encoder_motion_floor: float = 0.01
    window: float = 0.1


@dataclass(frozen=True)
class ControllerConfig:
    kp: float = 8.0
    ki: float = 2.0
    kd: float = 0.05
    integral_clamp: float = 0.02
    output_clamp: float = 6.0
    release_speed_limit: float | None = 3.0  # None: derive from the spring free-return rate
    slack_threshold: float = math.radians(2.0)
    slack_recovery_speed: float = 0.5
    anomaly: AnomalySettings = field(default_factory=AnomalySettings)


@dataclass(frozen=True)
class DisturbanceConfig:
    kind: str = "constant"  # constant | step | sinusoid | piecewise
    phi0: float = 2.0
    delta: float = 0.0
    at_time: float = 0.0
    amplitude: float = 0.0
    frequency: float = 0.2
    times: tuple[float, ...] = ()
    values: tuple[float, ...] = ()


@dataclass(frozen=True)
class NoiseConfig:
    encoder_quantum: float = 0.0  # rad; 0 disables quantization
    tension_noise: float = 0.0  # fractional, uniform multiplicative


@dataclass(frozen=True)
class StepParams:
    time: float = 1.0
    target: float = math.radians(35.0)
    initial_angle: float = math.radians(5.0)


@dataclass(frozen=True)
class SineParams:
    min_angle: float = math.radians(25.0)
    max_angle: float = math.radians(55.0)
    frequency: float = 0.5


@dataclass(frozen=True)
class SheathChoice:
    name: str
    length: float
    bend: float


@dataclass(frozen=True)
class FingertipParams:
    sheaths: tuple[SheathChoice, ...]
    ramp_time: float = 4.0
    hold_time: float = 4.0
    peak_tension: float = 33.6667  # motor-side tension at the end of the ramp, N
    contact_angle: float = 0.0
    contact_lever: float = 0.01


@dataclass(frozen=True)
class SweepSheath:
    name: str
    mu: float


@dataclass(frozen=True)
class SweepParams:
    sheaths: tuple[SweepSheath, ...]
    angles: tuple[float, ...]
    diameters: tuple[float, ...]
    load: float = 19.6133  # 2 kg at standard gravity
    noise: float = 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    duration: float
    dt: float
    seed: int = 0
    mode: str = "dynamic"  # dynamic | quasi_static
    joint_index: int = 6  # index-finger MCP F-E in the canonical ordering
    joint: JointConfig = field(default_factory=JointConfig)
    tendon: TendonConfig = field(default_factory=TendonConfig)
    motor: MotorConfig = field(default_factory=MotorConfig)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    disturbance: DisturbanceConfig = field(default_factory=DisturbanceConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    step: StepParams | None = None
    sine: SineParams | None = None
    fingertip: FingertipParams | None = None
    sweep: SweepParams | None = None

    def to_dict(self) -> dict:
        """Canonical SI dictionary form; the serialization target."""
        doc: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "duration": self.duration,
            "dt": self.dt,
            "seed": self.seed,
            "mode": self.mode,
            "joint_index": self.joint_index,
            "plant": {
                "joint": {
                    "spool_radius": self.joint.spool_radius,
                    "spring_stiffness": self.joint.spring_stiffness,
                    "spring_preload": self.joint.spring_preload,
                    "damping": self.joint.damping,
                    "inertia": self.joint.inertia,
                    "stiction_torque": self.joint.stiction_torque,
                    "angle_max": self.joint.angle_max,
                },
                "tendon": {
                    "tendon_diameter": self.tendon.tendon_diameter,
                    "sheath_inner_diameter": self.tendon.sheath_inner_diameter,
                    "friction_coefficient": self.tendon.friction_coefficient,
                    "axial_stiffness": self.tendon.axial_stiffness,
                    "sheath_length": self.tendon.sheath_length,
                    "sheath_bend": self.tendon.sheath_bend,
                    "transport_delay": self.tendon.transport_delay,
                    "creep_compliance": self.tendon.creep_compliance,
                    "creep_time_constant": self.tendon.creep_time_constant,
                },
                "motor": {
                    "spool_radius": self.motor.spool_radius,
                    "max_speed": self.motor.max_speed,
                },
            },
            "controller": {
                "kp": self.controller.kp,
                "ki": self.controller.ki,
                "kd": self.controller.kd,
                "integral_clamp": self.controller.integral_clamp,
                "output_clamp": self.controller.output_clamp,
                "release_speed_limit": self.controller.release_speed_limit,
                "slack_threshold": self.controller.slack_threshold,
                "slack_recovery_speed": self.controller.slack_recovery_speed,
                "anomaly": {
                    "current_spike_threshold": self.controller.anomaly.current_spike_threshold,
                    "encoder_motion_floor": self.controller.anomaly.encoder_motion_floor,
                    "window": self.controller.anomaly.window,
                },
            },
            "disturbance": {
                "kind": self.disturbance.kind,
                "phi0": self.disturbance.phi0,
                "delta": self.disturbance.delta,
                "at_time": self.disturbance.at_time,
                "amplitude": self.disturbance.amplitude,
                "frequency": self.disturbance.frequency,
                "times": list(self.disturbance.times),
                "values": list(self.disturbance.values),
            },
            "noise": {
                "encoder_quantum": self.noise.encoder_quantum,
                "tension_noise": self.noise.tension_noise,
            },
        }
        if self.step is not None:
            doc["step"] = {
                "time": self.step.time,
                "target": self.step.target,
                "initial_angle": self.step.initial_angle,
            }
        if self.sine is not None:
            doc["sine"] = {
                "min_angle": self.sine.min_angle,
                "max_angle": self.sine.max_angle,
                "frequency": self.sine.frequency,
            }
        if self.fingertip is not None:
            doc["fingertip"] = {
                "sheaths": [
                    {"name": s.name, "length": s.length, "bend": s.bend}
                    for s in self.fingertip.sheaths
                ],
                "ramp_time": self.fingertip.ramp_time,
                "hold_time": self.fingertip.hold_time,
                "peak_tension": self.fingertip.peak_tension,
                "contact_angle": self.fingertip.contact_angle,
                "contact_lever": self.fingertip.contact_lever,
            }
        if self.sweep is not None:
            doc["sweep"] = {
                "sheaths": [{"name": s.name, "mu": s.mu} for s in self.sweep.sheaths],
                "angles": list(self.sweep.angles),
                "diameters": list(self.sweep.diameters),
                "load": self.sweep.load,
                "noise": self.sweep.noise,
            }
        return doc


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if key in out and isinstance(out[key], dict) and isinstance(value, dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def _load_yaml_with_includes(path: Path, depth: int = 0) -> dict:
    if depth > 10:
        raise ConfigError(f"{path}: include chain too deep")
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    include = doc.pop("include", None)
    if include is not None:
        if not isinstance(include, str):
            raise ConfigError(f"{path}: include must be a path string")
        base = _load_yaml_with_includes((path.parent / include).resolve(), depth + 1)
        doc = _deep_merge(base, doc)
    return doc


def _parse_joint(sec: _Section | None) -> JointConfig:
    if sec is None:
        return JointConfig()
    d = JointConfig()
    cfg = JointConfig(
        spool_radius=sec.quantity("spool_radius", "length", d.spool_radius),
        spring_stiffness=sec.quantity("spring_stiffness", "plain", d.spring_stiffness),
        spring_preload=sec.quantity("spring_preload", "plain", d.spring_preload),
        damping=sec.quantity("damping", "plain", d.damping),
        inertia=sec.quantity("inertia", "plain", d.inertia),
        stiction_torque=sec.quantity("stiction_torque", "plain", d.stiction_torque),
        angle_max=sec.optional_quantity("angle_max", "angle"),
    )
    sec.reject_unknown()
    if cfg.spool_radius <= 0.0:
        raise ConfigError(f"{sec.path}.spool_radius: must be > 0")
    if cfg.spring_stiffness <= 0.0:
        raise ConfigError(f"{sec.path}.spring_stiffness: must be > 0")
    if cfg.damping < 0.0 or cfg.inertia <= 0.0 or cfg.stiction_torque < 0.0:
        raise ConfigError(f"{sec.path}: damping/stiction must be >= 0 and inertia > 0")
    return cfg


def _parse_tendon(sec: _Section | None) -> TendonConfig:
    if sec is None:
        return TendonConfig()
    d = TendonConfig()
    cfg = TendonConfig(
        tendon_diameter=sec.quantity("tendon_diameter", "length", d.tendon_diameter),
        sheath_inner_diameter=sec.quantity("sheath_inner_diameter", "length", d.sheath_inner_diameter),
        friction_coefficient=sec.quantity("friction_coefficient", "plain", d.friction_coefficient),
        axial_stiffness=(
            sec.optional_quantity("axial_stiffness", "plain")
            if sec.has("axial_stiffness")
            else d.axial_stiffness
        ),
        sheath_length=sec.quantity("sheath_length", "length", d.sheath_length),
        sheath_bend=sec.quantity("sheath_bend", "angle", d.sheath_bend),
        transport_delay=sec.quantity("transport_delay", "time", d.transport_delay),
        creep_compliance=sec.quantity("creep_compliance", "plain", d.creep_compliance),
        creep_time_constant=sec.quantity("creep_time_constant", "time", d.creep_time_constant),
    )
    sec.reject_unknown()
    if not 0.0 < cfg.tendon_diameter < cfg.sheath_inner_diameter:
        raise ConfigError(f"{sec.path}: need 0 < tendon_diameter < sheath_inner_diameter")
    if cfg.friction_coefficient < 0.0:
        raise ConfigError(f"{sec.path}.friction_coefficient: must be >= 0")
    if cfg.axial_stiffness is not None and cfg.axial_stiffness <= 0.0:
        raise ConfigError(f"{sec.path}.axial_stiffness: must be > 0 or null")
    if cfg.sheath_length <= 0.0 or cfg.sheath_bend < 0.0:
        raise ConfigError(f"{sec.path}: sheath_length must be > 0 and sheath_bend >= 0")
    if cfg.transport_delay < 0.0:
        raise ConfigError(f"{sec.path}.transport_delay: must be >= 0")
    return cfg


def _parse_motor(sec: _Section | None) -> MotorConfig:
    if sec is None:
        return MotorConfig()
    d = MotorConfig()
    cfg = MotorConfig(
        spool_radius=sec.quantity("spool_radius", "length", d.spool_radius),
        max_speed=sec.quantity("max_speed", "plain", d.max_speed),
    )
    sec.reject_unknown()
    if cfg.spool_radius <= 0.0 or cfg.max_speed <= 0.0:
        raise ConfigError(f"{sec.path}: spool_radius and max_speed must be > 0")
    return cfg


def _parse_controller(sec: _Section | None) -> ControllerConfig:
    if sec is None:
        return ControllerConfig()
    d = ControllerConfig()
    anomaly_sec = sec.section("anomaly", required=False)
    if anomaly_sec is None:
        anomaly = AnomalySettings()
    else:
        da = AnomalySettings()
        anomaly = AnomalySettings(
            current_spike_threshold=anomaly_sec.quantity(
                "current_spike_threshold", "plain", da.current_spike_threshold
            ),
            encoder_motion_floor=anomaly_sec.quantity(
                "encoder_motion_floor", "plain", da.encoder_motion_floor
            ),
            window=anomaly_sec.quantity("window", "time", da.window),
        )
        anomaly_sec.reject_unknown()
        if not (
            anomaly.current_spike_threshold > 0.0
            and anomaly.encoder_motion_floor > 0.0
            and anomaly.window > 0.0
        ):
            raise ConfigError(f"{anomaly_sec.path}: all anomaly thresholds must be > 0")
    release = (
        sec.optional_quantity("release_speed_limit", "plain")
        if sec.has("release_speed_limit")
        else d.release_speed_limit
    )
    cfg = ControllerConfig(
        kp=sec.quantity("kp", "plain", d.kp),
        ki=sec.quantity("ki", "plain", d.ki),
        kd=sec.quantity("kd", "plain", d.kd),
        integral_clamp=sec.quantity("integral_clamp", "plain", d.integral_clamp),
        output_clamp=sec.quantity("output_clamp", "plain", d.output_clamp),
        release_speed_limit=release,
        slack_threshold=sec.quantity("slack_threshold", "angle", d.slack_threshold),
        slack_recovery_speed=sec.quantity("slack_recovery_speed", "plain", d.slack_recovery_speed),
        anomaly=anomaly,
    )
    sec.reject_unknown()
    if cfg.kp < 0.0 or cfg.ki < 0.0 or cfg.kd < 0.0:
        raise ConfigError(f"{sec.path}: gains must be >= 0")
    if cfg.integral_clamp <= 0.0 or cfg.output_clamp <= 0.0:
        raise ConfigError(f"{sec.path}: clamps must be > 0")
    if cfg.release_speed_limit is not None and cfg.release_speed_limit <= 0.0:
        raise ConfigError(f"{sec.path}.release_speed_limit: must be > 0 or null")
    return cfg


def _parse_disturbance(sec: _Section | None) -> DisturbanceConfig:
    if sec is None:
        return DisturbanceConfig()
    d = DisturbanceConfig()
    kind = sec.string("kind", d.kind, choices=("constant", "step", "sinusoid", "piecewise"))
    times = sec.optional_quantity_list("times", "time")
    values = sec.optional_quantity_list("values", "angle")
    if kind == "piecewise":
        if len(times) < 2 or len(times) != len(values):
            raise ConfigError(f"{sec.path}: piecewise needs matching times/values, at least 2 points")
    cfg = DisturbanceConfig(
        kind=kind,
        phi0=sec.quantity("phi0", "angle", d.phi0),
        delta=sec.quantity("delta", "angle", d.delta),
        at_time=sec.quantity("at_time", "time", d.at_time),
        amplitude=sec.quantity("amplitude", "angle", d.amplitude),
        frequency=sec.quantity("frequency", "frequency", d.frequency),
        times=times,
        values=values,
    )
    sec.reject_unknown()
    if cfg.phi0 < 0.0:
        raise ConfigError(f"{sec.path}.phi0: must be >= 0")
    if kind == "sinusoid" and cfg.phi0 - abs(cfg.amplitude) < 0.0:
        raise ConfigError(f"{sec.path}: sinusoid would drive the bend negative")
    if kind == "step" and cfg.phi0 + cfg.delta < 0.0:
        raise ConfigError(f"{sec.path}: step would drive the bend negative")
    return cfg


def _parse_noise(sec: _Section | None) -> NoiseConfig:
    if sec is None:
        return NoiseConfig()
    d = NoiseConfig()
    cfg = NoiseConfig(
        encoder_quantum=sec.quantity("encoder_quantum", "angle", d.encoder_quantum),
        tension_noise=sec.quantity("tension_noise", "plain", d.tension_noise),
    )
    sec.reject_unknown()
    if cfg.encoder_quantum < 0.0 or not 0.0 <= cfg.tension_noise < 1.0:
        raise ConfigError(f"{sec.path}: encoder_quantum >= 0 and 0 <= tension_noise < 1 required")
    return cfg


def parse_config_dict(doc: dict, where: str = "config") -> ScenarioConfig:
    """Validate a merged document dictionary into a ScenarioConfig."""
    root = _Section(doc, "")
    version = root.integer("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: expected {SCHEMA_VERSION}, got {version}")
    kind = root.string("kind", choices=KINDS)
    duration = root.quantity("duration", "time")
    dt = root.quantity("dt", "time")
    seed = root.integer("seed", 0)
    mode = root.string("mode", "dynamic", choices=("dynamic", "quasi_static"))
    joint_index = root.integer("joint_index", 6)
    if duration <= 0.0:
        raise ConfigError("duration: must be > 0")
    if dt <= 0.0:
        raise ConfigError("dt: must be > 0")
    if dt > duration:
        raise ConfigError("dt: must be <= duration")
    if not 0 <= joint_index < 21:
        raise ConfigError("joint_index: must be in [0, 20]")

    plant_sec = root.section("plant", required=False)
    if plant_sec is not None:
        joint = _parse_joint(plant_sec.section("joint", required=False))
        tendon = _parse_tendon(plant_sec.section("tendon", required=False))
        motor = _parse_motor(plant_sec.section("motor", required=False))
        plant_sec.reject_unknown()
    else:
        joint, tendon, motor = JointConfig(), TendonConfig(), MotorConfig()
    controller = _parse_controller(root.section("controller", required=False))
    disturbance = _parse_disturbance(root.section("disturbance", required=False))
    noise = _parse_noise(root.section("noise", required=False))

    step = sine = fingertip = sweep = None
    if kind == "step_response":
        sec = root.section("step", required=False)
        if sec is None:
            step = StepParams()
        else:
            d = StepParams()
            step = StepParams(
                time=sec.quantity("time", "time", d.time),
                target=sec.quantity("target", "angle", d.target),
                initial_angle=sec.quantity("initial_angle", "angle", d.initial_angle),
            )
            sec.reject_unknown()
        if step.time >= duration:
            raise ConfigError("step.time: must fall inside the duration")
    elif kind == "sine_tracking":
        sec = root.section("sine", required=False)
        if sec is None:
            sine = SineParams()
        else:
            d = SineParams()
            sine = SineParams(
                min_angle=sec.quantity("min_angle", "angle", d.min_angle),
                max_angle=sec.quantity("max_angle", "angle", d.max_angle),
                frequency=sec.quantity("frequency", "frequency", d.frequency),
            )
            sec.reject_unknown()
        if not sine.min_angle < sine.max_angle:
            raise ConfigError("sine.min_angle: must be below sine.max_angle")
        if sine.frequency <= 0.0:
            raise ConfigError("sine.frequency: must be > 0")
    elif kind == "fingertip_force":
        sec = root.section("fingertip")
        sheaths = []
        for item in sec.mapping_list("sheaths"):
            sheaths.append(
                SheathChoice(
                    name=item.string("name"),
                    length=item.quantity("length", "length"),
                    bend=item.quantity("bend", "angle"),
                )
            )
            item.reject_unknown()
        d = FingertipParams(sheaths=())
        fingertip = FingertipParams(
            sheaths=tuple(sheaths),
            ramp_time=sec.quantity("ramp_time", "time", d.ramp_time),
            hold_time=sec.quantity("hold_time", "time", d.hold_time),
            peak_tension=sec.quantity("peak_tension", "force", d.peak_tension),
            contact_angle=sec.quantity("contact_angle", "angle", d.contact_angle),
            contact_lever=sec.quantity("contact_lever", "length", d.contact_lever),
        )
        sec.reject_unknown()
        if fingertip.ramp_time + fingertip.hold_time > duration + 1e-12:
            raise ConfigError("fingertip.ramp_time: ramp plus hold must fit the duration")
        if fingertip.contact_lever <= 0.0:
            raise ConfigError("fingertip.contact_lever: must be > 0")
        if fingertip.peak_tension <= 0.0:
            raise ConfigError("fingertip.peak_tension: must be > 0")
    elif kind == "friction_sweep":
        sec = root.section("sweep")
        sheaths = []
        for item in sec.mapping_list("sheaths"):
            entry = SweepSheath(name=item.string("name"), mu=item.quantity("mu", "plain"))
            item.reject_unknown()
            if entry.mu < 0.0:
                raise ConfigError(f"{item.path}.mu: must be >= 0")
            sheaths.append(entry)
        d = SweepParams(sheaths=(), angles=(), diameters=())
        sweep = SweepParams(
            sheaths=tuple(sheaths),
            angles=sec.quantity_list("angles", "angle"),
            diameters=sec.quantity_list("diameters", "length"),
            load=sec.quantity("load", "force", d.load),
            noise=sec.quantity("noise", "plain", d.noise),
        )
        sec.reject_unknown()
        if any(a < 0.0 for a in sweep.angles):
            raise ConfigError("sweep.angles: must be >= 0")
        if sweep.load <= 0.0:
            raise ConfigError("sweep.load: must be > 0")
        if not 0.0 <= sweep.noise < 1.0:
            raise ConfigError("sweep.noise: must be in [0, 1)")

    root.reject_unknown()
    return ScenarioConfig(
        kind=kind,
        duration=duration,
        dt=dt,
        seed=seed,
        mode=mode,
        joint_index=joint_index,
        joint=joint,
        tendon=tendon,
        motor=motor,
        controller=controller,
        disturbance=disturbance,
        noise=noise,
        step=step,
        sine=sine,
        fingertip=fingertip,
        sweep=sweep,
    )


def load_config(path: str | Path) -> ScenarioConfig:
    """Load, merge includes, and validate a scenario configuration file."""
    doc = _load_yaml_with_includes(Path(path).resolve())
    return parse_config_dict(doc)


def serialize_config(cfg: ScenarioConfig) -> str:
    """Canonical SI YAML form; parse(serialize(parse(x))) == parse(x)."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True, default_flow_style=False)


def run_id(cfg: ScenarioConfig, seed: int | None = None) -> str:
    """Deterministic run identifier: hash of the canonical config bytes and seed."""
    effective = cfg.seed if seed is None else seed
    digest = hashlib.sha256()
    digest.update(serialize_config(cfg).encode())
    digest.update(str(effective).encode())
    return digest.hexdigest()[:16]

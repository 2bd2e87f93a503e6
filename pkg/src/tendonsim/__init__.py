"""tendonsim: simulator and analysis toolkit for remote tendon-sheath actuation.

Models tendon path-length variation under arm motion, capstan friction loss,
spring-return joint dynamics and closed-loop joint control, and runs
declarative experiment scenarios over the simulated plant.
"""

__version__ = "0.1.0"

from .transmission import (
    DriveDirection,
    SheathPath,
    SheathSegment,
    TendonSpec,
    accumulated_bend,
    friction_loss,
    induced_joint_offset,
    tendon_path_length,
    tension_transfer,
)
from .hand import HandModel, clamp_command, default_hand
from .plant import (
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
from .control import (
    AnomalyConfig,
    AnomalyDetector,
    JointController,
    PidController,
    PidGains,
    pretension_init,
)
from .estimation import FitResult, FrictionSample, fit_mu, fit_transmission_gain, summarize_sweep
from .config import ScenarioConfig, load_config, serialize_config
from .scenarios import RunRecord, run_scenario

__all__ = [
    "__version__",
    "DriveDirection",
    "SheathPath",
    "SheathSegment",
    "TendonSpec",
    "accumulated_bend",
    "friction_loss",
    "induced_joint_offset",
    "tendon_path_length",
    "tension_transfer",
    "HandModel",
    "clamp_command",
    "default_hand",
    "AntagonisticJoint",
    "AntagonisticPlant",
    "ArmDisturbance",
    "MotorState",
    "SingleJointPlant",
    "SpringReturnJoint",
    "TendonChannel",
    "fingertip_force",
    "joint_equilibrium_tension",
    "AnomalyConfig",
    "AnomalyDetector",
    "JointController",
    "PidController",
    "PidGains",
    "pretension_init",
    "FitResult",
    "FrictionSample",
    "fit_mu",
    "fit_transmission_gain",
    "summarize_sweep",
    "ScenarioConfig",
    "load_config",
    "serialize_config",
    "RunRecord",
    "run_scenario",
]

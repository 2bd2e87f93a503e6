"""21-joint hand description: joint inventory, motion ranges, actuation types.

The hand has five fingers. The thumb carries five joints (basal rotation,
two carpometacarpal axes, one metacarpophalangeal flexion, one
interphalangeal flexion); each long finger carries four (MCP
abduction-adduction, MCP/PIP/DIP flexion). Every joint is driven by a
single pulling tendon and returned by a spring, except the thumb basal
rotation which uses an antagonistic tendon pair.

Canonical joint ordering for command vectors: thumb joints first
(CMC1 rotation, CMC2 A-A, CMC3 F-E, MCP F-E, IP F-E), then index, middle,
ring, little, each as (MCP A-A, MCP F-E, PIP F-E, DIP F-E).

Joint zero is fully extended / neutral abduction; ranges are [0, max].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, NonFiniteCommand

__all__ = [
    "Finger",
    "JointName",
    "Actuation",
    "JointDescriptor",
    "HandModel",
    "default_hand",
    "clamp_command",
    "JOINT_COUNT",
]

JOINT_COUNT = 21


class Finger(Enum):
    THUMB = "thumb"
    INDEX = "index"
    MIDDLE = "middle"
    RING = "ring"
    LITTLE = "little"


class JointName(Enum):
    CMC1_ROTATION = "CMC1 rotation"
    CMC2_AA = "CMC2 A-A"
    CMC3_FE = "CMC3 F-E"
    MCP_AA = "MCP A-A"
    MCP_FE = "MCP F-E"
    PIP_FE = "PIP F-E"
    DIP_FE = "DIP F-E"
    IP_FE = "IP F-E"


class Actuation(Enum):
    SPRING_RETURN = "spring_return"
    ANTAGONISTIC = "antagonistic"


@dataclass(frozen=True)
class JointDescriptor:
    finger: Finger
    joint_name: JointName
    max_angle: float  # radians, range is [0, max_angle]
    actuation: Actuation

    def __post_init__(self) -> None:
        if not self.max_angle > 0.0:
            raise ValueError(f"max angle must be > 0, got {self.max_angle}")
        if self.actuation is Actuation.ANTAGONISTIC and not (
            self.finger is Finger.THUMB and self.joint_name is JointName.CMC1_ROTATION
        ):
            raise ValueError("antagonistic actuation is reserved for the thumb CMC1 rotation")

    @property
    def max_angle_deg(self) -> float:
        return math.degrees(self.max_angle)

    @property
    def key(self) -> str:
        return f"{self.finger.value}.{self.joint_name.name}"


# Range of motion in degrees per (finger, joint); absent pairs do not exist.
_RANGES_DEG: dict[tuple[Finger, JointName], float] = {
    (Finger.THUMB, JointName.CMC1_ROTATION): 90.0,
    (Finger.THUMB, JointName.CMC2_AA): 90.0,
    (Finger.THUMB, JointName.CMC3_FE): 90.0,
    (Finger.THUMB, JointName.MCP_FE): 85.0,
    (Finger.THUMB, JointName.IP_FE): 90.0,
    (Finger.INDEX, JointName.MCP_AA): 80.0,
    (Finger.INDEX, JointName.MCP_FE): 90.0,
    (Finger.INDEX, JointName.PIP_FE): 85.0,
    (Finger.INDEX, JointName.DIP_FE): 90.0,
    (Finger.MIDDLE, JointName.MCP_AA): 100.0,
    (Finger.MIDDLE, JointName.MCP_FE): 90.0,
    (Finger.MIDDLE, JointName.PIP_FE): 85.0,
    (Finger.MIDDLE, JointName.DIP_FE): 90.0,
    (Finger.RING, JointName.MCP_AA): 95.0,
    (Finger.RING, JointName.MCP_FE): 90.0,
    (Finger.RING, JointName.PIP_FE): 85.0,
    (Finger.RING, JointName.DIP_FE): 90.0,
    (Finger.LITTLE, JointName.MCP_AA): 85.0,
    (Finger.LITTLE, JointName.MCP_FE): 90.0,
    (Finger.LITTLE, JointName.PIP_FE): 85.0,
    (Finger.LITTLE, JointName.DIP_FE): 90.0,
}

_THUMB_ORDER = (
    JointName.CMC1_ROTATION,
    JointName.CMC2_AA,
    JointName.CMC3_FE,
    JointName.MCP_FE,
    JointName.IP_FE,
)
_LONG_FINGER_ORDER = (JointName.MCP_AA, JointName.MCP_FE, JointName.PIP_FE, JointName.DIP_FE)


def canonical_order() -> tuple[tuple[Finger, JointName], ...]:
    """The documented command-vector ordering of the 21 joints."""
    order: list[tuple[Finger, JointName]] = [(Finger.THUMB, j) for j in _THUMB_ORDER]
    for finger in (Finger.INDEX, Finger.MIDDLE, Finger.RING, Finger.LITTLE):
        order.extend((finger, j) for j in _LONG_FINGER_ORDER)
    return tuple(order)


@dataclass(frozen=True)
class HandModel:
    """Immutable hand description; freely shareable between threads."""

    joints: tuple[JointDescriptor, ...]
    tendon_map: tuple[tuple[str, tuple[str, ...]], ...]  # joint key -> channel names

    def __post_init__(self) -> None:
        if len(self.joints) != JOINT_COUNT:
            raise ValueError(f"expected {JOINT_COUNT} joints, got {len(self.joints)}")
        per_finger: dict[Finger, int] = {}
        for j in self.joints:
            per_finger[j.finger] = per_finger.get(j.finger, 0) + 1
        expected = {Finger.THUMB: 5, Finger.INDEX: 4, Finger.MIDDLE: 4, Finger.RING: 4, Finger.LITTLE: 4}
        if per_finger != expected:
            raise ValueError(f"per-finger joint counts wrong: {per_finger}")
        mapping = dict(self.tendon_map)
        for j in self.joints:
            channels = mapping.get(j.key, ())
            want = 2 if j.actuation is Actuation.ANTAGONISTIC else 1
            if len(channels) != want:
                raise ValueError(f"{j.key}: expected {want} tendon channel(s), got {len(channels)}")

    def joint(self, index: int) -> JointDescriptor:
        return self.joints[index]

    def index_of(self, finger: Finger, joint_name: JointName) -> int:
        for i, j in enumerate(self.joints):
            if j.finger is finger and j.joint_name is joint_name:
                return i
        raise KeyError(f"no joint {joint_name} on {finger}")

    def max_angles(self) -> np.ndarray:
        return np.array([j.max_angle for j in self.joints])

    def to_dict(self) -> dict:
        return {
            "joints": [
                {
                    "finger": j.finger.value,
                    "joint": j.joint_name.name,
                    "max_angle_deg": j.max_angle_deg,
                    "actuation": j.actuation.value,
                }
                for j in self.joints
            ],
            "tendon_map": {key: list(chs) for key, chs in self.tendon_map},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HandModel":
        joints = tuple(
            JointDescriptor(
                finger=Finger(item["finger"]),
                joint_name=JointName[item["joint"]],
                max_angle=math.radians(item["max_angle_deg"]),
                actuation=Actuation(item["actuation"]),
            )
            for item in data["joints"]
        )
        tendon_map = tuple((key, tuple(chs)) for key, chs in data["tendon_map"].items())
        return cls(joints, tendon_map)


def default_hand() -> HandModel:
    """Hand with the stock 21-joint inventory and one tendon channel per joint."""
    joints = []
    tendon_map = []
    for finger, joint_name in canonical_order():
        deg = _RANGES_DEG[(finger, joint_name)]
        actuation = (
            Actuation.ANTAGONISTIC
            if (finger, joint_name) == (Finger.THUMB, JointName.CMC1_ROTATION)
            else Actuation.SPRING_RETURN
        )
        desc = JointDescriptor(finger, joint_name, math.radians(deg), actuation)
        joints.append(desc)
        if actuation is Actuation.ANTAGONISTIC:
            tendon_map.append((desc.key, (f"{desc.key}.agonist", f"{desc.key}.antagonist")))
        else:
            tendon_map.append((desc.key, (f"{desc.key}.tendon",)))
    return HandModel(tuple(joints), tuple(tendon_map))


def clamp_command(hand: HandModel, q_ref: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    """Clamp a 21-entry command vector to each joint's [0, max] range.

    Returns the clamped vector and the indices that were clamped. Raises
    DimensionMismatch for a wrong-length vector and NonFiniteCommand for
    NaN or infinite entries.
    """
    q = np.asarray(q_ref, dtype=float)
    if q.shape != (JOINT_COUNT,):
        raise DimensionMismatch(f"expected command of shape ({JOINT_COUNT},), got {q.shape}")
    if not np.all(np.isfinite(q)):
        bad = int(np.flatnonzero(~np.isfinite(q))[0])
        raise NonFiniteCommand(f"command entry {bad} is not finite: {q[bad]}")
    upper = hand.max_angles()
    clamped = np.clip(q, 0.0, upper)
    changed = tuple(int(i) for i in np.flatnonzero(clamped != q))
    return clamped, changed

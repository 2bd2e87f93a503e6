"""Closed-form geometry and friction of a tendon sliding inside a curved sheath.

A sheath is described by piecewise-constant curvature along its arc length.
The one geometric quantity that matters downstream is the accumulated bend,
the integral of curvature over length. Two effects follow from it:

* the tendon hugs the inner wall on the bending side, so its path through a
  bent sheath is shorter than the sheath centerline by the wall offset times
  the accumulated bend;
* sliding friction compounds exponentially with the total wrapped angle, as
  on a capstan, independent of the bend radius.

All functions here are pure and operate on immutable inputs; they are safe
to call concurrently without coordination. Units are strict SI: meters,
radians, newtons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable

from .errors import NonPositiveLength, OffsetCurveViolation

__all__ = [
    "SheathSegment",
    "SheathPath",
    "TendonSpec",
    "DriveDirection",
    "accumulated_bend",
    "tendon_path_length",
    "induced_joint_offset",
    "tension_transfer",
    "friction_loss",
]


@dataclass(frozen=True)
class SheathSegment:
    """One stretch of sheath with constant unsigned curvature.

    length is the arc length in meters; curvature is |kappa| in 1/m,
    zero for a straight run.
    """

    length: float
    curvature: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.length) and self.length > 0.0):
            raise ValueError(f"segment length must be finite and > 0, got {self.length}")
        if not (math.isfinite(self.curvature) and self.curvature >= 0.0):
            raise ValueError(f"segment curvature must be finite and >= 0, got {self.curvature}")

    @property
    def bend(self) -> float:
        """Bend contributed by this segment: curvature * length, radians."""
        return self.curvature * self.length


@dataclass(frozen=True)
class SheathPath:
    """Ordered sequence of constant-curvature segments describing one sheath."""

    segments: tuple[SheathSegment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("a sheath path needs at least one segment")
        object.__setattr__(self, "segments", tuple(self.segments))

    @classmethod
    def straight(cls, length: float) -> "SheathPath":
        return cls((SheathSegment(length, 0.0),))

    @classmethod
    def uniform_bend(cls, length: float, bend: float) -> "SheathPath":
        """Single segment of given length whose total bend is `bend` radians."""
        if bend < 0.0:
            raise ValueError(f"bend must be >= 0, got {bend}")
        return cls((SheathSegment(length, bend / length),))

    @classmethod
    def from_curvature(
        cls, kappa: Callable[[float], float], total_length: float, n_segments: int
    ) -> "SheathPath":
        """Discretize an arbitrary curvature profile kappa(s), s in [0, total_length].

        Each of the n_segments equal slices takes the curvature sampled at its
        midpoint; the caller chooses the resolution.
        """
        if n_segments < 1:
            raise ValueError("n_segments must be >= 1")
        ds = total_length / n_segments
        segs = tuple(SheathSegment(ds, float(kappa((i + 0.5) * ds))) for i in range(n_segments))
        return cls(segs)

    @property
    def total_length(self) -> float:
        return sum(s.length for s in self.segments)

    @property
    def accumulated_bend(self) -> float:
        return sum(s.bend for s in self.segments)


@dataclass(frozen=True)
class TendonSpec:
    """Physical parameters of a tendon paired with its sheath.

    axial_stiffness is the tension per unit strain (EA, newtons); None means
    the tendon is treated as inextensible.
    """

    tendon_diameter: float
    sheath_inner_diameter: float
    friction_coefficient: float
    axial_stiffness: float | None = None

    def __post_init__(self) -> None:
        d, big_d = self.tendon_diameter, self.sheath_inner_diameter
        if not (0.0 < d < big_d):
            raise ValueError(f"need 0 < tendon diameter < sheath inner diameter, got d={d}, D={big_d}")
        if not (math.isfinite(self.friction_coefficient) and self.friction_coefficient >= 0.0):
            raise ValueError(f"friction coefficient must be >= 0, got {self.friction_coefficient}")
        if self.axial_stiffness is not None and not self.axial_stiffness > 0.0:
            raise ValueError(f"axial stiffness must be > 0 when given, got {self.axial_stiffness}")

    @property
    def offset(self) -> float:
        """Tendon centerline offset from the sheath centerline: (D - d) / 2."""
        return 0.5 * (self.sheath_inner_diameter - self.tendon_diameter)


class DriveDirection(Enum):
    """Which end is dragging the tendon through the sheath.

    The dragged-from end always carries the higher tension. MOTOR_PULLING:
    the hub winds tendon in, flexing the joint. SPRING_RETURNING: the joint
    spring pays tendon back toward the hub during release.
    """

    MOTOR_PULLING = "motor_pulling"
    SPRING_RETURNING = "spring_returning"


def accumulated_bend(path: SheathPath) -> float:
    """Total bending angle of the path in radians, sum of curvature * length.

    Exact for piecewise-constant curvature.
    """
    return path.accumulated_bend


def tendon_path_length(path: SheathPath, spec: TendonSpec) -> float:
    """Length of tendon inside the sheath: total length minus offset * bend.

    Raises OffsetCurveViolation if any curved segment is so tight that the
    inner offset curve does not exist (bend radius <= offset), and
    NonPositiveLength if the result would be <= 0.
    """
    e = spec.offset
    for i, seg in enumerate(path.segments):
        if seg.curvature > 0.0 and 1.0 / seg.curvature <= e:
            raise OffsetCurveViolation(
                f"segment {i}: bend radius {1.0 / seg.curvature:.6g} m does not exceed "
                f"tendon offset {e:.6g} m"
            )
    length = path.total_length - e * path.accumulated_bend
    if length <= 0.0:
        raise NonPositiveLength(f"tendon path length {length:.6g} m is not positive")
    return length


def induced_joint_offset(delta_phi: float, spec: TendonSpec, transmission_radius: float) -> float:
    """Joint angle drift caused by a bend change with the motor held fixed.

    Returns -offset / radius * delta_phi: more bending shortens the tendon
    path, freeing length, so the joint appears to extend (negative).
    """
    if not transmission_radius > 0.0:
        raise ValueError(f"transmission radius must be > 0, got {transmission_radius}")
    return -(spec.offset / transmission_radius) * delta_phi


def tension_transfer(t_drive: float, phi: float, mu: float, direction: DriveDirection) -> float:
    """Tension delivered at the far end of the sheath, given the driving-end tension.

    Capstan attenuation: delivered = t_drive * exp(-mu * phi) regardless of
    direction; the direction argument states which end is driving so call
    sites read unambiguously. MOTOR_PULLING: t_drive is the hub-side tension,
    the result reaches the joint. SPRING_RETURNING: t_drive is the joint-side
    spring tension, the result is what arrives back at the hub (the hub must
    resist correspondingly more to hold the line taut).
    """
    if not isinstance(direction, DriveDirection):
        raise TypeError(f"direction must be a DriveDirection, got {direction!r}")
    if t_drive < 0.0:
        raise ValueError(f"driving tension must be >= 0, got {t_drive}")
    if phi < 0.0 or mu < 0.0:
        raise ValueError(f"phi and mu must be >= 0, got phi={phi}, mu={mu}")
    return t_drive * math.exp(-mu * phi)


def friction_loss(t_low: float, phi: float, mu: float) -> float:
    """Tension difference across the sheath when the low-tension end holds t_low.

    Equals t_low * (exp(mu * phi) - 1); zero for a straight or frictionless run.
    """
    if t_low < 0.0:
        raise ValueError(f"tension must be >= 0, got {t_low}")
    if phi < 0.0 or mu < 0.0:
        raise ValueError(f"phi and mu must be >= 0, got phi={phi}, mu={mu}")
    return t_low * math.expm1(mu * phi)


def _segments_from_any(segments: Iterable[SheathSegment | tuple[float, float]]) -> tuple[SheathSegment, ...]:
    """Coerce (length, curvature) tuples into SheathSegment instances."""
    out = []
    for seg in segments:
        if isinstance(seg, SheathSegment):
            out.append(seg)
        else:
            length, curvature = seg
            out.append(SheathSegment(length, curvature))
    return tuple(out)


def make_path(segments: Iterable[SheathSegment | tuple[float, float]]) -> SheathPath:
    """Build a path from segments or raw (length, curvature) pairs."""
    return SheathPath(_segments_from_any(segments))

"""Parameter fitting from measured or simulated transmission data.

The friction coefficient is recovered from capstan-style measurements:
a tendon pulled over disks at known wrap angles against a known load.
Since the tension ratio grows as exp(mu * angle), the default fit is a
slope-only linear regression of log(tension / load) against wrap angle,
forced through the origin (a zero wrap must give a unit ratio). A
nonlinear least-squares fit in tension space is available behind a flag
for sensitivity comparison.

The transmission gain (how much joint angle moves per radian of sheath
bend change with the motor held) is fitted the same way: slope through
the origin.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .errors import CsvSchemaError, DegenerateData, NonPositiveTension

__all__ = [
    "FrictionSample",
    "FitResult",
    "fit_mu",
    "fit_mu_per_diameter",
    "fit_transmission_gain",
    "summarize_sweep",
    "aggregate_trace",
    "read_friction_samples",
    "write_fit_report",
    "STANDARD_GRAVITY",
    "FRICTION_CSV_COLUMNS",
]

# Loads quoted in kilograms convert with standard gravity.
STANDARD_GRAVITY = 9.80665

FRICTION_CSV_COLUMNS = (
    "sheath_type",
    "wrap_angle_deg",
    "disk_diameter_mm",
    "mean_tension_N",
    "std_tension_N",
    "load_N",
)


@dataclass(frozen=True)
class FrictionSample:
    """One aggregated pull: measured high-side tension against a hanging load."""

    wrap_angle: float  # radians
    disk_diameter: float  # meters
    mean_tension: float  # newtons, pulled-end mean
    std_tension: float  # newtons
    load_tension: float  # newtons, low-side load

    def __post_init__(self) -> None:
        if self.wrap_angle < 0.0:
            raise ValueError(f"wrap angle must be >= 0, got {self.wrap_angle}")
        if self.mean_tension < 0.0 or self.std_tension < 0.0 or self.load_tension < 0.0:
            raise ValueError("tensions must be >= 0")

    @property
    def friction(self) -> float:
        """Mean measured friction: pulled-end tension minus the load."""
        return self.mean_tension - self.load_tension


@dataclass(frozen=True)
class FitResult:
    mu: float
    r_squared: float
    residuals: tuple[float, ...] = field(default=())  # tension units
    standard_error_mu: float = 0.0
    clamped: bool = False  # True when a negative regression slope was clamped to 0


def _check_samples(samples: Sequence[FrictionSample]) -> None:
    if len(samples) < 3:
        raise DegenerateData(f"need at least 3 samples, got {len(samples)}")
    distinct = {s.wrap_angle for s in samples}
    if len(distinct) < 2:
        raise DegenerateData("all wrap angles are equal; slope is not identifiable")
    for s in samples:
        if s.load_tension <= 0.0 or s.mean_tension <= 0.0:
            raise NonPositiveTension(
                f"tension ratio requires positive tensions, got mean={s.mean_tension}, "
                f"load={s.load_tension}"
            )


def fit_mu(samples: Sequence[FrictionSample], space: str = "log") -> FitResult:
    """Fit the friction coefficient from capstan pull samples.

    space="log" (default): least squares on log(mean_tension / load) = mu * angle
    through the origin. space="tension": nonlinear least squares directly on
    mean_tension = load * exp(mu * angle).

    The fitted slope is clamped to zero (with a warning) if regression yields
    a negative value. Residuals are reported in tension units either way.
    """
    _check_samples(samples)
    phi = np.array([s.wrap_angle for s in samples])
    ratio = np.array([s.mean_tension / s.load_tension for s in samples])
    loads = np.array([s.load_tension for s in samples])
    y = np.log(ratio)

    if space == "log":
        sxx = float(np.dot(phi, phi))
        mu = float(np.dot(phi, y) / sxx)
    elif space == "tension":
        mean = np.array([s.mean_tension for s in samples])
        popt, _ = curve_fit(lambda x, m: loads * np.exp(m * x), phi, mean, p0=[0.1])
        mu = float(popt[0])
        sxx = float(np.dot(phi, phi))
    else:
        raise ValueError(f"unknown fit space {space!r}")

    clamped = mu < 0.0
    if clamped:
        warnings.warn(f"fitted mu {mu:.6g} is negative; clamping to 0", stacklevel=2)
        mu = 0.0

    log_resid = y - mu * phi
    syy = float(np.dot(y, y))
    ssr = float(np.dot(log_resid, log_resid))
    r_squared = 1.0 if syy == 0.0 else max(0.0, 1.0 - ssr / syy)

    n = len(samples)
    sigma2 = ssr / (n - 1)
    standard_error = math.sqrt(sigma2 / sxx)

    tension_resid = tuple(
        float(s.mean_tension - s.load_tension * math.exp(mu * s.wrap_angle)) for s in samples
    )
    return FitResult(
        mu=mu,
        r_squared=r_squared,
        residuals=tension_resid,
        standard_error_mu=standard_error,
        clamped=clamped,
    )


def fit_transmission_gain(pairs: Sequence[tuple[float, float]]) -> float:
    """Fit the magnitude of joint drift per radian of bend change.

    pairs are (bend change, joint drift) observations. Returns the
    sign-folded slope through the origin, i.e. the estimate of
    offset / transmission_radius, a positive number for physical data.
    """
    if len(pairs) < 2:
        raise DegenerateData(f"need at least 2 pairs, got {len(pairs)}")
    dphi = np.array([p[0] for p in pairs])
    dq = np.array([p[1] for p in pairs])
    if len(set(dphi.tolist())) < 2:
        raise DegenerateData("all bend changes are equal; slope is not identifiable")
    sxx = float(np.dot(dphi, dphi))
    if sxx == 0.0:
        raise DegenerateData("all bend changes are zero")
    slope = float(np.dot(dphi, dq) / sxx)
    return -slope


def fit_mu_per_diameter(samples: Sequence[FrictionSample], space: str = "log") -> dict[float, FitResult]:
    """Separate fit per disk diameter.

    The capstan model has no radius term, yet measured friction can vary
    with the bend radius at a fixed wrap angle; reporting per-radius fits
    side by side makes that visible without inventing a radius-dependent
    model.
    """
    groups: dict[float, list[FrictionSample]] = {}
    for s in samples:
        groups.setdefault(s.disk_diameter, []).append(s)
    return {diameter: fit_mu(group, space=space) for diameter, group in sorted(groups.items())}


def aggregate_trace(values: Iterable[float], trim_fraction: float = 0.1) -> tuple[float, float]:
    """Mean and population std of the quasi-steady middle of a gauge trace.

    Trims the first and last trim_fraction of the samples; a convention for
    discarding ramp-in and release transients, not a filtering method.
    """
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise DegenerateData("empty trace")
    k = int(arr.size * trim_fraction)
    middle = arr[k : arr.size - k] if arr.size - 2 * k >= 1 else arr
    return float(np.mean(middle)), float(np.std(middle))


def summarize_sweep(
    samples_by_type: dict[str, Sequence[FrictionSample]],
) -> dict[str, list[dict]]:
    """Aggregate friction per sheath type into per-(angle, diameter) rows.

    Each row carries the mean and population std of the measured friction
    (pulled tension minus load) over the samples sharing that grid point.
    Rows are sorted by (angle, diameter).
    """
    out: dict[str, list[dict]] = {}
    for sheath_type, samples in samples_by_type.items():
        if not samples:
            raise DegenerateData(f"no samples for sheath type {sheath_type!r}")
        groups: dict[tuple[float, float], list[float]] = {}
        for s in samples:
            groups.setdefault((s.wrap_angle, s.disk_diameter), []).append(s.friction)
        rows = []
        for (angle, diameter), frictions in sorted(groups.items()):
            arr = np.asarray(frictions)
            rows.append(
                {
                    "wrap_angle": angle,
                    "disk_diameter": diameter,
                    "mean_friction": float(np.mean(arr)),
                    "std_friction": float(np.std(arr)),
                    "n": int(arr.size),
                }
            )
        out[sheath_type] = rows
    return out


def read_friction_samples(path: str | Path) -> dict[str, list[FrictionSample]]:
    """Read friction samples grouped by sheath type from a CSV file.

    Expected header: sheath_type, wrap_angle_deg, disk_diameter_mm,
    mean_tension_N, std_tension_N, load_N.
    """
    path = Path(path)
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            raise CsvSchemaError(f"{path}: empty file, expected header {FRICTION_CSV_COLUMNS}")
        missing = [c for c in FRICTION_CSV_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise CsvSchemaError(f"{path}: missing columns {missing}")
        out: dict[str, list[FrictionSample]] = {}
        for lineno, row in enumerate(reader, start=2):
            try:
                sample = FrictionSample(
                    wrap_angle=math.radians(float(row["wrap_angle_deg"])),
                    disk_diameter=float(row["disk_diameter_mm"]) * 1e-3,
                    mean_tension=float(row["mean_tension_N"]),
                    std_tension=float(row["std_tension_N"]),
                    load_tension=float(row["load_N"]),
                )
            except (TypeError, ValueError) as exc:
                raise CsvSchemaError(f"{path}:{lineno}: bad row: {exc}") from exc
            out.setdefault(row["sheath_type"], []).append(sample)
    if not out:
        raise CsvSchemaError(f"{path}: no data rows")
    return out


def write_fit_report(
    path: str | Path, fits: dict[str, FitResult], counts: dict[str, int] | None = None
) -> None:
    """Write per-sheath-type fit results as CSV."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["sheath_type", "mu", "r_squared", "standard_error_mu", "n_samples"])
        for sheath_type in sorted(fits):
            fit = fits[sheath_type]
            n = counts.get(sheath_type, len(fit.residuals)) if counts else len(fit.residuals)
            writer.writerow(
                [
                    sheath_type,
                    f"{fit.mu:.9g}",
                    f"{fit.r_squared:.9g}",
                    f"{fit.standard_error_mu:.9g}",
                    n,
                ]
            )

"""Exception hierarchy shared across the toolkit.

Everything derives from TendonSimError so callers can catch the whole
family; the CLI maps subfamilies onto stable exit codes.
"""


class TendonSimError(Exception):
    """Base class for all toolkit errors."""


# --- geometry / transmission ---

class OffsetCurveViolation(TendonSimError):
    """A curved sheath segment is too tight for the tendon offset curve to exist."""


class NonPositiveLength(TendonSimError):
    """A length formula produced a non-positive result (degenerate geometry)."""


# --- plant ---

class NonFiniteState(TendonSimError):
    """Plant state became non-finite; usually means the timestep is too large."""


class InvariantBreach(TendonSimError):
    """An internal bookkeeping identity failed beyond tolerance."""


# --- control ---

class FaultedController(TendonSimError):
    """Operation attempted on a controller in the faulted (safety-stopped) state."""


class PretensionTimeout(TendonSimError):
    """Pretensioning never engaged the tendon; likely broken or far too slack."""


# --- hand / commands ---

class DimensionMismatch(TendonSimError):
    """Command vector has the wrong number of entries."""


class NonFiniteCommand(TendonSimError):
    """Command vector contains NaN or infinity."""


# --- estimation / data ---

class DegenerateData(TendonSimError):
    """Input data cannot support the requested fit (too few distinct points)."""


class NonPositiveTension(TendonSimError):
    """A tension or tension ratio that must be positive is not."""


class CsvSchemaError(TendonSimError):
    """A CSV file does not match the expected column schema."""


# --- configuration / scenarios ---

class ConfigError(TendonSimError):
    """Scenario configuration failed validation; message names the field."""


class ScenarioError(TendonSimError):
    """A scenario run failed after configuration was accepted."""

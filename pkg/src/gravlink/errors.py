"""Typed errors raised across the package.

Every failure mode that callers are expected to handle gets its own class so
that the CLI (and tests) can branch on type rather than on message text.
All inherit from GravlinkError.
"""


class GravlinkError(Exception):
    """Base class for all package errors."""


# --- ephemeris handling ---

class MalformedRecord(GravlinkError):
    """A position record failed to parse or failed a sanity bound.

    Carries the 1-based line number of the offending record.
    """

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")


class EmptyEphemeris(GravlinkError):
    """No valid position records were found in the input."""


class NonMonotonicTime(GravlinkError):
    """Record epochs are not strictly increasing."""

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")


class InsufficientRecords(GravlinkError):
    """Too few records for the requested interpolation."""


class OutOfRange(GravlinkError):
    """Requested time lies outside the tabulated interval."""


# --- geometry and trajectories ---

class BadAltitude(GravlinkError):
    """Platform radius below the Earth surface or otherwise unphysical."""


class NoConvergence(GravlinkError):
    """An iterative solver exhausted its iteration budget."""


class DegenerateGeometry(GravlinkError):
    """Link endpoints coincide, or a relativistic denominator left its
    trusted region (|1 - x| < 0.5), so the ratio evaluation is unsafe."""


# --- photon counting and fringe fitting ---

class InsufficientScan(GravlinkError):
    """Fewer scan points than free fringe parameters."""


class FitDiverged(GravlinkError):
    """Nonlinear fringe fit failed to converge."""


class DegenerateVisibility(GravlinkError):
    """Fitted fringe amplitude consistent with zero; phase undefined."""


# --- regression ---

class SingularFit(GravlinkError):
    """Design matrix has no leverage (all regressors zero)."""


# --- spin / weak measurement ---

class BadAxis(GravlinkError):
    """Zero-length direction vector where a unit axis is required."""


class NonHermitian(GravlinkError):
    """Operator expected to be Hermitian is not."""


class OrthogonalSelection(GravlinkError):
    """Pre- and post-selected states are orthogonal; weak value undefined."""


# --- configuration / CLI ---

class ConfigInvalid(GravlinkError):
    """One or more configuration violations; message lists all of them."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class FileUnreadable(GravlinkError):
    """Input file missing or unreadable."""

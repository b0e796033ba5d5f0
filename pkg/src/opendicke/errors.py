"""Exception types for the open Dicke model calculations.

Every failure mode that a caller may reasonably want to catch and map to a
status (for example in a parameter scan) gets its own class.  All of them
derive from :class:`OpenDickeError` so blanket handling stays easy.
"""

from __future__ import annotations


class OpenDickeError(Exception):
    """Base class for all errors raised by this package."""


class NoThreshold(OpenDickeError):
    """The pump has no critical value for these parameters (delta_c >= 0)."""


class DegenerateBranch(OpenDickeError):
    """Mean-field branch with 1 - 2*beta0**2 ~ 0; the expansion is singular."""


class NumericalFailure(OpenDickeError):
    """A numerical self-check failed beyond its tolerance."""


class DefectiveMatrix(OpenDickeError):
    """The stability matrix is (numerically) defective.

    Carries diagnostics so scans can report how close to defectiveness the
    point is.
    """

    def __init__(self, message: str, cond: float = float("nan"),
                 gap: float = float("nan"), overlap: float = float("nan")):
        super().__init__(message)
        self.cond = cond
        self.gap = gap
        self.overlap = overlap


class UnstableState(OpenDickeError):
    """A quasi-normal mode grows in time; no stationary state exists."""


class DivergentSteadyState(OpenDickeError):
    """The noise drives an undamped mode combination; moments diverge."""


class DynamicalInstability(OpenDickeError):
    """The closed-system spectrum is not purely oscillatory; no ground state."""


class CutoffTooSmall(OpenDickeError):
    """Fock-space results did not converge under a doubled cutoff."""


class InvalidCurve(OpenDickeError):
    """A curve handed to the exponent fit is unusable (too short, non-positive)."""

"""Two-body approximation for distant orbits of the test particle.

Far from the primaries the particle sees a single mass ``3`` at the
origin (``G = 1``). In a reversible configuration it sits at an apsis
``(x4, 0)`` moving with ``(0, vy4)``; the vis-viva relation then gives

    vy4 = sqrt(3 (1 - e)) / sqrt(x4)          (apocenter, x4 = a (1 + e))

and pericenter formulas follow by ``e -> -e``.

The period condition ties ``a`` to the half-period ``T0 = 2 m Tbar``.
Between two consecutive perpendicular crossings of the x-axis a Kepler
ellipse covers half a revolution, so by default the Kepler period is
``2 T0``. Pass ``revolutions=1.0`` to equate the Kepler period with
``T0`` itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .choreography import PRINTED_PERIOD
from .errors import DomainError, NoPhysicalSolution
from .porbits import SeedPoint

CENTRAL_MASS = 3.0
APSIDES = ("apocenter", "pericenter")
DEFAULT_TBAR = PRINTED_PERIOD / 12.0


def _signed_e(e: float, apsis: str) -> float:
    if apsis not in APSIDES:
        raise DomainError(f"apsis must be one of {APSIDES}, got {apsis!r}")
    return e if apsis == "apocenter" else -e


def _check_e(e: float) -> None:
    # e = 1 is the radial limit; it is allowed so that vy4 -> 0 is reachable
    if not (0.0 <= e <= 1.0) or math.isnan(e):
        raise DomainError(f"eccentricity must lie in [0, 1], got {e}")


@dataclass(frozen=True)
class KeplerApprox:
    """Ellipse about the fictitious central mass, sampled at one apsis."""

    a: float
    e: float
    apsis: str = "apocenter"

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise DomainError(f"semi-major axis must be positive, got {self.a}")
        _check_e(self.e)
        _signed_e(self.e, self.apsis)

    @property
    def x4(self) -> float:
        return self.a * (1.0 + _signed_e(self.e, self.apsis))

    @property
    def vy4(self) -> float:
        return approx_velocity(self.x4, self.e, self.apsis)

    @property
    def period(self) -> float:
        return 2.0 * math.pi * math.sqrt(self.a ** 3 / CENTRAL_MASS)


def approx_velocity(x4: float, e: float, apsis: str = "apocenter") -> float:
    """Speed at an apsis located at distance ``x4``.

    Parameters
    ----------
    x4 : float
        Apsis distance, positive.
    e : float
        Eccentricity in ``[0, 1]``.
    apsis : {"apocenter", "pericenter"}

    Returns
    -------
    float
        ``sqrt(3 (1 -+ e) / x4)``.
    """
    if not x4 > 0.0:
        raise DomainError(f"x4 must be positive, got {x4}")
    _check_e(e)
    return math.sqrt(CENTRAL_MASS * (1.0 - _signed_e(e, apsis))) / math.sqrt(x4)


def semi_major_axis(m: int, *, t_bar: float = DEFAULT_TBAR, revolutions: float = 0.5) -> float:
    """Semi-major axis whose Kepler period matches ``T0 = 2 m Tbar``."""
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m}")
    if not revolutions > 0.0:
        raise DomainError(f"revolutions must be positive, got {revolutions}")
    t_kep = 2.0 * m * t_bar / revolutions
    return (CENTRAL_MASS * t_kep ** 2 / (4.0 * math.pi ** 2)) ** (1.0 / 3.0)


def eccentricity_from_period(x4: float, m: int, *, apsis: str = "apocenter",
                             t_bar: float = DEFAULT_TBAR, revolutions: float = 0.5) -> float:
    """Eccentricity that puts an apsis at ``x4`` for half-period ``2 m Tbar``.

    Raises
    ------
    NoPhysicalSolution
        If the implied eccentricity falls outside ``[0, 1)``.
    """
    if not x4 > 0.0:
        raise DomainError(f"x4 must be positive, got {x4}")
    a = semi_major_axis(m, t_bar=t_bar, revolutions=revolutions)
    e = x4 / a - 1.0
    if apsis == "pericenter":
        e = -e
    elif apsis != "apocenter":
        raise DomainError(f"apsis must be one of {APSIDES}, got {apsis!r}")
    if abs(e) < 1e-15:
        e = 0.0
    if not 0.0 <= e < 1.0:
        raise NoPhysicalSolution(f"x4={x4}, m={m} implies e={e:.6g} outside [0, 1)")
    return e


def kepler_seed(m: int, e: float, *, apsis: str = "apocenter",
                t_bar: float = DEFAULT_TBAR, revolutions: float = 0.5) -> SeedPoint:
    """Closed-form seed ``(x40, vy40, T0)`` for the shooting problem."""
    if not 0.0 <= e < 1.0:
        raise NoPhysicalSolution(f"eccentricity {e} outside [0, 1)")
    a = semi_major_axis(m, t_bar=t_bar, revolutions=revolutions)
    approx = KeplerApprox(a, e, apsis)
    return SeedPoint(approx.x4, approx.vy4, 2.0 * m * t_bar)

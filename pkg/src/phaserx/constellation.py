"""Binary constellations and the average-power constraint.

Complex field amplitudes are kept in units where ``|alpha|**2`` is the mean
photon number of the symbol, so the average optical power of a binary
constellation is ``nbar = (|alpha0|**2 + |alpha1|**2) / 2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy.constants import c as _SPEED_OF_LIGHT
from scipy.constants import h as _PLANCK


@dataclass(frozen=True)
class BinaryConstellation:
    """Pair of equiprobable complex amplitudes carrying the two bit values."""

    alpha0: complex
    alpha1: complex

    def __post_init__(self):
        for name in ("alpha0", "alpha1"):
            a = complex(getattr(self, name))
            if not (math.isfinite(a.real) and math.isfinite(a.imag)):
                raise ValueError(f"{name} must have finite components, got {a}")
            object.__setattr__(self, name, a)

    def mean_photon_number(self) -> float:
        """Average photon number per symbol, ``(|a0|^2 + |a1|^2)/2``."""
        return 0.5 * (abs(self.alpha0) ** 2 + abs(self.alpha1) ** 2)

    def separation(self) -> float:
        """Distance ``|alpha1 - alpha0|`` in the complex amplitude plane."""
        return abs(self.alpha1 - self.alpha0)


def make_ook(nbar: float) -> BinaryConstellation:
    """On-off keying: ``(0, sqrt(2*nbar))``, mean photon number ``nbar``."""
    if nbar < 0.0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    return BinaryConstellation(0.0, math.sqrt(2.0 * nbar))


def make_bpsk(nbar: float) -> BinaryConstellation:
    """Binary phase shift keying: ``(-sqrt(nbar), +sqrt(nbar))``."""
    if nbar < 0.0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    a = math.sqrt(nbar)
    return BinaryConstellation(-a, a)


def parametrize(theta: float, nbar: float) -> BinaryConstellation:
    """Real-axis constellation meeting the power constraint exactly.

    ``alpha0 = sqrt(2*nbar)*cos(theta)`` and ``alpha1 = sqrt(2*nbar)*sin(theta)``,
    so the mean photon number is ``nbar`` for every ``theta``:
    ``theta = pi/2`` gives OOK, ``theta = 3*pi/4`` gives BPSK up to a global
    sign.
    """
    if nbar < 0.0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    s = math.sqrt(2.0 * nbar)
    return BinaryConstellation(s * math.cos(theta), s * math.sin(theta))


def rotate(c: BinaryConstellation, phase: float) -> BinaryConstellation:
    """Rotate both symbols by a common phase (leaves the power unchanged)."""
    u = cmath.exp(1j * phase)
    return BinaryConstellation(c.alpha0 * u, c.alpha1 * u)


def psd_watts_per_hz(nbar: float, wavelength: float) -> float:
    """Signal power spectral density of ``nbar`` photons per symbol.

    Uses the single-mode convention of one symbol per unit time-bandwidth
    product, giving ``nbar * h * c / wavelength`` in W/Hz.  The wavelength is
    in meters.
    """
    if nbar < 0.0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    if wavelength <= 0.0:
        raise ValueError(f"wavelength must be > 0, got {wavelength}")
    return nbar * _PLANCK * _SPEED_OF_LIGHT / wavelength

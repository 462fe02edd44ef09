"""Curvilinear aperture geometry and the focus-point range function.

The receiver position along the aperture is ``(x0 + x(tau), y0, z0 + z(tau))``
with ``x(tau)`` and ``z(tau)`` polynomials in slow time ``tau``. The range to
the focus point is approximated by the parabolic form

    Q(tau) = y0 + ((x0 + x(tau))**2 + (z0 + z(tau))**2) / (2 * y0)

whose first three derivatives are available in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

SPEED_OF_LIGHT = 299_792_458.0

# Two guard samples per side hold the spill of the +-3s/2 delta shifts.
GUARD_SAMPLES = 2
MIN_SAMPLES = 8


@dataclass(frozen=True)
class PolynomialPath:
    """Polynomial path coordinate, coefficients in ascending powers of tau."""

    coefficients: Tuple[float, ...]

    def __init__(self, coefficients: Sequence[float]):
        coeffs = tuple(float(c) for c in coefficients)
        if not coeffs:
            coeffs = (0.0,)
        if not all(np.isfinite(coeffs)):
            raise ValueError("path coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def derivative_coefficients(self, order: int) -> np.ndarray:
        c = np.asarray(self.coefficients, dtype=float)
        if order == 0:
            return c
        if order > self.degree:
            return np.zeros(1)
        return npoly.polyder(c, order)

    def __call__(self, tau, order: int = 0):
        return npoly.polyval(tau, self.derivative_coefficients(order))


def eval_path(path: PolynomialPath, tau):
    """Return the path value and its first three derivatives at ``tau``."""
    return tuple(path(tau, order) for order in range(4))


@dataclass(frozen=True)
class Aperture:
    """Polynomial aperture sampled uniformly on ``[-T, T]``.

    Attributes:
        x_path: along-track coordinate ``x(tau)`` in meters.
        z_path: vertical coordinate ``z(tau)`` in meters.
        half_extent: ``T``; tau is dimensionless and defaults to ``[-1, 1]``.
        sample_count: number of samples ``N`` on ``[-T, T]``.
    """

    x_path: PolynomialPath
    z_path: PolynomialPath
    half_extent: float = 1.0
    sample_count: int = 20001

    def __post_init__(self):
        if not self.half_extent > 0:
            raise ValueError(f"half_extent must be positive, got {self.half_extent}")
        if int(self.sample_count) != self.sample_count or self.sample_count < MIN_SAMPLES:
            raise ValueError(
                f"sample_count must be an integer >= {MIN_SAMPLES}, got {self.sample_count}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_extent / (self.sample_count - 1)

    @property
    def extended_count(self) -> int:
        return self.sample_count + 2 * GUARD_SAMPLES

    def tau(self) -> np.ndarray:
        """The ``N`` physical sample positions on ``[-T, T]``."""
        return self.tau_extended()[GUARD_SAMPLES:-GUARD_SAMPLES]

    def tau_extended(self) -> np.ndarray:
        """Sample positions including the guard samples beyond each end.

        Built from offsets about the grid center so the grid is exactly
        antisymmetric.
        """
        n = np.arange(self.extended_count) - (self.extended_count - 1) / 2.0
        return n * self.spacing

    def with_sample_count(self, sample_count: int) -> "Aperture":
        return Aperture(self.x_path, self.z_path, self.half_extent, sample_count)


@dataclass(frozen=True)
class Geometry:
    """Focus point offsets and radar parameters.

    ``k_eff = p * 2*pi*frequency / c`` is the wavenumber used for every phase
    computation; ``p = 2`` is the monostatic (round-trip) case.
    """

    y0: float
    frequency: float
    x0: float = 0.0
    z0: float = 0.0
    p: int = 2

    def __post_init__(self):
        if not self.y0 > 0:
            raise ValueError(f"y0 must be positive, got {self.y0}")
        if not self.frequency > 0:
            raise ValueError(f"frequency must be positive, got {self.frequency}")
        if self.p not in (1, 2):
            raise ValueError(f"p must be 1 or 2, got {self.p}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    @property
    def k_eff(self) -> float:
        return self.p * 2.0 * np.pi / self.wavelength


def _check_y0(g: Geometry) -> float:
    if not g.y0 > 0:
        raise ValueError(f"y0 must be positive, got {g.y0}")
    return g.y0


def q_range(ap: Aperture, g: Geometry, tau):
    """Parabolic range to the focus point with all unknown offsets at zero."""
    y0 = _check_y0(g)
    x = g.x0 + ap.x_path(tau)
    z = g.z0 + ap.z_path(tau)
    return y0 + (x * x + z * z) / (2.0 * y0)


def q_derivs(ap: Aperture, g: Geometry, tau):
    """First, second and third tau-derivatives of :func:`q_range`."""
    y0 = _check_y0(g)
    x, x1, x2, x3 = eval_path(ap.x_path, tau)
    z, z1, z2, z3 = eval_path(ap.z_path, tau)
    x = g.x0 + x
    z = g.z0 + z
    q1 = (x1 * x + z1 * z) / y0
    q2 = (x1 * x1 + x2 * x + z1 * z1 + z2 * z) / y0
    q3 = (3.0 * x1 * x2 + x3 * x + 3.0 * z1 * z2 + z3 * z) / y0
    return q1, q2, q3


def exact_range(ap: Aperture, g: Geometry, offsets, tau):
    """Euclidean range from the aperture to the offset scatterer."""
    dx, dy, dz = offsets
    x = g.x0 + ap.x_path(tau) + dx
    z = g.z0 + ap.z_path(tau) + dz
    y = g.y0 + dy
    return np.sqrt(x * x + y * y + z * z)


def exact_range_derivs(ap: Aperture, g: Geometry, offsets, tau):
    """Exact range and its first three tau-derivatives.

    Differentiates ``R**2 = X**2 + Y**2 + Z**2`` implicitly.
    """
    dx, dy, dz = offsets
    x, x1, x2, x3 = eval_path(ap.x_path, tau)
    z, z1, z2, z3 = eval_path(ap.z_path, tau)
    x = g.x0 + x + dx
    z = g.z0 + z + dz
    y = g.y0 + dy
    r = np.sqrt(x * x + y * y + z * z)
    half_u1 = x * x1 + z * z1
    half_u2 = x1 * x1 + x * x2 + z1 * z1 + z * z2
    half_u3 = 3.0 * x1 * x2 + x * x3 + 3.0 * z1 * z2 + z * z3
    r1 = half_u1 / r
    r2 = (half_u2 - r1 * r1) / r
    r3 = (half_u3 - 3.0 * r1 * r2) / r
    return r, r1, r2, r3


def default_sample_count(ap: Aperture, g: Geometry, probe: int = 4097) -> int:
    """Smallest odd ``N`` keeping the focus phase change per sample under pi/2.

    ``max|Q'|`` is estimated on a ``probe``-point grid.
    """
    tau = np.linspace(-ap.half_extent, ap.half_extent, probe)
    q1, _, _ = q_derivs(ap, g, tau)
    slope = float(np.max(np.abs(q1))) * g.k_eff
    if slope == 0.0:
        return MIN_SAMPLES + 1
    n = int(np.floor(2.0 * ap.half_extent * slope / (np.pi / 2.0))) + 2
    n = max(n, MIN_SAMPLES)
    return n + 1 if n % 2 == 0 else n

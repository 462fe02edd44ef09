"""Named aperture/geometry presets for the cubic and parabolic test apertures."""

from __future__ import annotations

import numpy as np
from numpy.polynomial import Polynomial

from .aperture import Aperture, Geometry, PolynomialPath

LENGTH = 55.5
HEIGHT = 0.5
FREQUENCY = 9e9
RANGE = 1000.0
CUBIC_ZEROS = (-25.54, 5.55, 25.54)
PARABOLA_ZEROS = (-19.63, 19.63)
DEFAULT_SAMPLES = 20001


def _height_normalized(zeros, half_length, height, half_extent=1.0) -> PolynomialPath:
    """Polynomial in tau with the given zeros in x, scaled so max |z| = height.

    ``x = half_length * tau / half_extent``; the maximum is taken over the
    endpoints and the interior critical points, so it is exact.
    """
    scale = half_length / half_extent
    poly = Polynomial.fromroots(np.asarray(zeros) / scale)
    crit = [r.real for r in poly.deriv().roots()
            if abs(r.imag) < 1e-12 and -half_extent <= r.real <= half_extent]
    peak = np.max(np.abs(poly(np.array([-half_extent, half_extent, *crit]))))
    return PolynomialPath(poly.coef * (height / peak))


def _linear_x(half_length, half_extent=1.0) -> PolynomialPath:
    return PolynomialPath([0.0, half_length / half_extent])


def geometry() -> Geometry:
    return Geometry(y0=RANGE, frequency=FREQUENCY, p=2)


def preset_cubic(sample_count: int = DEFAULT_SAMPLES):
    half = LENGTH / 2.0
    ap = Aperture(_linear_x(half), _height_normalized(CUBIC_ZEROS, half, HEIGHT),
                  1.0, sample_count)
    return ap, geometry()


def preset_parabola(sample_count: int = DEFAULT_SAMPLES):
    half = LENGTH / 2.0
    ap = Aperture(_linear_x(half), _height_normalized(PARABOLA_ZEROS, half, HEIGHT),
                  1.0, sample_count)
    return ap, geometry()


PRESETS = {"cubic-fig1": preset_cubic, "parabola-fig4": preset_parabola}


def horizontal_resolution(g: Geometry, length: float = LENGTH) -> float:
    """Cross-range resolution ``lambda * y0 / (2 L)`` of a linear aperture."""
    return g.wavelength * g.y0 / (2.0 * length)


def vertical_half_resolution(g: Geometry, height: float = HEIGHT) -> float:
    """Half of ``lambda * y0 / (2 H)``, the circumscribing rectangle's vertical resolution."""
    return g.wavelength * g.y0 / (2.0 * height) / 2.0

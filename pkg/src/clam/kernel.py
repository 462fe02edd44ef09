"""Narrowband backprojection kernel for the focus point and its windowed forms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aperture import Aperture, Geometry, q_derivs, q_range
from .windows import WindowSet


@dataclass(frozen=True, eq=False)
class KernelSamples:
    """Kernel ``h = exp(sign * j * k_eff * Q)`` and derivatives on the extended grid.

    ``hw`` holds the windowed combinations ``hw0..hw3`` once
    :func:`build_windowed` has been applied.
    """

    h: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray
    hw: tuple = ()

    @property
    def derivatives(self):
        return (self.h, self.h1, self.h2, self.h3)


def build_kernel(ap: Aperture, g: Geometry, sign: int = -1) -> KernelSamples:
    """Kernel samples and their analytic derivatives.

    ``sign=-1`` gives ``h = exp(-j k Q)``; ``sign=+1`` gives the conjugate,
    which is the matched filter for a field ``exp(-j k R)``.
    """
    if sign not in (-1, 1):
        raise ValueError(f"kernel sign must be -1 or +1, got {sign}")
    tau = ap.tau_extended()
    q = q_range(ap, g, tau)
    q1, q2, q3 = q_derivs(ap, g, tau)
    c = sign * 1j * g.k_eff
    h = np.exp(c * q)
    h1 = c * q1 * h
    h2 = (c * c * q1 * q1 + c * q2) * h
    h3 = (c ** 3 * q1 ** 3 + 3.0 * c * c * q1 * q2 + c * q3) * h
    return KernelSamples(h, h1, h2, h3)


def build_windowed(k: KernelSamples, ws: WindowSet) -> KernelSamples:
    """Leibniz combinations with ``w_i`` standing in for window derivatives."""
    if any(len(w) != len(k.h) for w in ws):
        raise ValueError(f"grid mismatch: kernel has {len(k.h)} samples, "
                         f"windows have {len(ws.w0)}")
    w0, w1, w2, w3 = ws
    h, h1, h2, h3 = k.derivatives
    hw0 = w0 * h
    hw1 = w1 * h + w0 * h1
    hw2 = w2 * h + 2.0 * w1 * h1 + w0 * h2
    hw3 = w3 * h + 3.0 * w2 * h1 + 3.0 * w1 * h2 + w0 * h3
    return KernelSamples(h, h1, h2, h3, (hw0, hw1, hw2, hw3))

"""Base windows and delta-comb derivative windows.

Each derivative window is the base window convolved with a four-tap comb at
shifts ``(-3s/2, -s/2, +s/2, +3s/2)``. The tap weights are the binomial
products of the pair sum ``(1, 1)`` and the pair difference ``(1, -1)``:

    w0: (1,  3,  3,  1)
    w1: (1,  1, -1, -1) * 2   / s
    w2: (1, -1, -1,  1) * 4   / s**2
    w3: (1, -3,  3, -1) * 8   / s**3

A pair sum doubles a smooth function while a pair difference over ``s``
differentiates it, so the extra ``2**i`` factor makes ``w_i`` approximate the
i-th derivative of ``w0`` itself rather than of ``w0 / 2**i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aperture import MIN_SAMPLES, Aperture

WINDOW_KINDS = ("hann", "rectangular", "hann_squared")
WINDOW_ALIASES = {"hann": "hann", "rect": "rectangular", "rectangular": "rectangular",
                  "hann2": "hann_squared", "hann_squared": "hann_squared"}

SHIFTS = np.array([-1.5, -0.5, 0.5, 1.5])
COMB_WEIGHTS = np.array([
    [1.0, 3.0, 3.0, 1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
    [1.0, -3.0, 3.0, -1.0],
])


def window_kind(name: str) -> str:
    try:
        return WINDOW_ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown window kind {name!r}; expected one of "
                         f"{sorted(WINDOW_ALIASES)}") from None


@dataclass(frozen=True)
class BaseWindow:
    kind: str = "hann"
    half_extent: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", window_kind(self.kind))
        if not self.half_extent > 0:
            raise ValueError("window half_extent must be positive")

    def __call__(self, tau):
        return base_eval(self, tau)


def base_eval(w: BaseWindow, tau):
    tau = np.asarray(tau, dtype=float)
    inside = np.abs(tau) <= w.half_extent
    if w.kind == "rectangular":
        values = np.ones_like(tau)
    else:
        values = np.cos(np.pi * tau / (2.0 * w.half_extent)) ** 2
        if w.kind == "hann_squared":
            values = values * values
    return np.where(inside, values, 0.0)


@dataclass(frozen=True, eq=False)
class WindowSet:
    """``w0..w3`` sampled on the aperture's extended grid."""

    w0: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    w3: np.ndarray
    s_used: float

    def __iter__(self):
        return iter((self.w0, self.w1, self.w2, self.w3))

    def __getitem__(self, order: int) -> np.ndarray:
        return (self.w0, self.w1, self.w2, self.w3)[order]


def comb_weights(order: int, s: float) -> np.ndarray:
    return COMB_WEIGHTS[order] * (2.0 / s) ** order


def sample_combs(w: BaseWindow, tau: np.ndarray, s: float) -> WindowSet:
    """Evaluate the four comb windows at arbitrary ``tau`` with shift ``s``.

    The base window is analytic, so half-sample shifts are evaluated exactly.
    """
    outer_l, inner_l, inner_r, outer_r = (base_eval(w, tau - u * s) for u in SHIFTS)
    arrays = []
    for i in range(4):
        c = comb_weights(i, s)
        # mirrored taps are combined first so odd windows cancel exactly
        if i % 2:
            arrays.append(c[0] * (outer_l - outer_r) + c[1] * (inner_l - inner_r))
        else:
            arrays.append(c[0] * (outer_l + outer_r) + c[1] * (inner_l + inner_r))
    return WindowSet(*arrays, s_used=s)


def build_window_set(w: BaseWindow, ap: Aperture) -> WindowSet:
    if ap.sample_count < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples")
    return sample_combs(w, ap.tau_extended(), ap.spacing)

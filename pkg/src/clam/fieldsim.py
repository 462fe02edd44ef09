"""Single-frequency point-scatterer field along the aperture.

The constant fast-time phase is omitted; at a fixed range gate it is a global
phase and cancels out of the estimate.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .aperture import Aperture, Geometry, exact_range, exact_range_derivs, q_range

NOISE_MODELS = ("gaussian", "uniform_phase")
RANGE_MODELS = ("exact", "parabolic")


@dataclass(frozen=True)
class Scatterer:
    dx: float = 0.0
    dy: float = 0.0
    dz: float = 0.0
    amplitude: complex = 1.0

    def __post_init__(self):
        if not abs(self.amplitude) > 0:
            raise ValueError("scatterer amplitude must have nonzero magnitude")

    @property
    def offsets(self):
        return (self.dx, self.dy, self.dz)


@dataclass(frozen=True)
class Scene:
    scatterers: tuple

    def __init__(self, scatterers: Iterable[Scatterer]):
        scatterers = tuple(scatterers)
        if not scatterers:
            raise ValueError("scene must contain at least one scatterer")
        object.__setattr__(self, "scatterers", scatterers)

    def __add__(self, other: "Scene") -> "Scene":
        return Scene(self.scatterers + other.scatterers)


@dataclass(frozen=True, eq=False)
class FieldSamples:
    """Complex field sampled on the aperture's extended grid.

    ``values`` has ``ap.extended_count`` entries: the ``N`` physical samples
    plus two guard samples beyond each end of the aperture.
    """

    values: np.ndarray
    spacing: float
    seed: Optional[int] = None
    noise_fraction: float = 0.0

    def __len__(self):
        return len(self.values)

    def scaled(self, factor: complex) -> "FieldSamples":
        return FieldSamples(self.values * factor, self.spacing, self.seed, self.noise_fraction)

    def to_csv(self, target) -> None:
        """Write ``re,im`` rows to a path or an open text stream."""
        if hasattr(target, "write"):
            self._write_csv(target)
        else:
            with open(target, "w", newline="") as fh:
                self._write_csv(fh)

    def _write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["re", "im"])
        for v in self.values:
            writer.writerow([repr(float(v.real)), repr(float(v.imag))])

    @classmethod
    def from_csv(cls, path, spacing: float) -> "FieldSamples":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["re", "im"]:
                raise ValueError(f"{path}: expected header 're,im'")
            rows = [complex(float(re), float(im)) for re, im in reader]
        return cls(np.asarray(rows, dtype=complex), spacing)


def _range(ap, g, offsets, tau, range_model):
    if range_model == "exact":
        return exact_range(ap, g, offsets, tau)
    if range_model == "parabolic":
        dx, dy, dz = offsets
        shifted = Geometry(y0=g.y0 + dy, frequency=g.frequency,
                           x0=g.x0 + dx, z0=g.z0 + dz, p=g.p)
        return q_range(ap, shifted, tau)
    raise ValueError(f"unknown range model {range_model!r}; expected one of {RANGE_MODELS}")


def clean_field(scene: Scene, ap: Aperture, g: Geometry, range_model: str = "exact") -> np.ndarray:
    tau = ap.tau_extended()
    values = np.zeros(tau.shape, dtype=complex)
    for sc in scene.scatterers:
        values += complex(sc.amplitude) * np.exp(-1j * g.k_eff * _range(ap, g, sc.offsets, tau, range_model))
    return values


def simulate(scene: Scene, ap: Aperture, g: Geometry, noise_fraction: float = 0.0,
             seed: Optional[int] = None, *, noise_model: str = "gaussian",
             range_model: str = "exact", rng: Optional[np.random.Generator] = None) -> FieldSamples:
    """Simulate the field ``sum_i A_i exp(-j k_eff R_i(tau))`` plus noise.

    Noise RMS is ``noise_fraction`` times the RMS of the noiseless field.
    ``noise_model`` is ``"gaussian"`` (circular complex Gaussian) or
    ``"uniform_phase"`` (fixed magnitude, uniformly random phase). An explicit
    ``rng`` takes precedence over ``seed``.
    """
    if not noise_fraction >= 0:
        raise ValueError(f"noise_fraction must be >= 0, got {noise_fraction}")
    if noise_model not in NOISE_MODELS:
        raise ValueError(f"unknown noise model {noise_model!r}; expected one of {NOISE_MODELS}")
    values = clean_field(scene, ap, g, range_model)
    if noise_fraction > 0:
        if rng is None:
            rng = np.random.default_rng(seed)
        sigma = noise_fraction * np.sqrt(np.mean(np.abs(values) ** 2))
        if noise_model == "gaussian":
            noise = (rng.standard_normal(values.shape) + 1j * rng.standard_normal(values.shape))
            noise *= sigma / np.sqrt(2.0)
        else:
            noise = sigma * np.exp(2j * np.pi * rng.random(values.shape))
        values = values + noise
    return FieldSamples(values, ap.spacing, seed, float(noise_fraction))


def field_derivatives(scene: Scene, ap: Aperture, g: Geometry):
    """Noiseless field and its analytic tau-derivatives up to third order.

    Uses the exact range, matching :func:`simulate` with ``range_model="exact"``.
    Returns four complex arrays on the extended grid.
    """
    tau = ap.tau_extended()
    out = [np.zeros(tau.shape, dtype=complex) for _ in range(4)]
    c = -1j * g.k_eff
    for sc in scene.scatterers:
        r, r1, r2, r3 = exact_range_derivs(ap, g, sc.offsets, tau)
        e = complex(sc.amplitude) * np.exp(c * r)
        p1, p2, p3 = c * r1, c * r2, c * r3
        out[0] += e
        out[1] += p1 * e
        out[2] += (p2 + p1 * p1) * e
        out[3] += (p3 + 3.0 * p1 * p2 + p1 ** 3) * e
    return tuple(out)


def single(dx: float = 0.0, dy: float = 0.0, dz: float = 0.0, amplitude: complex = 1.0) -> Scene:
    return Scene([Scatterer(dx, dy, dz, amplitude)])

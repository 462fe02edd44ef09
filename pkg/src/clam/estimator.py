"""Assembly and solution of the linear system for the scatterer offsets.

Each row comes from one of the slow-time derivative equations of the field,

    y0 (E^(r+1) + jk (Q' E)^(r)) = -jk (x' E)^(r) dx - E^(r+1) dy - jk (z' E)^(r) dz,

for ``r = 0, 1, 2``. Multiplying by the windowed kernel ``hw0`` and integrating,
every derivative of order ``m`` is moved onto the kernel using
``int hw0 F^(m) = (-1)**m int hw_m F``. After multiplying the row by
``(-1)**r`` the entries are

    M[r, 0] = -jk int hw_r x' E
    M[r, 1] =    int hw_(r+1) E
    M[r, 2] = -jk int hw_r z' E
    b[r]    = y0 int (-hw_(r+1) + jk hw_r Q') E

with every integral evaluated as ``s * sum`` over the extended grid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import linalg
from .aperture import GUARD_SAMPLES, Aperture, Geometry, q_derivs
from .fieldsim import FieldSamples
from .kernel import build_kernel, build_windowed
from .windows import WindowSet

DET_THRESHOLD = 1e-3
IMAG_THRESHOLD = 0.5
KERNEL_SIGN = 1
SOLVE_METHODS = ("complex", "stacked")


class EstimateFlag(enum.Flag):
    NONE = 0
    SINGULAR = enum.auto()
    LOW_DETERMINANT = enum.auto()
    HIGH_IMAG_RESIDUAL = enum.auto()
    # reduced solve: dy was not estimated, it is reported as the assumed 0
    DY_ASSUMED = enum.auto()

    def names(self) -> list:
        return [f.name for f in EstimateFlag if f.value and f in self]

    def __str__(self) -> str:
        return "|".join(self.names())


@dataclass(frozen=True, eq=False)
class ClamSystem:
    M: np.ndarray
    b: np.ndarray
    det_M: complex
    boundary_residual: float = 0.0


@dataclass(frozen=True)
class Estimate:
    """Solved offsets in meters.

    When ``SINGULAR`` is set the offsets are NaN and must not be used.
    ``imag_residual`` is the largest imaginary part of the complex solution.
    """

    dx: float
    dy: float
    dz: float
    imag_residual: float
    det_M_magnitude: float
    det_score: float
    flags: EstimateFlag = EstimateFlag.NONE

    @property
    def singular(self) -> bool:
        return EstimateFlag.SINGULAR in self.flags

    @property
    def offsets(self):
        return (self.dx, self.dy, self.dz)


class ClamOperator:
    """Precomputed integrand weights for one aperture, geometry and window set.

    Applying the operator to field samples is a single matrix product, so
    sweeps over many scenes reuse the kernel and window work.
    """

    def __init__(self, ap: Aperture, g: Geometry, ws: WindowSet, kernel_sign: int = KERNEL_SIGN):
        tau = ap.tau_extended()
        if len(ws.w0) != len(tau):
            raise ValueError(f"window grid has {len(ws.w0)} samples, aperture grid {len(tau)}")
        self.aperture = ap
        self.geometry = g
        self.spacing = ap.spacing
        kern = build_windowed(build_kernel(ap, g, kernel_sign), ws)
        hw = kern.hw
        jk = 1j * g.k_eff
        x1 = ap.x_path(tau, 1) * np.ones_like(tau)
        z1 = ap.z_path(tau, 1) * np.ones_like(tau)
        q1, _, _ = q_derivs(ap, g, tau)
        m = np.empty((3, 3, len(tau)), dtype=complex)
        bw = np.empty((3, len(tau)), dtype=complex)
        for r in range(3):
            m[r, 0] = -jk * hw[r] * x1
            m[r, 1] = hw[r + 1]
            m[r, 2] = -jk * hw[r] * z1
            bw[r] = g.y0 * (-hw[r + 1] + jk * hw[r] * q1)
        self.m_weights = m * self.spacing
        self.b_weights = bw * self.spacing
        edge = np.abs(tau) > ap.half_extent - GUARD_SAMPLES * ap.spacing
        self._edge_weights = np.stack([hw[i] * edge for i in (1, 2, 3)]) * self.spacing

    def __call__(self, field: FieldSamples) -> ClamSystem:
        e = np.asarray(field.values if isinstance(field, FieldSamples) else field)
        if e.shape != (self.m_weights.shape[-1],):
            raise ValueError(f"field has {e.shape[0]} samples, expected {self.m_weights.shape[-1]}")
        M = self.m_weights @ e
        b = self.b_weights @ e
        boundary = float(np.max(np.abs(self._edge_weights @ e)))
        return ClamSystem(M, b, linalg.det(M), boundary)


def assemble(E: FieldSamples, ap: Aperture, g: Geometry, ws: WindowSet,
             kernel_sign: int = KERNEL_SIGN) -> ClamSystem:
    """Build ``M`` and ``b`` from field samples.

    ``boundary_residual`` is the largest magnitude among the portions of the
    ``hw1..hw3`` integrals contributed by the last two samples at each edge,
    i.e. the boundary terms a continuous integration by parts would drop.
    """
    return ClamOperator(ap, g, ws, kernel_sign)(E)


def determinant_diagnostic(sys: ClamSystem) -> float:
    """Scale-free conditioning score ``|det M| / prod(row norms)`` in ``[0, 1]``."""
    return linalg.hadamard_ratio(sys.M)


def _flags(score, imag_residual, det_threshold, imag_threshold):
    flags = EstimateFlag.NONE
    if score < det_threshold:
        flags |= EstimateFlag.LOW_DETERMINANT
    if imag_residual > imag_threshold:
        flags |= EstimateFlag.HIGH_IMAG_RESIDUAL
    return flags


def _singular(det_mag, score, extra=EstimateFlag.NONE):
    nan = float("nan")
    return Estimate(nan, nan, nan, nan, det_mag, score,
                    EstimateFlag.SINGULAR | EstimateFlag.LOW_DETERMINANT | extra)


def _solve(M, b, method):
    if method == "complex":
        x = linalg.solve(M, b)
        return x.real, float(np.max(np.abs(x.imag)))
    if method == "stacked":
        a = np.vstack([M.real, M.imag])
        rhs = np.concatenate([b.real, b.imag])
        x, _, rank, sv = np.linalg.lstsq(a, rhs, rcond=None)
        if rank < M.shape[1] or sv[-1] < linalg.PIVOT_RTOL * sv[0]:
            raise linalg.SingularMatrixError("stacked system is rank deficient")
        misfit = np.linalg.norm(a @ x - rhs) / max(np.linalg.norm(rhs), np.finfo(float).tiny)
        return x, float(misfit)
    raise ValueError(f"unknown solve method {method!r}; expected one of {SOLVE_METHODS}")


def solve_full(sys: ClamSystem, det_threshold: float = DET_THRESHOLD,
               imag_threshold: float = IMAG_THRESHOLD, method: str = "complex") -> Estimate:
    """Solve the 3x3 system; never raises on singular input.

    With ``method="stacked"`` the real and imaginary rows are stacked into a
    6x3 real least-squares problem and ``imag_residual`` is its relative misfit.
    """
    score = determinant_diagnostic(sys)
    det_mag = abs(sys.det_M)
    try:
        (dx, dy, dz), resid = _solve(sys.M, sys.b, method)
    except linalg.SingularMatrixError:
        return _singular(det_mag, score)
    return Estimate(float(dx), float(dy), float(dz), resid, det_mag, score,
                    _flags(score, resid, det_threshold, imag_threshold))


def reduced_system(sys: ClamSystem):
    M = sys.M[np.ix_([0, 1], [0, 2])]
    return M, sys.b[:2]


def solve_reduced(sys: ClamSystem, det_threshold: float = DET_THRESHOLD,
                  imag_threshold: float = IMAG_THRESHOLD, method: str = "complex") -> Estimate:
    """Solve for ``(dx, dz)`` assuming ``dy = 0``.

    Drops the ``dy`` column and the third-derivative row. ``dy`` is reported
    as 0 and the ``DY_ASSUMED`` flag is always set. The determinant score is
    that of the 2x2 matrix.
    """
    M, b = reduced_system(sys)
    score = linalg.hadamard_ratio(M)
    det_mag = abs(linalg.det(M))
    try:
        (dx, dz), resid = _solve(M, b, method)
    except linalg.SingularMatrixError:
        return _singular(det_mag, score, EstimateFlag.DY_ASSUMED)
    flags = _flags(score, resid, det_threshold, imag_threshold) | EstimateFlag.DY_ASSUMED
    return Estimate(float(dx), 0.0, float(dz), resid, det_mag, score, flags)


def estimate(field: FieldSamples, ap: Aperture, g: Geometry, ws: WindowSet, *,
             mode: str = "full", det_threshold: float = DET_THRESHOLD,
             imag_threshold: float = IMAG_THRESHOLD, method: str = "complex",
             kernel_sign: int = KERNEL_SIGN) -> Estimate:
    sys = assemble(field, ap, g, ws, kernel_sign)
    solver = {"full": solve_full, "reduced": solve_reduced}.get(mode)
    if solver is None:
        raise ValueError(f"unknown solver mode {mode!r}; expected 'full' or 'reduced'")
    return solver(sys, det_threshold, imag_threshold, method)

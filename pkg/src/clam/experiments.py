"""Scenario runners for the height, cross-range, range-ambiguity and glint sweeps.

Each runner returns a :class:`SweepResult` with one row per grid cell. Noise
for cell ``i`` of case ``c`` is drawn from ``default_rng([seed, c, i])``, so the
output does not depend on evaluation order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import astuple, dataclass, field, fields, replace
from typing import List, Optional

import numpy as np

from . import presets
from .config import AXES, Axis, Case, ScenarioConfig
from .estimator import ClamOperator, Estimate, solve_full, solve_reduced
from .fieldsim import Scatterer, Scene, simulate
from .windows import BaseWindow, build_window_set

FLOAT_FORMAT = "{:.9g}"


@dataclass(frozen=True)
class SweepRow:
    case: str
    cell: int
    grid_dx: float
    grid_dy: float
    grid_dz: float
    true_dx: float
    true_dy: float
    true_dz: float
    est_dx: float
    est_dy: float
    est_dz: float
    dz_error: float
    det_score: float
    det_abs: float
    imag_residual: float
    flags: str


FIELDS = tuple(f.name for f in fields(SweepRow))


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return FLOAT_FORMAT.format(float(value))


def _json_value(value):
    if isinstance(value, str) or isinstance(value, (int, np.integer)):
        return value
    value = float(value)
    return None if math.isnan(value) else float(FLOAT_FORMAT.format(value))


@dataclass
class SweepResult:
    experiment: str
    rows: List[SweepRow] = field(default_factory=list)

    def column(self, name: str, case: Optional[str] = None) -> np.ndarray:
        rows = [r for r in self.rows if case is None or r.case == case]
        return np.array([getattr(r, name) for r in rows])

    def cases(self):
        return list(dict.fromkeys(r.case for r in self.rows))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(FIELDS)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in astuple(row)])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "experiment": self.experiment,
            "fields": list(FIELDS),
            "rows": [{k: _json_value(v) for k, v in zip(FIELDS, astuple(r))} for r in self.rows],
        }
        return json.dumps(payload, indent=1) + "\n"


class _Runner:
    """Shared per-case machinery: operator construction, simulation, solving."""

    def __init__(self, cfg: ScenarioConfig, case: Case, case_index: int):
        self.cfg = cfg
        self.case_index = case_index
        self.ap, self.g = cfg.build(case.aperture)
        ws = build_window_set(BaseWindow(cfg.window, self.ap.half_extent), self.ap)
        self.op = ClamOperator(self.ap, self.g, ws, cfg.kernel_sign)
        self.solver = solve_reduced if case.solver == "reduced" else solve_full
        label = case.aperture if isinstance(case.aperture, str) else "custom"
        self.label = f"{label}/{case.solver}"

    def rng(self, cell: int):
        if self.cfg.seed is None:
            return np.random.default_rng()
        return np.random.default_rng([self.cfg.seed, self.case_index, cell])

    def estimate(self, scene: Scene, cell: int) -> Estimate:
        cfg = self.cfg
        rng = self.rng(cell) if cfg.noise_fraction > 0 else None
        f = simulate(scene, self.ap, self.g, cfg.noise_fraction, cfg.seed,
                     noise_model=cfg.noise_model, range_model=cfg.range_model, rng=rng)
        return self.solver(self.op(f), cfg.det_threshold, cfg.imag_threshold, cfg.method)

    def row(self, cell, grid, truth, est: Estimate) -> SweepRow:
        return SweepRow(self.label, cell, *grid, *truth, est.dx, est.dy, est.dz,
                        est.dz - truth[2], est.det_score, est.det_M_magnitude,
                        est.imag_residual, str(est.flags))


def _grid_axis(cfg: ScenarioConfig, name: str, default: Axis) -> Axis:
    return cfg.grid.get(name, default)


def _sweep(cfg, experiment, axes, defaults, scene_for):
    """Run every case over the cartesian product of ``axes`` (row-major)."""
    result = SweepResult(experiment)
    for ci, case in enumerate(cfg.case_list()):
        runner = _Runner(cfg, case, ci)
        grids = [_grid_axis(cfg, a, defaults(runner)[a]).values() for a in axes]
        mesh = np.meshgrid(*grids, indexing="ij")
        for cell, point in enumerate(zip(*(m.ravel() for m in mesh))):
            coords = dict(zip(AXES, cfg.fixed_offsets()))
            coords.update(zip(axes, (float(p) for p in point)))
            grid = tuple(coords[a] for a in AXES)
            scene, truth = scene_for(runner, grid)
            result.rows.append(runner.row(cell, grid, truth, runner.estimate(scene, cell)))
    return result


def _single(runner, grid):
    return Scene([Scatterer(*grid)]), grid


def default_height_axis(g) -> Axis:
    half = 1.5 * presets.vertical_half_resolution(g)
    return Axis(-half, half, 51)


def run_height_sweep(cfg: ScenarioConfig) -> SweepResult:
    """True dz swept at fixed (dx, dy); default extent +-1.5 vertical half-resolutions."""
    return _sweep(cfg, "sweep-height", ("dz",),
                  lambda r: {"dz": default_height_axis(r.g)}, _single)


def run_xy_sweep(cfg: ScenarioConfig) -> SweepResult:
    """(dx, dy) swept over one linear-aperture pixel (+-0.15 m) at fixed dz."""
    px = Axis(-0.15, 0.15, 11)
    return _sweep(cfg, "sweep-xy", ("dx", "dy"), lambda r: {"dx": px, "dy": px}, _single)


def run_range_ambiguity(cfg: ScenarioConfig) -> SweepResult:
    """True dy swept at fixed dz = 0 for each configured (aperture, solver) case."""
    if not cfg.cases:
        cfg = replace(cfg, cases=(Case("parabola-fig4", "reduced"), Case("cubic-fig1", "full")))
    return _sweep(cfg, "range-ambiguity", ("dy",),
                  lambda r: {"dy": Axis(-0.15, 0.15, 31)}, _single)


def default_glint_axes(g):
    res = presets.horizontal_resolution(g)
    return {"dx": Axis(-10 * res, 10 * res, 81), "dy": Axis(0.0, g.wavelength / 2.0, 21)}


def run_glint_map(cfg: ScenarioConfig) -> SweepResult:
    """Confuser swept over (dx, dy) beside a central scatterer at the fixed offsets.

    The grid columns hold the confuser position; the truth columns hold the
    central scatterer. A zero ``confuser_amplitude`` omits the confuser.
    """
    center = cfg.fixed_offsets()

    def scene_for(runner, grid):
        scs = [Scatterer(*center)]
        if cfg.confuser_amplitude != 0:
            scs.append(Scatterer(grid[0], grid[1], center[2], cfg.confuser_amplitude))
        return Scene(scs), center

    return _sweep(cfg, "glint-map", ("dx", "dy"), lambda r: default_glint_axes(r.g), scene_for)


EXPERIMENTS = {
    "sweep-height": run_height_sweep,
    "sweep-xy": run_xy_sweep,
    "range-ambiguity": run_range_ambiguity,
    "glint-map": run_glint_map,
}

# Per-experiment defaults used when the CLI runs without a config file.
DEFAULT_NOISE = {"sweep-height": 0.1, "sweep-xy": 0.1, "range-ambiguity": 0.1, "glint-map": 0.0}


def describe_presets() -> list:
    out = []
    for name, fn in presets.PRESETS.items():
        ap, g = fn()
        zeros = presets.CUBIC_ZEROS if name.startswith("cubic") else presets.PARABOLA_ZEROS
        out.append({
            "name": name,
            "length_m": presets.LENGTH,
            "height_m": presets.HEIGHT,
            "zeros_m": list(zeros),
            "x_coeffs": list(ap.x_path.coefficients),
            "z_coeffs": list(ap.z_path.coefficients),
            "frequency_hz": g.frequency,
            "y0_m": g.y0,
            "p": g.p,
            "wavelength_m": g.wavelength,
            "sample_count": ap.sample_count,
            "horizontal_resolution_m": presets.horizontal_resolution(g),
            "vertical_half_resolution_m": presets.vertical_half_resolution(g),
        })
    return out

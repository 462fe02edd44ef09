"""Curvilinear aperture monopulse: height of a point scatterer from a curved SAR aperture."""

from .aperture import (Aperture, Geometry, PolynomialPath, eval_path, exact_range, q_derivs,
                       q_range)
from .estimator import (ClamOperator, ClamSystem, Estimate, EstimateFlag, assemble,
                        determinant_diagnostic, estimate, solve_full, solve_reduced)
from .fieldsim import FieldSamples, Scatterer, Scene, simulate
from .kernel import KernelSamples, build_kernel, build_windowed
from .presets import preset_cubic, preset_parabola
from .windows import BaseWindow, WindowSet, base_eval, build_window_set

__version__ = "0.1.0"

__all__ = [
    "Aperture", "Geometry", "PolynomialPath", "eval_path", "exact_range", "q_derivs", "q_range",
    "ClamOperator", "ClamSystem", "Estimate", "EstimateFlag", "assemble",
    "determinant_diagnostic", "estimate", "solve_full", "solve_reduced",
    "FieldSamples", "Scatterer", "Scene", "simulate",
    "KernelSamples", "build_kernel", "build_windowed",
    "preset_cubic", "preset_parabola",
    "BaseWindow", "WindowSet", "base_eval", "build_window_set",
]

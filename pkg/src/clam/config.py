"""Scenario configuration: JSON schema, validation and defaults."""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field, fields, replace
from typing import Optional

import numpy as np

from . import presets
from .aperture import Aperture, PolynomialPath
from .estimator import DET_THRESHOLD, IMAG_THRESHOLD, KERNEL_SIGN, SOLVE_METHODS
from .fieldsim import NOISE_MODELS, RANGE_MODELS, Scatterer, Scene
from .windows import WINDOW_ALIASES

SEED_ENV = "CLAM_SEED"
AXES = ("dx", "dy", "dz")
SOLVERS = ("full", "reduced")


class ConfigError(ValueError):
    """Invalid scenario configuration; ``line`` points into the source text."""

    def __init__(self, message: str, line: int = 1, source: str = "<config>"):
        super().__init__(message)
        self.message = message
        self.line = line
        self.source = source

    def __str__(self):
        return f"{self.source}:{self.line}: {self.message}"


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    count: int

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.min])
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class Case:
    aperture: object = "cubic-fig1"
    solver: str = "full"


@dataclass(frozen=True)
class ScenarioConfig:
    aperture: object = "cubic-fig1"
    sample_count: Optional[int] = None
    geometry: dict = field(default_factory=dict)
    window: str = "hann"
    noise_fraction: float = 0.0
    noise_model: str = "gaussian"
    range_model: str = "exact"
    seed: Optional[int] = 0
    solver: str = "full"
    method: str = "complex"
    kernel_sign: int = KERNEL_SIGN
    det_threshold: float = DET_THRESHOLD
    imag_threshold: float = IMAG_THRESHOLD
    grid: dict = field(default_factory=dict)
    fixed: dict = field(default_factory=dict)
    scatterers: tuple = ()
    confuser_amplitude: complex = 1.0
    cases: tuple = ()

    def axis(self, name: str) -> Axis:
        return self.grid[name]

    def fixed_offsets(self):
        return tuple(float(self.fixed.get(a, 0.0)) for a in AXES)

    def case_list(self):
        return self.cases or (Case(self.aperture, self.solver),)

    def build(self, aperture=None):
        """Return ``(Aperture, Geometry)`` for ``aperture`` (default: the config's)."""
        spec = self.aperture if aperture is None else aperture
        if isinstance(spec, str):
            ap, g = presets.PRESETS[spec]()
        else:
            ap = Aperture(PolynomialPath(spec["x_coeffs"]), PolynomialPath(spec["z_coeffs"]),
                          float(spec.get("half_extent", 1.0)),
                          int(spec.get("sample_count", presets.DEFAULT_SAMPLES)))
            g = presets.geometry()
        if self.sample_count is not None:
            ap = ap.with_sample_count(self.sample_count)
        if self.geometry:
            g = replace(g, **self.geometry)
        return ap, g

    def scene(self) -> Scene:
        return Scene(self.scatterers)


_TOP_KEYS = {f.name for f in fields(ScenarioConfig)}
_GEOMETRY_KEYS = {"frequency", "y0", "x0", "z0", "p"}
_APERTURE_KEYS = {"x_coeffs", "z_coeffs", "half_extent", "sample_count"}
_AXIS_KEYS = {"min", "max", "count"}
_SCATTERER_KEYS = {"dx", "dy", "dz", "amplitude"}
_CASE_KEYS = {"aperture", "solver"}


class _Validator:
    def __init__(self, text: str, source: str):
        self.lines = text.splitlines()
        self.source = source

    def line_of(self, key: str) -> int:
        pattern = re.compile(r'"' + re.escape(key) + r'"\s*:')
        for i, line in enumerate(self.lines, start=1):
            if pattern.search(line):
                return i
        return 1

    def fail(self, message: str, key: str = ""):
        raise ConfigError(message, self.line_of(key) if key else 1, self.source)

    def keys(self, obj, allowed, where, anchor=""):
        if not isinstance(obj, dict):
            self.fail(f"{where} must be an object", anchor)
        for k in obj:
            if k not in allowed:
                self.fail(f"unknown key {k!r} in {where}", k)

    def number(self, value, key, *, integer=False, positive=False, nonneg=False):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if ok and integer:
            ok = float(value).is_integer()
        if not ok or not np.isfinite(value):
            self.fail(f"{key} must be a finite {'integer' if integer else 'number'}", key)
        if positive and not value > 0:
            self.fail(f"{key} must be positive", key)
        if nonneg and not value >= 0:
            self.fail(f"{key} must be non-negative", key)
        return int(value) if integer else float(value)

    def choice(self, value, key, options):
        if value not in options:
            self.fail(f"{key} must be one of {sorted(options)}, got {value!r}", key)
        return value

    def amplitude(self, value, key):
        if isinstance(value, list) and len(value) == 2:
            return complex(self.number(value[0], key), self.number(value[1], key))
        return complex(self.number(value, key))

    def aperture(self, value, key="aperture"):
        if isinstance(value, str):
            return self.choice(value, key, presets.PRESETS)
        self.keys(value, _APERTURE_KEYS, key, key)
        for k in ("x_coeffs", "z_coeffs"):
            coeffs = value.get(k)
            if not isinstance(coeffs, list) or not coeffs:
                self.fail(f"{k} must be a non-empty list of numbers", k)
            for c in coeffs:
                self.number(c, k)
        if "half_extent" in value:
            self.number(value["half_extent"], "half_extent", positive=True)
        if "sample_count" in value:
            if self.number(value["sample_count"], "sample_count", integer=True) < 8:
                self.fail("sample_count must be >= 8", "sample_count")
        return dict(value)


def parse_config(data: dict, text: str = "", source: str = "<config>") -> ScenarioConfig:
    v = _Validator(text or json.dumps(data, indent=1), source)
    v.keys(data, _TOP_KEYS, "config")
    kw = {}
    if "aperture" in data:
        kw["aperture"] = v.aperture(data["aperture"])
    if data.get("sample_count") is not None:
        n = v.number(data["sample_count"], "sample_count", integer=True)
        if n < 8:
            v.fail("sample_count must be >= 8", "sample_count")
        kw["sample_count"] = n
    if "geometry" in data:
        geo = data["geometry"]
        v.keys(geo, _GEOMETRY_KEYS, "geometry", "geometry")
        out = {}
        for k, val in geo.items():
            if k == "p":
                out[k] = v.choice(val, k, (1, 2))
            else:
                out[k] = v.number(val, k, positive=k in ("frequency", "y0"))
        kw["geometry"] = out
    if "window" in data:
        kw["window"] = v.choice(data["window"], "window", WINDOW_ALIASES)
    if "noise_fraction" in data:
        kw["noise_fraction"] = v.number(data["noise_fraction"], "noise_fraction", nonneg=True)
    if "noise_model" in data:
        kw["noise_model"] = v.choice(data["noise_model"], "noise_model", NOISE_MODELS)
    if "range_model" in data:
        kw["range_model"] = v.choice(data["range_model"], "range_model", RANGE_MODELS)
    if "seed" in data:
        kw["seed"] = None if data["seed"] is None else v.number(data["seed"], "seed", integer=True, nonneg=True)
    if "solver" in data:
        kw["solver"] = v.choice(data["solver"], "solver", SOLVERS)
    if "method" in data:
        kw["method"] = v.choice(data["method"], "method", SOLVE_METHODS)
    if "kernel_sign" in data:
        kw["kernel_sign"] = v.choice(data["kernel_sign"], "kernel_sign", (-1, 1))
    for k in ("det_threshold", "imag_threshold"):
        if k in data:
            kw[k] = v.number(data[k], k, nonneg=True)
    if "grid" in data:
        v.keys(data["grid"], set(AXES), "grid", "grid")
        grid = {}
        for name, ax in data["grid"].items():
            v.keys(ax, _AXIS_KEYS, f"grid.{name}", name)
            missing = _AXIS_KEYS - set(ax)
            if missing:
                v.fail(f"grid.{name} is missing {sorted(missing)}", name)
            count = v.number(ax["count"], "count", integer=True)
            if count < 1:
                v.fail(f"grid.{name}.count must be >= 1 (empty sweep grid)", name)
            lo, hi = v.number(ax["min"], "min"), v.number(ax["max"], "max")
            if hi < lo:
                v.fail(f"grid.{name}.max is below min", name)
            grid[name] = Axis(lo, hi, count)
        kw["grid"] = grid
    if "fixed" in data:
        v.keys(data["fixed"], set(AXES), "fixed", "fixed")
        kw["fixed"] = {k: v.number(val, k) for k, val in data["fixed"].items()}
    if "scatterers" in data:
        if not isinstance(data["scatterers"], list):
            v.fail("scatterers must be a list", "scatterers")
        scs = []
        for sc in data["scatterers"]:
            v.keys(sc, _SCATTERER_KEYS, "scatterer", "scatterers")
            amp = v.amplitude(sc.get("amplitude", 1.0), "amplitude")
            if amp == 0:
                v.fail("scatterer amplitude must be nonzero", "amplitude")
            scs.append(Scatterer(*(v.number(sc.get(a, 0.0), a) for a in AXES), amplitude=amp))
        kw["scatterers"] = tuple(scs)
    if "confuser_amplitude" in data:
        kw["confuser_amplitude"] = v.amplitude(data["confuser_amplitude"], "confuser_amplitude")
    if "cases" in data:
        if not isinstance(data["cases"], list):
            v.fail("cases must be a list", "cases")
        cases = []
        for c in data["cases"]:
            v.keys(c, _CASE_KEYS, "case", "cases")
            cases.append(Case(v.aperture(c.get("aperture", "cubic-fig1")),
                              v.choice(c.get("solver", "full"), "solver", SOLVERS)))
        kw["cases"] = tuple(cases)
    return ScenarioConfig(**kw)


def load_config(path) -> ScenarioConfig:
    source = os.fspath(path)
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", 1, source) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc.msg}", exc.lineno, source) from None
    return parse_config(data, text, source)


def apply_seed_override(cfg: ScenarioConfig, seed: Optional[int] = None) -> ScenarioConfig:
    """Explicit ``seed`` wins over ``$CLAM_SEED``, which wins over the config."""
    if seed is None:
        env = os.environ.get(SEED_ENV)
        if env is not None and env.strip():
            try:
                seed = int(env)
            except ValueError:
                raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}", 1, SEED_ENV) from None
    if seed is None:
        return cfg
    return replace(cfg, seed=seed)

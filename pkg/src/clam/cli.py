"""Command-line interface.

Exit status: 0 on success, 2 on a configuration error, 3 when a single
estimate hits a singular system.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments as ex
from .config import ConfigError, ScenarioConfig, apply_seed_override, load_config
from .estimator import ClamOperator, solve_full, solve_reduced
from .fieldsim import FieldSamples, simulate
from .windows import BaseWindow, build_window_set

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SINGULAR = 3

ESTIMATE_FIELDS = ("dx", "dy", "dz", "imag_residual", "det_abs", "det_score",
                   "boundary_residual", "flags")


def _output_format(args) -> str:
    if args.format:
        return args.format
    if args.out and Path(args.out).suffix.lower() == ".json":
        return "json"
    return "csv"


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args, experiment=None) -> ScenarioConfig:
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = ScenarioConfig(noise_fraction=ex.DEFAULT_NOISE.get(experiment, 0.0))
    return apply_seed_override(cfg, args.seed)


def _field(cfg, ap, g):
    if not cfg.scatterers:
        raise ConfigError("no scatterers given; add a 'scatterers' list to the config", 1,
                          "<config>")
    return simulate(cfg.scene(), ap, g, cfg.noise_fraction, cfg.seed,
                    noise_model=cfg.noise_model, range_model=cfg.range_model)


def cmd_simulate(args) -> int:
    cfg = _config(args)
    ap, g = cfg.build()
    f = _field(cfg, ap, g)
    f.to_csv(args.out or sys.stdout)
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = _config(args)
    ap, g = cfg.build()
    if args.field:
        try:
            f = FieldSamples.from_csv(args.field, ap.spacing)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read field samples: {exc}", 1, str(args.field)) from None
        if len(f) != ap.extended_count:
            raise ConfigError(f"field has {len(f)} samples, aperture expects {ap.extended_count}",
                              1, str(args.field))
    else:
        f = _field(cfg, ap, g)
    ws = build_window_set(BaseWindow(cfg.window, ap.half_extent), ap)
    sys_ = ClamOperator(ap, g, ws, cfg.kernel_sign)(f)
    solver = solve_reduced if cfg.solver == "reduced" else solve_full
    est = solver(sys_, cfg.det_threshold, cfg.imag_threshold, cfg.method)
    values = (est.dx, est.dy, est.dz, est.imag_residual, est.det_M_magnitude, est.det_score,
              sys_.boundary_residual, str(est.flags))
    if _output_format(args) == "json":
        text = json.dumps({k: ex._json_value(v) for k, v in zip(ESTIMATE_FIELDS, values)},
                          indent=1) + "\n"
    else:
        text = ",".join(ESTIMATE_FIELDS) + "\n" + ",".join(ex._fmt(v) for v in values) + "\n"
    _emit(text, args.out)
    return EXIT_SINGULAR if est.singular else EXIT_OK


def cmd_presets(args) -> int:
    rows = ex.describe_presets()
    if _output_format(args) == "json":
        _emit(json.dumps(rows, indent=1) + "\n", args.out)
        return EXIT_OK
    lines = []
    for r in rows:
        lines.append(f"{r['name']}: length {r['length_m']} m, height {r['height_m']} m, "
                     f"zeros {r['zeros_m']} m, {r['frequency_hz'] / 1e9:g} GHz, "
                     f"y0 {r['y0_m']:g} m, p={r['p']}, N={r['sample_count']}")
        lines.append(f"  horizontal resolution {r['horizontal_resolution_m']:.2f} m, "
                     f"vertical half-resolution +-{r['vertical_half_resolution_m']:.1f} m")
        lines.append(f"  z coefficients {[float(f'{c:.9g}') for c in r['z_coeffs']]}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args, args.command)
    result = ex.EXPERIMENTS[args.command](cfg)
    text = result.to_json() if _output_format(args) == "json" else result.to_csv()
    _emit(text, args.out)
    if args.plot is not None:
        from . import plotting

        target = args.plot or (str(Path(args.out).with_suffix(".png")) if args.out else None)
        if not target:
            raise ConfigError("--plot needs a path when --out is not given", 1, "<args>")
        case = cfg.case_list()[0]
        plotting.render(result, target, cfg.build(case.aperture)[1])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="scenario config (JSON)")
        p.add_argument("--out", help="output path; .json selects JSON, anything else CSV")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--format", choices=("csv", "json"))
        return p

    common(sub.add_parser("simulate", help="simulate field samples to CSV (re, im)")).set_defaults(
        func=cmd_simulate)
    p = common(sub.add_parser("estimate", help="estimate offsets for one field"))
    p.add_argument("--field", help="field samples CSV written by 'simulate'")
    p.set_defaults(func=cmd_estimate)
    for name, help_ in (("sweep-height", "sweep true dz"),
                        ("sweep-xy", "sweep dx, dy over one pixel"),
                        ("range-ambiguity", "sweep dy for the parabola and cubic apertures"),
                        ("glint-map", "sweep a confuser scatterer")):
        p = common(sub.add_parser(name, help=help_))
        p.add_argument("--plot", nargs="?", const="", default=None,
                       help="also render a PNG (default: next to --out)")
        p.set_defaults(func=cmd_sweep)
    common(sub.add_parser("presets", help="print the built-in apertures")).set_defaults(
        func=cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

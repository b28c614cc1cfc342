"""Command-line driver.

Subcommands: scenario, sweep, hom, schmidt, inverse, phase-match,
dispersion-info. Scalar results are emitted as JSON (or flat key,value
CSV with --format csv); sweeps write one CSV grid per quantity plus a
provenance sidecar. Output is byte-deterministic for identical inputs:
fixed key ordering, repr-based float formatting, no timestamps.

Exit codes: 0 success, 1 user/input error, 2 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    QUANTITIES,
    SWEEP_PARAMS,
    Scenario,
    SweepSpec,
    build_scenario_tpsa,
    compute_scenario,
    parse_config,
    parse_sweep,
    resolve_scenario,
    sweep_point,
)
from .constants import C_LIGHT
from .dispersion import (
    beta,
    gamma,
    group_velocity,
    phase_match_residual,
    pump_wavevector,
    refractive_index,
    solve_phase_matching,
)
from .errors import ConfigInvalid, CounterpairsError
from .inverse import MeasurementSet, estimate, fit_hom_B
from .temporal import hom_curve, hom_params

_DEG = math.pi / 180.0


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _emit(doc: dict, fmt: str, out: str | None) -> None:
    if fmt == "json":
        text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"
    else:
        lines = ["key,value"]

        def walk(prefix, node):
            if isinstance(node, dict):
                for key in sorted(node):
                    walk(f"{prefix}{key}.", node[key])
            elif isinstance(node, (list, tuple)):
                for k, item in enumerate(node):
                    walk(f"{prefix}{k}.", item)
            else:
                lines.append(f"{prefix[:-1]},{_fmt(node)}")

        walk("", doc)
        text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_scenario(args) -> Scenario:
    raw = parse_config(args.config)
    return resolve_scenario(raw, include_g=args.include_g, p_min=args.p_min)


def _cmd_scenario(args) -> int:
    _emit(compute_scenario(_load_scenario(args)), args.format, args.out)
    return 0


def _grid_csv(axis1, axis2, values) -> str:
    """Row-major grid CSV; first column axis1, header row axis2."""
    unit1 = "" if axis1[2] is None else f" [{axis1[2]}]"
    lines = []
    if axis2 is None:
        lines.append(f"{axis1[0]}{unit1},value [{axis1[3]}]")
        for v, row in zip(axis1[1], values):
            lines.append(f"{_fmt(v)},{_fmt(row[0])}")
    else:
        unit2 = "" if axis2[2] is None else f" [{axis2[2]}]"
        header = [f"{axis1[0]}{unit1} \\ {axis2[0]}{unit2}"]
        header += [_fmt(v) for v in axis2[1]]
        lines.append(",".join(header))
        for v1, row in zip(axis1[1], values):
            lines.append(",".join([_fmt(v1)] + [_fmt(x) for x in row]))
    return "\n".join(lines) + "\n"


def _cmd_sweep(args) -> int:
    raw = parse_config(args.config)
    sc = resolve_scenario(raw, include_g=args.include_g, p_min=args.p_min)
    spec = parse_sweep(raw)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    v2_list = [None] if spec.axis2 is None else list(spec.axis2.values)
    points = [(v1, v2) for v1 in spec.axis1.values for v2 in v2_list]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sweep_worker,
                                    [(sc, spec, v1, v2) for v1, v2 in points],
                                    chunksize=8))
    else:
        results = [sweep_point(sc, spec, v1, v2) for v1, v2 in points]

    n2 = len(v2_list)
    files = {}
    for name in spec.quantities:
        unit, _ = QUANTITIES[name]
        rows = []
        for i1 in range(len(spec.axis1.values)):
            rows.append([results[i1 * n2 + j][name] for j in range(n2)])
        ax1 = (spec.axis1.param, spec.axis1.values, SWEEP_PARAMS[spec.axis1.param], unit)
        ax2 = None
        if spec.axis2 is not None:
            ax2 = (spec.axis2.param, spec.axis2.values,
                   SWEEP_PARAMS[spec.axis2.param], unit)
        path = out_dir / f"{name}.csv"
        path.write_text(_grid_csv(ax1, ax2, rows))
        files[name] = path.name

    manifest = {
        "package": "counterpairs",
        "version": __version__,
        "config_sha256": hashlib.sha256(Path(args.config).read_bytes()).hexdigest(),
        "include_g": args.include_g,
        "axis1": {"param": spec.axis1.param, "points": len(spec.axis1.values),
                  "scale": spec.axis1.scale},
        "axis2": None if spec.axis2 is None else {
            "param": spec.axis2.param, "points": len(spec.axis2.values),
            "scale": spec.axis2.scale},
        "quantities": {name: QUANTITIES[name][0] for name in spec.quantities},
        "files": files,
        "errors": sorted({r["_error"] for r in results if "_error" in r}),
    }
    (out_dir / "sweep_manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return 0


def _sweep_worker(packed):
    sc, spec, v1, v2 = packed
    return sweep_point(sc, spec, v1, v2)


def _cmd_hom(args) -> int:
    sc = _load_scenario(args)
    tpsa = build_scenario_tpsa(sc)
    dip = hom_params(tpsa)
    doc = {
        "A": dip.a, "B_per_s2": dip.b, "visibility": dip.visibility,
        "beat_rad_per_s": dip.beat, "delta_tau_l_fs": dip.delta_tau_l * 1e15,
    }
    if args.curve_out:
        span = args.span * dip.delta_tau_l
        taus = np.linspace(-span, span, args.points)
        rates = hom_curve(tpsa, taus)
        lines = ["tau_l [s],R_n [1]"]
        lines += [f"{_fmt(float(t))},{_fmt(float(r))}" for t, r in zip(taus, rates)]
        Path(args.curve_out).write_text("\n".join(lines) + "\n")
        doc["curve_file"] = args.curve_out
    _emit(doc, args.format, args.out)
    return 0


def _cmd_schmidt(args) -> int:
    from .entanglement import schmidt
    from .tpsa import normalize

    sc = _load_scenario(args)
    sch = schmidt(normalize(build_scenario_tpsa(sc)), p_min=sc.p_min)
    _emit({
        "P": sch.p, "vartheta": sch.vartheta, "entropy_bits": sch.entropy_bits,
        "n_min": sch.n_min, "n_min_index": sch.n_min_index, "p_min": sch.p_min,
        "lambda_sq_first_8": [sch.lambda_sq(n) for n in range(8)],
    }, args.format, args.out)
    return 0


_WIDTHS_KEYS = {
    "measure.sigma_omega_s": "rad/s",
    "measure.sigma_omega_i": "rad/s",
    "measure.omega_s0": "rad/s",
    "measure.omega_i0": "rad/s",
}


def _parse_widths_file(path: str) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigInvalid(f"line {lineno}: expected 'key = value'")
        key, value = (p.strip() for p in stripped.split("=", 1))
        if key not in _WIDTHS_KEYS:
            raise ConfigInvalid(f"unknown key {key!r}", field=key)
        parts = value.split()
        if len(parts) != 2 or parts[1] != _WIDTHS_KEYS[key]:
            raise ConfigInvalid(
                f"{key} must be '<number> {_WIDTHS_KEYS[key]}'", field=key)
        values[key] = float(parts[0])
    for key in ("measure.sigma_omega_s", "measure.sigma_omega_i"):
        if key not in values:
            raise ConfigInvalid(f"missing required key {key!r}", field=key)
    return values


def _parse_hom_csv(path: str) -> list:
    rows = []
    for line in Path(path).read_text().splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split(",")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except (ValueError, IndexError):
            if not rows:  # tolerate a single header row
                continue
            raise ConfigInvalid(f"bad coincidence sample line {line!r}") from None
    return rows


def _cmd_inverse(args) -> int:
    widths = _parse_widths_file(args.widths)
    samples = _parse_hom_csv(args.hom_csv)
    beat = 0.0
    if "measure.omega_s0" in widths and "measure.omega_i0" in widths:
        beat = widths["measure.omega_s0"] - widths["measure.omega_i0"]
    fit = fit_hom_B(samples, beat=beat)
    ms = MeasurementSet(sigma_omega_s=widths["measure.sigma_omega_s"],
                        sigma_omega_i=widths["measure.sigma_omega_i"],
                        b=fit.b,
                        omega_s0=widths.get("measure.omega_s0"),
                        omega_i0=widths.get("measure.omega_i0"))
    result = estimate(ms)
    _emit({
        "fit": {"A": fit.a, "B_per_s2": fit.b, "beat_rad_per_s": fit.beat,
                "residual_rms": fit.residual_rms},
        "F_ratio": result.f_ratio,
        "method": result.method,
        "ambiguous": result.ambiguous,
        "roots": [
            {"f2s_r_s2": r.f2s_r, "f2i_r_s2": r.f2i_r, "f2si_r_s2": r.f2si_r,
             "vartheta": r.vartheta, "entropy_bits": r.entropy_bits}
            for r in result.roots
        ],
    }, args.format, args.out)
    return 0


def _cmd_phase_match(args) -> int:
    sc = _load_scenario(args)
    theta = solve_phase_matching(sc.wg, sc.omega_s0, sc.omega_i0)
    omega_p0 = sc.omega_s0 + sc.omega_i0
    _emit({
        "theta_p0_rad": theta,
        "theta_p0_deg": theta / _DEG,
        "residual_rad_per_m": phase_match_residual(sc.wg, theta,
                                                   sc.omega_s0, sc.omega_i0),
        "k_p0_rad_per_m": pump_wavevector(sc.wg.model, omega_p0),
        "beta_s0_rad_per_m": beta(sc.wg, sc.omega_s0),
        "beta_i0_rad_per_m": beta(sc.wg, sc.omega_i0),
    }, args.format, args.out)
    return 0


def _cmd_dispersion_info(args) -> int:
    sc = _load_scenario(args)
    doc = {"model": sc.wg.model.material, "points": []}
    for lam in args.at:
        omega = 2.0 * math.pi * C_LIGHT / lam
        doc["points"].append({
            "lambda_m": lam,
            "omega_rad_per_s": omega,
            "n0": refractive_index(sc.wg.model, omega),
            "beta_rad_per_m": beta(sc.wg, omega),
            "gamma_per_m": gamma(sc.wg, omega),
            "v_guided_m_per_s": group_velocity(sc.wg, omega, "guided"),
            "v_bulk_m_per_s": group_velocity(sc.wg, omega, "pump_bulk"),
        })
    _emit(doc, args.format, args.out)
    return 0


def _add_common(parser, with_config=True):
    if with_config:
        parser.add_argument("--config", required=True, help="scenario config file")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--out", default=None, help="write output here instead of stdout")
    g = parser.add_mutually_exclusive_group()
    g.add_argument("--include-g", dest="include_g", action="store_true", default=True,
                   help="keep transverse-overlap corrections (default)")
    g.add_argument("--neglect-g", dest="include_g", action="store_false",
                   help="drop transverse-overlap corrections")
    parser.add_argument("--p-min", type=float, default=0.95,
                        help="mode-count probability target (default 0.95)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="counterpairs",
        description="Counter-propagating photon pairs from a transversely "
                    "pumped planar waveguide: rates, spectra, interference, "
                    "entanglement.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenario", help="all observables of one configuration")
    _add_common(p)
    p.set_defaults(fn=_cmd_scenario)

    p = sub.add_parser("sweep", help="parameter sweep to CSV grids")
    _add_common(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--workers", type=int, default=1,
                   help="parallel sweep workers (results assembled in fixed order)")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("hom", help="coincidence-dip parameters and curve")
    _add_common(p)
    p.add_argument("--curve-out", default=None, help="write R_n(tau_l) CSV here")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--span", type=float, default=3.0,
                   help="curve half-range in units of the dip width")
    p.set_defaults(fn=_cmd_hom)

    p = sub.add_parser("schmidt", help="Schmidt spectrum and entropy")
    _add_common(p)
    p.set_defaults(fn=_cmd_schmidt)

    p = sub.add_parser("inverse", help="entropy from measured widths + dip samples")
    _add_common(p, with_config=False)
    p.add_argument("--widths", required=True, help="measured-widths file")
    p.add_argument("--hom-csv", required=True, help="CSV of (tau_l, R_n) samples")
    p.set_defaults(fn=_cmd_inverse)

    p = sub.add_parser("phase-match", help="central pump angle from momentum conservation")
    _add_common(p)
    p.set_defaults(fn=_cmd_phase_match)

    p = sub.add_parser("dispersion-info", help="index/propagation numbers at wavelengths")
    _add_common(p)
    p.add_argument("--at", type=float, action="append", required=True,
                   metavar="LAMBDA_M", help="vacuum wavelength in meters (repeatable)")
    p.set_defaults(fn=_cmd_dispersion_info)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigInvalid as exc:
        field = f" [field: {exc.field}]" if exc.field else ""
        print(f"error: {exc}{field}", file=sys.stderr)
        return 1
    except (CounterpairsError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - internal failure path
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

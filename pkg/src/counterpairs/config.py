"""Scenario configuration: flat dotted-key files with explicit units.

Format, one assignment per line (comments start with '#'):

    pump.tau_p = 1e-13 s
    filters.sigma_s = unfiltered
    waveguide.model = linbo3_e

Every dimensioned value must carry exactly the unit token the schema
expects; unknown keys, missing required keys, and wrong units are
rejected with the offending field named. The pump angle is never a
config input: it is solved from momentum conservation at the centrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

from .constants import C_LIGHT
from .dispersion import (
    WaveguideSpec,
    load_model,
    refractive_index,
    solve_phase_matching,
)
from .entanglement import principal_axes, schmidt, separability_roots
from .errors import ConfigInvalid, CounterpairsError
from .spectral import pair_rate, spectrum, wavelength_width, width_ratio
from .temporal import flux, hom_params, time_bandwidth
from .tpsa import (
    FilterSpec,
    GaussianTPSA,
    PumpSpec,
    build_tpsa,
    external_angular_dispersion,
    internal_angular_dispersion,
    normalize,
)

_DEG = math.pi / 180.0

# key -> (unit token or None for dimensionless/string, required, default)
_SCHEMA = {
    "waveguide.alpha": ("1/m", True, None),
    "waveguide.Ly": ("m", True, None),
    "waveguide.d": ("m/V", True, None),
    "waveguide.model": (None, True, None),
    "pump.lambda_p0": ("m", True, None),
    "pump.tau_p": ("s", True, None),
    "pump.a_p": (None, False, 0.0),
    "pump.Z_p": ("m", True, None),
    "pump.Y_p": ("m", True, None),
    "pump.P_p": ("W", False, 1.0),
    "pump.f_rep": ("1/s", False, 8e7),
    "pump.Dtilde_theta": ("rad*s", False, None),
    "pump.D_theta_out": ("deg/m", False, None),
    "filters.sigma_s": ("rad/s", False, None),
    "filters.sigma_i": ("rad/s", False, None),
    "centrals.lambda_s0": ("m", True, None),
    "centrals.lambda_i0": ("m", True, None),
    "sweep.axis1": (None, False, None),
    "sweep.axis1_range": (None, False, None),
    "sweep.axis1_scale": (None, False, "linear"),
    "sweep.axis1_points": (None, False, None),
    "sweep.axis2": (None, False, None),
    "sweep.axis2_range": (None, False, None),
    "sweep.axis2_scale": (None, False, "linear"),
    "sweep.axis2_points": (None, False, None),
    "sweep.quantities": (None, False, None),
}

# sweepable parameter -> expected unit token of its range line
SWEEP_PARAMS = {
    "pump.tau_p": "s",
    "pump.Z_p": "m",
    "pump.Y_p": "m",
    "pump.a_p": None,
    "pump.P_p": "W",
    "pump.Dtilde_theta": "rad*s",
    "pump.D_theta_out": "deg/m",
    "filters.sigma_s": "rad/s",
    "filters.sigma_i": "rad/s",
    "filters.sigma_both": "rad/s",
    "filters.sigma_both_nm": "nm",
}


def parse_config(path: str | Path) -> dict:
    """Read a config file into {dotted key: raw value string}."""
    text = Path(path).read_text()
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigInvalid(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigInvalid(f"unknown key {key!r} (line {lineno})", field=key)
        if key in raw:
            raise ConfigInvalid(f"duplicate key {key!r} (line {lineno})", field=key)
        raw[key] = value
    for key, (_, required, _) in _SCHEMA.items():
        if required and key not in raw:
            raise ConfigInvalid(f"missing required key {key!r}", field=key)
    return raw


def _parse_quantity(key: str, value: str, unit: str | None) -> float:
    parts = value.split()
    if unit is None:
        if len(parts) != 1:
            raise ConfigInvalid(
                f"{key} is dimensionless; got {value!r}", field=key)
        token = parts[0]
    else:
        if len(parts) != 2 or parts[1] != unit:
            raise ConfigInvalid(
                f"{key} must be '<number> {unit}'; got {value!r}", field=key)
        token = parts[0]
    try:
        return float(token)
    except ValueError:
        raise ConfigInvalid(f"{key}: {token!r} is not a number", field=key) from None


def _parse_filter(key: str, value: str) -> float | None:
    if value.strip() == "unfiltered":
        return None
    width = _parse_quantity(key, value, "rad/s")
    if width <= 0:
        raise ConfigInvalid(f"{key} must be positive or 'unfiltered'", field=key)
    return width


@dataclass(frozen=True)
class Scenario:
    """Fully resolved inputs; pump.theta_p0 already satisfies phase matching."""

    wg: WaveguideSpec
    pump: PumpSpec
    filt: FilterSpec
    omega_s0: float
    omega_i0: float
    include_g: bool = True
    p_min: float = 0.95


def resolve_scenario(raw: dict, *, include_g: bool = True,
                     p_min: float = 0.95) -> Scenario:
    """Validate raw key/value strings into a ready-to-run Scenario."""

    def get(key):
        unit, _, default = _SCHEMA[key]
        if key not in raw:
            return default
        return _parse_quantity(key, raw[key], unit)

    model_name = raw["waveguide.model"].strip()
    try:
        model = load_model(model_name)
    except (FileNotFoundError, ValueError) as exc:
        raise ConfigInvalid(f"waveguide.model: {exc}", field="waveguide.model") from exc

    try:
        wg = WaveguideSpec(alpha=get("waveguide.alpha"), ly=get("waveguide.Ly"),
                           d=get("waveguide.d"), model=model)
    except ValueError as exc:
        raise ConfigInvalid(str(exc), field="waveguide") from exc

    omega_s0 = 2.0 * math.pi * C_LIGHT / get("centrals.lambda_s0")
    omega_i0 = 2.0 * math.pi * C_LIGHT / get("centrals.lambda_i0")
    omega_p0 = omega_s0 + omega_i0
    lambda_p0 = get("pump.lambda_p0")
    if abs(2.0 * math.pi * C_LIGHT / lambda_p0 - omega_p0) > 1e-6 * omega_p0:
        raise ConfigInvalid(
            "pump.lambda_p0 violates energy conservation against the centrals "
            f"(expected {2.0 * math.pi * C_LIGHT / omega_p0:.9g} m)",
            field="pump.lambda_p0",
        )

    if "pump.Dtilde_theta" in raw and "pump.D_theta_out" in raw:
        raise ConfigInvalid(
            "give either pump.Dtilde_theta or pump.D_theta_out, not both",
            field="pump.D_theta_out",
        )

    try:
        pump = PumpSpec(
            lambda_p0=lambda_p0, tau_p=get("pump.tau_p"), z_p=get("pump.Z_p"),
            y_p=get("pump.Y_p"), a_p=get("pump.a_p"),
            p_p=get("pump.P_p"), f_rep=get("pump.f_rep"),
        )
    except ValueError as exc:
        raise ConfigInvalid(str(exc), field="pump") from exc

    theta_p0 = solve_phase_matching(wg, omega_s0, omega_i0)
    pump = replace(pump, theta_p0=theta_p0)

    dtilde = get("pump.Dtilde_theta")
    d_out = get("pump.D_theta_out")
    if d_out is not None:
        n_p = refractive_index(model, omega_p0)
        theta_out = math.asin(n_p * math.sin(theta_p0))
        dtilde_out = d_out * _DEG * 2.0 * math.pi * C_LIGHT / omega_p0**2
        _, dtilde = internal_angular_dispersion(model, omega_p0, theta_out, dtilde_out)
    if dtilde is not None:
        pump = replace(pump, dtilde_theta=dtilde)

    try:
        filt = FilterSpec(sigma_s=_parse_filter("filters.sigma_s",
                                                raw.get("filters.sigma_s", "unfiltered")),
                          sigma_i=_parse_filter("filters.sigma_i",
                                                raw.get("filters.sigma_i", "unfiltered")))
    except ValueError as exc:
        raise ConfigInvalid(str(exc), field="filters") from exc

    return Scenario(wg=wg, pump=pump, filt=filt, omega_s0=omega_s0,
                    omega_i0=omega_i0, include_g=include_g, p_min=p_min)


def apply_sweep_value(sc: Scenario, param: str, value: float) -> Scenario:
    """Return a scenario with one sweepable parameter replaced."""
    if param not in SWEEP_PARAMS:
        raise ConfigInvalid(f"{param!r} is not sweepable; choose from "
                            f"{sorted(SWEEP_PARAMS)}", field=param)
    pump, filt = sc.pump, sc.filt
    if param == "pump.tau_p":
        pump = replace(pump, tau_p=value)
    elif param == "pump.Z_p":
        pump = replace(pump, z_p=value)
    elif param == "pump.Y_p":
        pump = replace(pump, y_p=value)
    elif param == "pump.a_p":
        pump = replace(pump, a_p=value)
    elif param == "pump.P_p":
        pump = replace(pump, p_p=value)
    elif param == "pump.Dtilde_theta":
        pump = replace(pump, dtilde_theta=value)
    elif param == "pump.D_theta_out":
        omega_p0 = sc.omega_s0 + sc.omega_i0
        model = sc.wg.model
        n_p = refractive_index(model, omega_p0)
        theta_out = math.asin(n_p * math.sin(pump.theta_p0))
        dtilde_out = value * _DEG * 2.0 * math.pi * C_LIGHT / omega_p0**2
        _, dtilde = internal_angular_dispersion(model, omega_p0, theta_out, dtilde_out)
        pump = replace(pump, dtilde_theta=dtilde)
    elif param == "filters.sigma_s":
        filt = FilterSpec(sigma_s=value, sigma_i=filt.sigma_i)
    elif param == "filters.sigma_i":
        filt = FilterSpec(sigma_s=filt.sigma_s, sigma_i=value)
    elif param == "filters.sigma_both":
        filt = FilterSpec(sigma_s=value, sigma_i=value)
    elif param == "filters.sigma_both_nm":
        sigma = value * 1e-9 * sc.omega_s0**2 / (2.0 * math.pi * C_LIGHT)
        filt = FilterSpec(sigma_s=sigma, sigma_i=sigma)
    return replace(sc, pump=pump, filt=filt)


def build_scenario_tpsa(sc: Scenario) -> GaussianTPSA:
    return build_tpsa(sc.wg, sc.pump, sc.filt, sc.omega_s0, sc.omega_i0,
                      include_g=sc.include_g)


def _complex_pair(z: complex):
    return [z.real, z.imag]


def compute_scenario(sc: Scenario) -> dict:
    """Every scalar observable of one scenario as a JSON-ready dict."""
    tpsa = build_scenario_tpsa(sc)
    rate = pair_rate(tpsa)
    spec_s = spectrum(tpsa, "s")
    spec_i = spectrum(tpsa, "i")
    flux_s = flux(tpsa, "s")
    flux_i = flux(tpsa, "i")
    dip = hom_params(tpsa)
    sch = schmidt(normalize(tpsa), p_min=sc.p_min)
    axes = principal_axes(tpsa)
    tb = time_bandwidth(tpsa)
    ratio = width_ratio(tpsa)
    if sc.pump.a_p == 0.0:
        sep = separability_roots(sc.wg, sc.pump, sc.omega_s0, sc.omega_i0,
                                 include_g=sc.include_g)
        sep_out = {
            "dtilde_theta_roots_rad_s": list(sep.roots),
            "min_feasible_Z_p_m": sep.min_feasible_z_p,
        }
    else:
        sep_out = None
    ext = external_angular_dispersion(sc.wg.model, sc.omega_s0 + sc.omega_i0,
                                      sc.pump.theta_p0, sc.pump.dtilde_theta)

    return {
        "inputs": {
            "waveguide": {
                "alpha_1_per_m": sc.wg.alpha, "Ly_m": sc.wg.ly,
                "d_m_per_V": sc.wg.d, "model": sc.wg.model.material,
            },
            "pump": {
                "lambda_p0_m": sc.pump.lambda_p0, "tau_p_s": sc.pump.tau_p,
                "a_p": sc.pump.a_p, "Z_p_m": sc.pump.z_p, "Y_p_m": sc.pump.y_p,
                "theta_p0_rad": sc.pump.theta_p0,
                "theta_p0_deg": sc.pump.theta_p0 / _DEG,
                "Dtilde_theta_rad_s": sc.pump.dtilde_theta,
                "D_theta_out_deg_per_m": ext.d_out / _DEG,
                "P_p_W": sc.pump.p_p, "f_rep_per_s": sc.pump.f_rep,
            },
            "filters": {"sigma_s_rad_per_s": sc.filt.sigma_s,
                        "sigma_i_rad_per_s": sc.filt.sigma_i},
            "centrals": {"omega_s0_rad_per_s": sc.omega_s0,
                         "omega_i0_rad_per_s": sc.omega_i0,
                         "lambda_s0_m": 2.0 * math.pi * C_LIGHT / sc.omega_s0,
                         "lambda_i0_m": 2.0 * math.pi * C_LIGHT / sc.omega_i0},
            "include_g": sc.include_g,
            "p_min": sc.p_min,
        },
        "tpsa": {
            "f2s_s2": _complex_pair(tpsa.f2s),
            "f2i_s2": _complex_pair(tpsa.f2i),
            "f2si_s2": _complex_pair(tpsa.f2si),
            "f1s_s": _complex_pair(tpsa.f1s),
            "f1i_s": _complex_pair(tpsa.f1i),
            "f0": tpsa.f0,
            "c_phi_sq_per_m": tpsa.c_phi_sq,
            "prefactor": tpsa.prefactor,
            "V_ps_s_per_m": tpsa.v_ps, "V_pi_s_per_m": tpsa.v_pi,
            "V_si_s_per_m": tpsa.v_si,
            "G_s_s2": tpsa.g_s, "G_i_s2": tpsa.g_i, "G_si_s2": tpsa.g_si,
            "D_fr_s4": tpsa.d_fr,
        },
        "rate": {"N_pairs_per_s": rate.pairs_per_s,
                 "per_pulse_probability": rate.per_pulse},
        "spectra": {
            "sigma_omega_s_rad_per_s": spec_s.sigma_omega,
            "sigma_omega_i_rad_per_s": spec_i.sigma_omega,
            "sigma_lambda_s_nm": wavelength_width(sc.omega_s0, spec_s.sigma_omega) * 1e9,
            "sigma_lambda_i_nm": wavelength_width(sc.omega_i0, spec_i.sigma_omega) * 1e9,
            "delta_omega_s0_rad_per_s": spec_s.delta_omega0,
            "delta_omega_i0_rad_per_s": spec_i.delta_omega0,
            "width_ratio_F": ratio.f,
            "sigma_ratio_s_over_i": ratio.sigma_ratio_si,
        },
        "flux": {
            "sigma_tau_s_fs": flux_s.sigma_tau * 1e15,
            "sigma_tau_i_fs": flux_i.sigma_tau * 1e15,
            "delta_tau_s0_fs": flux_s.delta_tau0 * 1e15,
            "delta_tau_i0_fs": flux_i.delta_tau0 * 1e15,
            "time_bandwidth_s": tb.product_s,
            "time_bandwidth_i": tb.product_i,
            "time_bandwidth_ratio": tb.ratio,
        },
        "hom": {
            "A": dip.a, "B_per_s2": dip.b, "visibility": dip.visibility,
            "beat_rad_per_s": dip.beat,
            "delta_tau_l_fs": dip.delta_tau_l * 1e15,
        },
        "schmidt": {
            "P": sch.p, "vartheta": sch.vartheta,
            "entropy_bits": sch.entropy_bits,
            "n_min": sch.n_min, "n_min_index": sch.n_min_index,
            "lambda_sq_first_8": [sch.lambda_sq(n) for n in range(8)],
        },
        "separability": sep_out,
        "principal_axes": {"mu1_s2": axes.mu1, "mu2_s2": axes.mu2,
                           "psi_si_rad": axes.psi_si,
                           "psi_si_deg": axes.psi_si / _DEG},
    }


# Sweep output quantities: name -> (unit label, extractor from the bundle).
QUANTITIES = {
    "N": ("1/s", lambda b: b["rate"]["N_pairs_per_s"]),
    "per_pulse": ("1", lambda b: b["rate"]["per_pulse_probability"]),
    "sigma_omega_s": ("rad/s", lambda b: b["spectra"]["sigma_omega_s_rad_per_s"]),
    "sigma_omega_i": ("rad/s", lambda b: b["spectra"]["sigma_omega_i_rad_per_s"]),
    "sigma_lambda_s": ("nm", lambda b: b["spectra"]["sigma_lambda_s_nm"]),
    "sigma_lambda_i": ("nm", lambda b: b["spectra"]["sigma_lambda_i_nm"]),
    "ratio_lambda_si": ("1", lambda b: (b["spectra"]["sigma_lambda_s_nm"]
                                        / b["spectra"]["sigma_lambda_i_nm"])),
    "sigma_tau_s": ("fs", lambda b: b["flux"]["sigma_tau_s_fs"]),
    "sigma_tau_i": ("fs", lambda b: b["flux"]["sigma_tau_i_fs"]),
    "hom_A": ("1", lambda b: b["hom"]["A"]),
    "hom_B": ("1/s^2", lambda b: b["hom"]["B_per_s2"]),
    "visibility": ("1", lambda b: b["hom"]["visibility"]),
    "delta_tau_l": ("fs", lambda b: b["hom"]["delta_tau_l_fs"]),
    "entropy": ("bits", lambda b: b["schmidt"]["entropy_bits"]),
    "vartheta": ("1", lambda b: b["schmidt"]["vartheta"]),
    "n_min": ("modes", lambda b: b["schmidt"]["n_min"]),
    "psi_si": ("deg", lambda b: b["principal_axes"]["psi_si_deg"]),
    "theta_p0": ("deg", lambda b: b["inputs"]["pump"]["theta_p0_deg"]),
}


@dataclass(frozen=True)
class SweepAxis:
    param: str
    values: tuple
    scale: str


@dataclass(frozen=True)
class SweepSpec:
    axis1: SweepAxis
    axis2: SweepAxis | None
    quantities: tuple


def _parse_axis(raw: dict, which: str) -> SweepAxis | None:
    key = f"sweep.{which}"
    if key not in raw:
        return None
    param = raw[key].strip()
    if param not in SWEEP_PARAMS:
        raise ConfigInvalid(f"{key}: {param!r} is not sweepable", field=key)
    range_key = f"{key}_range"
    points_key = f"{key}_points"
    if range_key not in raw or points_key not in raw:
        raise ConfigInvalid(f"{key} needs {range_key} and {points_key}", field=key)
    unit = SWEEP_PARAMS[param]
    parts = raw[range_key].split()
    expected = 2 if unit is None else 3
    if len(parts) != expected or (unit is not None and parts[-1] != unit):
        raise ConfigInvalid(
            f"{range_key} must be '<lo> <hi>{'' if unit is None else ' ' + unit}'",
            field=range_key)
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(raw[points_key])
    except ValueError as exc:
        raise ConfigInvalid(f"{range_key}/{points_key}: {exc}", field=range_key) from None
    if n < 1:
        raise ConfigInvalid(f"{points_key} must be >= 1", field=points_key)
    scale = raw.get(f"{key}_scale", "linear").strip()
    if scale not in ("linear", "log"):
        raise ConfigInvalid(f"{key}_scale must be linear or log", field=f"{key}_scale")
    if n == 1:
        values = (lo,)
    elif scale == "log":
        if lo <= 0 or hi <= 0:
            raise ConfigInvalid(f"{range_key}: log scale needs positive bounds",
                                field=range_key)
        ratio = (hi / lo) ** (1.0 / (n - 1))
        values = tuple(lo * ratio**k for k in range(n))
    else:
        step = (hi - lo) / (n - 1)
        values = tuple(lo + step * k for k in range(n))
    return SweepAxis(param=param, values=values, scale=scale)


def parse_sweep(raw: dict) -> SweepSpec:
    axis1 = _parse_axis(raw, "axis1")
    if axis1 is None:
        raise ConfigInvalid("sweep.axis1 is required for sweeps", field="sweep.axis1")
    axis2 = _parse_axis(raw, "axis2")
    if "sweep.quantities" not in raw:
        raise ConfigInvalid("sweep.quantities is required", field="sweep.quantities")
    names = tuple(raw["sweep.quantities"].replace(",", " ").split())
    for name in names:
        if name not in QUANTITIES:
            raise ConfigInvalid(
                f"unknown sweep quantity {name!r}; choose from {sorted(QUANTITIES)}",
                field="sweep.quantities")
    if not names:
        raise ConfigInvalid("sweep.quantities is empty", field="sweep.quantities")
    return SweepSpec(axis1=axis1, axis2=axis2, quantities=names)


def sweep_point(sc: Scenario, spec: SweepSpec, v1: float,
                v2: float | None) -> dict:
    """Evaluate one sweep grid point (top level so worker pools can pickle it)."""
    point = apply_sweep_value(sc, spec.axis1.param, v1)
    if spec.axis2 is not None and v2 is not None:
        point = apply_sweep_value(point, spec.axis2.param, v2)
    try:
        bundle = compute_scenario(point)
        return {name: QUANTITIES[name][1](bundle) for name in spec.quantities}
    except CounterpairsError as exc:
        return {name: float("nan") for name in spec.quantities} | {"_error": str(exc)}

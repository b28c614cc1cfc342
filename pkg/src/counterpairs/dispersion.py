"""Material dispersion, guided-mode propagation constants, and phase matching.

The waveguide confines light along x through a parabolic index profile
n(x)^2 = n0(w)^2 (1 - alpha^2 x^2) and supports TE modes with Gaussian
transverse profiles of inverse width gamma(w) = sqrt(n0(w) w alpha / c).
The transversely incident pump travels as a bulk plane wave with
wavevector magnitude k_p(w) = n0(w) w / c.

All operations are pure functions of immutable inputs; frequency
derivatives use central differences with one Richardson extrapolation
step (base step 1e-6 of the evaluation frequency).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .constants import C_LIGHT
from .errors import (
    DegenerateExpansion,
    ModeCutoff,
    NoPhaseMatch,
    OutOfValidityWindow,
)

_REL_STEP = 1e-6          # base finite-difference step, relative to omega
_GAMMA_SQ_FLOOR = 1e-12   # 1/m^2, below this the 1/(gs^2+gi^2) expansion is rejected


@dataclass(frozen=True)
class DispersionModel:
    """Refractive-index model n0(omega) with an explicit validity window.

    kind "sellmeier": coefficients are (B_k, C_k) pairs of the standard
    form n^2 = 1 + sum B_k L^2 / (L^2 - C_k) with L the vacuum wavelength
    in micrometers and C_k in um^2.
    kind "constant": coefficients = (n0,).
    omega_window: inclusive validity interval in rad/s.
    """

    material: str
    kind: str
    coefficients: tuple
    omega_window: tuple

    def __post_init__(self):
        lo, hi = self.omega_window
        if not (0.0 < lo < hi):
            raise ValueError("omega_window must satisfy 0 < lo < hi")
        if self.kind not in ("sellmeier", "constant"):
            raise ValueError(f"unknown dispersion model kind {self.kind!r}")


@dataclass(frozen=True)
class WaveguideSpec:
    """Planar-waveguide parameters.

    alpha: parabolic-profile parameter, 1/m (alpha = 0 is the free-space limit).
    ly: transverse width along y, m.
    d: effective second-order nonlinear coefficient, m/V.
    model: dispersion model used for pump and guided fields alike.
    """

    alpha: float
    ly: float
    d: float
    model: DispersionModel

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.ly <= 0 or self.d <= 0:
            raise ValueError("ly and d must be positive")


@dataclass(frozen=True)
class GTaylor:
    """Second-order expansion of 1/(gamma_s^2 + gamma_i^2) about the centrals.

    1/(gs^2+gi^2) ~ g0 + g1s*ds + g1i*di + g2s*ds^2 + g2i*di^2 + g2si*ds*di,
    with ds, di the signal/idler detunings in rad/s. Units: g0 in m^2,
    g1 in m^2 s, g2 in m^2 s^2.
    """

    g0: float
    g1s: float
    g1i: float
    g2s: float
    g2i: float
    g2si: float

    def __post_init__(self):
        if self.g0 <= 0:
            raise ValueError("g0 must be positive")


def _check_window(model: DispersionModel, omega: float) -> None:
    lo, hi = model.omega_window
    if not (lo <= omega <= hi):
        raise OutOfValidityWindow(
            f"omega = {omega:.6g} rad/s outside validity window "
            f"[{lo:.6g}, {hi:.6g}] of {model.material!r}"
        )


def refractive_index(model: DispersionModel, omega: float) -> float:
    """Refractive index n0(omega) for an in-window angular frequency."""
    _check_window(model, omega)
    if model.kind == "constant":
        return float(model.coefficients[0])
    lam_um2 = (2.0 * math.pi * C_LIGHT / omega * 1e6) ** 2
    n_sq = 1.0
    for b, c_um2 in model.coefficients:
        n_sq += b * lam_um2 / (lam_um2 - c_um2)
    return math.sqrt(n_sq)


def index_derivative(model: DispersionModel, omega: float) -> float:
    """dn0/domega by Richardson-extrapolated central differences, s/rad."""
    h = _REL_STEP * omega
    _check_window(model, omega - h)
    _check_window(model, omega + h)

    def diff(step):
        return (refractive_index(model, omega + step)
                - refractive_index(model, omega - step)) / (2.0 * step)

    return (4.0 * diff(h / 2.0) - diff(h)) / 3.0


def beta(spec: WaveguideSpec, omega: float) -> float:
    """Propagation constant of the guided TE mode, rad/m.

    beta = (n0 w / c) sqrt(1 - alpha c / (n0 w)); raises ModeCutoff when
    the radicand is non-positive.
    """
    n = refractive_index(spec.model, omega)
    radicand = 1.0 - spec.alpha * C_LIGHT / (n * omega)
    if radicand <= 0.0:
        raise ModeCutoff(
            f"no guided mode at omega = {omega:.6g} rad/s "
            f"(alpha c / (n0 w) = {1.0 - radicand:.6g} >= 1)"
        )
    return n * omega / C_LIGHT * math.sqrt(radicand)


def pump_wavevector(model: DispersionModel, omega: float) -> float:
    """Bulk wavevector magnitude k_p = n0 w / c, rad/m."""
    return refractive_index(model, omega) * omega / C_LIGHT


def group_velocity(spec: WaveguideSpec, omega: float, which: str = "guided") -> float:
    """Group velocity, m/s.

    which = "guided": 1/v = d beta/dw of the guided mode.
    which = "pump_bulk": 1/v = d(n0 w / c)/dw of the bulk pump wave.
    """
    if which == "guided":
        fn = lambda w: beta(spec, w)  # noqa: E731
    elif which == "pump_bulk":
        fn = lambda w: pump_wavevector(spec.model, w)  # noqa: E731
    else:
        raise ValueError("which must be 'guided' or 'pump_bulk'")
    h = _REL_STEP * omega
    _check_window(spec.model, omega - h)
    _check_window(spec.model, omega + h)

    def diff(step):
        return (fn(omega + step) - fn(omega - step)) / (2.0 * step)

    inv_v = (4.0 * diff(h / 2.0) - diff(h)) / 3.0
    if inv_v <= 0.0:
        raise ModeCutoff(f"non-positive group slowness at omega = {omega:.6g}")
    return 1.0 / inv_v


def gamma(spec: WaveguideSpec, omega: float) -> float:
    """Inverse transverse mode width gamma = sqrt(n0 w alpha / c), 1/m."""
    n = refractive_index(spec.model, omega)
    return math.sqrt(n * omega * spec.alpha / C_LIGHT)


def phase_match_residual(spec: WaveguideSpec, theta_p0: float,
                         omega_s0: float, omega_i0: float) -> float:
    """Momentum mismatch k_p0 sin(theta_p0) - beta_s0 + beta_i0, rad/m.

    Counter-propagation makes the idler contribute with reversed sign.
    """
    kp0 = pump_wavevector(spec.model, omega_s0 + omega_i0)
    return kp0 * math.sin(theta_p0) - beta(spec, omega_s0) + beta(spec, omega_i0)


def solve_phase_matching(spec: WaveguideSpec, omega_s0: float, omega_i0: float) -> float:
    """Central pump angle (rad, in [-pi/2, pi/2]) satisfying momentum conservation.

    k_p0 sin(theta_p0) = beta_s0 - beta_i0; raises NoPhaseMatch when the
    guided-mode mismatch exceeds the available pump wavevector.
    """
    kp0 = pump_wavevector(spec.model, omega_s0 + omega_i0)
    mismatch = beta(spec, omega_s0) - beta(spec, omega_i0)
    ratio = mismatch / kp0
    if abs(ratio) > 1.0:
        raise NoPhaseMatch(
            f"|beta_s0 - beta_i0| = {abs(mismatch):.6g} rad/m exceeds "
            f"k_p0 = {kp0:.6g} rad/m"
        )
    return math.asin(ratio)


def g_taylor(spec: WaveguideSpec, omega_s0: float, omega_i0: float) -> GTaylor:
    """Expansion coefficients of 1/(gamma_s^2 + gamma_i^2) about the centrals.

    Partial derivatives of the exact two-frequency function are taken by
    Richardson-extrapolated central differences. Raises DegenerateExpansion
    when the summed confinement gamma_s^2 + gamma_i^2 falls below floor
    (alpha -> 0 limit, where every coefficient diverges).
    """
    gs2 = gamma(spec, omega_s0) ** 2
    gi2 = gamma(spec, omega_i0) ** 2
    if gs2 + gi2 < _GAMMA_SQ_FLOOR:
        raise DegenerateExpansion(
            f"gamma_s^2 + gamma_i^2 = {gs2 + gi2:.3g} 1/m^2 below floor; "
            "expansion of the transverse-overlap factor diverges"
        )

    def f(ds: float, di: float) -> float:
        return 1.0 / (gamma(spec, omega_s0 + ds) ** 2
                      + gamma(spec, omega_i0 + di) ** 2)

    hs = _REL_STEP * omega_s0
    hi = _REL_STEP * omega_i0
    for w, h in ((omega_s0, hs), (omega_i0, hi)):
        _check_window(spec.model, w - h)
        _check_window(spec.model, w + h)
    f00 = f(0.0, 0.0)

    def d1(axis: int, h: float) -> float:
        def diff(step):
            if axis == 0:
                return (f(step, 0.0) - f(-step, 0.0)) / (2.0 * step)
            return (f(0.0, step) - f(0.0, -step)) / (2.0 * step)
        return (4.0 * diff(h / 2.0) - diff(h)) / 3.0

    def d2(axis: int, h: float) -> float:
        def diff(step):
            if axis == 0:
                return (f(step, 0.0) - 2.0 * f00 + f(-step, 0.0)) / step**2
            return (f(0.0, step) - 2.0 * f00 + f(0.0, -step)) / step**2
        return (4.0 * diff(h / 2.0) - diff(h)) / 3.0

    def d_cross(h_s: float, h_i: float) -> float:
        def diff(scale):
            a, b = h_s * scale, h_i * scale
            return (f(a, b) - f(a, -b) - f(-a, b) + f(-a, -b)) / (4.0 * a * b)
        return (4.0 * diff(0.5) - diff(1.0)) / 3.0

    return GTaylor(
        g0=f00,
        g1s=d1(0, hs),
        g1i=d1(1, hi),
        g2s=0.5 * d2(0, hs),
        g2i=0.5 * d2(1, hi),
        g2si=d_cross(hs, hi),
    )


def constant_model(n0: float, omega_window: tuple = (1e13, 2e16),
                   material: str = "constant-index test material") -> DispersionModel:
    """Dispersionless model with fixed index n0 (test and limit cases)."""
    return DispersionModel(material=material, kind="constant",
                           coefficients=(float(n0),), omega_window=omega_window)


def load_model(source: str | Path) -> DispersionModel:
    """Load a dispersion model from a JSON data file or a built-in name.

    Built-in names resolve inside the packaged data directory ("linbo3_e").
    The file schema carries the material label, (B, C) coefficient pairs,
    and the wavelength validity window in meters; the loader converts the
    window to angular frequency and verifies n0 > 1 across it.
    """
    path = Path(source)
    if path.suffix == ".json" and path.exists():
        raw = json.loads(path.read_text())
    else:
        try:
            raw = json.loads(
                resources.files("counterpairs.data").joinpath(f"{source}.json").read_text()
            )
        except FileNotFoundError:
            raise FileNotFoundError(
                f"no dispersion data file at {source!r} and no built-in model of that name"
            ) from None
    if raw.get("schema") != "dispersion-model/1":
        raise ValueError(f"unsupported dispersion data schema {raw.get('schema')!r}")
    lam_lo, lam_hi = raw["wavelength_window_m"]
    if not (0.0 < lam_lo < lam_hi):
        raise ValueError("wavelength window must satisfy 0 < lo < hi")
    model = DispersionModel(
        material=raw["material"],
        kind=raw["kind"],
        coefficients=tuple(tuple(pair) for pair in raw["coefficients"]),
        omega_window=(2.0 * math.pi * C_LIGHT / lam_hi, 2.0 * math.pi * C_LIGHT / lam_lo),
    )
    lo, hi = model.omega_window
    for k in range(65):
        w = lo + (hi - lo) * k / 64.0
        n = refractive_index(model, w)
        if not (n > 1.0 and math.isfinite(n)):
            raise ValueError(
                f"model {model.material!r} gives n0 = {n} at omega = {w:.6g}; "
                "index must be finite and > 1 across the validity window"
            )
    return model
